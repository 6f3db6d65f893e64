"""Exception hierarchy for quatsurf.

Configuration problems derive from :class:`ConfigInvalid`, every numerical
failure derives from :class:`NumericalError`. The CLI maps the first to exit
code 2 and the second to exit code 3.
"""

from typing import Any, List, Optional, Sequence, Tuple

Node = Tuple[int, int]


class QuatsurfError(Exception):
    """Base class for all quatsurf errors."""


class ConfigInvalid(QuatsurfError, ValueError):
    """Run configuration failed schema or model validation."""

    def __init__(self, message: str, path: Optional[Sequence[Any]] = None):
        self.path = list(path) if path else []
        location = "/".join(str(p) for p in self.path)
        super().__init__(f"{location}: {message}" if location else message)


class NumericalError(QuatsurfError, ArithmeticError):
    """Base class for numerical failures."""


class _NodeListError(NumericalError):
    def __init__(self, message: str, nodes: Optional[Sequence[Node]] = None):
        self.nodes: List[Node] = [tuple(n) for n in (nodes or [])]  # type: ignore[misc]
        if self.nodes:
            preview = ", ".join(str(n) for n in self.nodes[:8])
            more = f" (+{len(self.nodes) - 8} more)" if len(self.nodes) > 8 else ""
            message = f"{message} at nodes {preview}{more}"
        super().__init__(message)


class Singular(NumericalError):
    """Matrix or quaternion is not invertible."""


class DegenerateSpectral(NumericalError):
    """Spectral parameter outside the domain of the requested family."""


class ProfileInvalid(NumericalError):
    """Profile curve violates (p')^2 + (q')^2 = q^2 or q > 0."""


class DegenerateImmersion(_NodeListError):
    """Derivative of the immersion vanishes at some nodes."""


class NotClosed(NumericalError):
    """A one-form expected to be closed has a large mixed-partials mismatch."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (closedness residual {residual:.3e})")


class RoundSphere(NumericalError):
    """Parallel surface collapses to a point."""


class StepTooCoarse(NumericalError):
    """Step-doubling estimate of the transport error exceeds tolerance."""

    def __init__(self, message: str, estimate: float):
        self.estimate = estimate
        super().__init__(f"{message} (error estimate {estimate:.3e})")


class DefectiveMonodromy(NumericalError):
    """Eigen-decomposition of a monodromy failed."""


class Blowup(NumericalError):
    """Integrated quantity exceeded the overflow guard."""

    def __init__(self, message: str, last_good_node: Optional[Node] = None):
        self.last_good_node = last_good_node
        suffix = f"; last good node {last_good_node}" if last_good_node is not None else ""
        super().__init__(message + suffix)


class SingularEverywhere(NumericalError):
    """Section component vanishes identically."""


class NotIndependent(_NodeListError):
    """Two sections are quaternionically dependent."""


class SplittingDegenerate(_NodeListError):
    """Direct sum decomposition of C^4 fails."""


class Dependent(_NodeListError):
    """Sections defining an associated-family member are dependent."""


class NotSmooth(NumericalError):
    """Spectral derivative estimates disagree across step sizes."""

    def __init__(self, message: str, disagreement: float):
        self.disagreement = disagreement
        super().__init__(f"{message} (disagreement {disagreement:.3e})")


class DegenerateDenominator(NumericalError):
    """Closed-form denominator vanishes."""
