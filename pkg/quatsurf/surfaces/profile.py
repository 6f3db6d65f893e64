"""Profile curves of surfaces of revolution f = i p(x) + j q(x) e^{-iy}.

Profiles are given as expressions in ``x``; derivatives are taken
symbolically and the result is lambdified to numpy.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from ..errors import ProfileInvalid

logger = logging.getLogger(__name__)

X = sympy.Symbol("x", real=True)

ALLOWED_FUNCTIONS: Dict[str, object] = {
    "exp": sympy.exp,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "tan": sympy.tan,
    "sinh": sympy.sinh,
    "cosh": sympy.cosh,
    "tanh": sympy.tanh,
    "sqrt": sympy.sqrt,
    "pi": sympy.pi,
    "x": X,
}

CONSTRAINT_TOL = 1e-8


def parse_profile_expr(text: str) -> sympy.Expr:
    """Parse a one-variable expression in ``x``.

    Only numbers, arithmetic and the functions in ``ALLOWED_FUNCTIONS`` are
    accepted.

    Raises:
        ValueError: unknown names or malformed input
    """
    try:
        expr = parse_expr(
            str(text),
            local_dict=dict(ALLOWED_FUNCTIONS),
            global_dict={"__builtins__": {}, "Integer": sympy.Integer, "Float": sympy.Float,
                         "Rational": sympy.Rational, "Symbol": sympy.Symbol},
            transformations=standard_transformations,
            evaluate=True,
        )
    except Exception as exc:
        raise ValueError(f"cannot parse profile expression {text!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr):
        raise ValueError(f"profile expression {text!r} is not a scalar expression")
    unknown = expr.free_symbols - {X}
    if unknown:
        names = sorted(map(str, unknown))
        raise ValueError(f"profile expression {text!r} uses unknown symbols {names}")
    return expr


def _lambdify(expr: sympy.Expr) -> Callable[[np.ndarray], np.ndarray]:
    fn = sympy.lambdify(X, expr, modules="numpy")

    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).copy()

    return evaluate


@dataclass(frozen=True)
class ProfileCurve:
    """Curve (p, q) in the upper half plane, parametrized by hyperbolic arc length.

    The constraint (p')^2 + (q')^2 = q^2 makes f = i p + j q e^{-iy}
    conformal.
    """

    p_expr: sympy.Expr
    q_expr: sympy.Expr
    _fns: Dict[str, Callable[[np.ndarray], np.ndarray]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        derived = {
            "p": self.p_expr,
            "dp": sympy.diff(self.p_expr, X),
            "ddp": sympy.diff(self.p_expr, X, 2),
            "q": self.q_expr,
            "dq": sympy.diff(self.q_expr, X),
            "ddq": sympy.diff(self.q_expr, X, 2),
        }
        for key, expr in derived.items():
            self._fns[key] = _lambdify(sympy.simplify(expr))

    @classmethod
    def from_strings(cls, p: str, q: str) -> "ProfileCurve":
        return cls(parse_profile_expr(p), parse_profile_expr(q))

    def p(self, x: np.ndarray) -> np.ndarray:
        return self._fns["p"](x)

    def dp(self, x: np.ndarray) -> np.ndarray:
        return self._fns["dp"](x)

    def ddp(self, x: np.ndarray) -> np.ndarray:
        return self._fns["ddp"](x)

    def q(self, x: np.ndarray) -> np.ndarray:
        return self._fns["q"](x)

    def dq(self, x: np.ndarray) -> np.ndarray:
        return self._fns["dq"](x)

    def ddq(self, x: np.ndarray) -> np.ndarray:
        return self._fns["ddq"](x)

    def constraint_residual(self, x: np.ndarray) -> np.ndarray:
        """(p')^2 + (q')^2 - q^2, pointwise."""
        return self.dp(x) ** 2 + self.dq(x) ** 2 - self.q(x) ** 2

    def validate(self, x: np.ndarray, tol: float = CONSTRAINT_TOL) -> None:
        """Check q > 0 and the arc-length constraint on the sample points ``x``.

        Raises:
            ProfileInvalid: either condition fails
        """
        q = self.q(x)
        if np.any(~np.isfinite(q)) or np.any(q <= 0):
            raise ProfileInvalid("profile q must be positive and finite on the domain")
        residual = float(np.max(np.abs(self.constraint_residual(x))))
        if not np.isfinite(residual) or residual > tol:
            raise ProfileInvalid(
                f"profile violates (p')^2 + (q')^2 = q^2 (max residual {residual:.3e})"
            )
        logger.debug("profile constraint residual %.3e", residual)


def example_profile() -> ProfileCurve:
    """p = -x + x^3/3, q = 1 + x^2."""
    return ProfileCurve.from_strings("-x + x**3/3", "1 + x**2")


def cylinder_profile() -> ProfileCurve:
    """Cylinder of radius 1/2 around the i axis."""
    return ProfileCurve.from_strings("x/2", "1/2")


def sphere_profile() -> ProfileCurve:
    """Unit sphere in conformal coordinates."""
    return ProfileCurve.from_strings("tanh(x)", "1/cosh(x)")
