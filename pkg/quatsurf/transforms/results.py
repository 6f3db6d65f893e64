"""Result containers shared by the transforms."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..core.quaternion import qmul, qnorm
from ..core.spectral import SpectralPoint
from ..errors import Node
from ..surfaces.immersion import ImmersionField

logger = logging.getLogger(__name__)

SINGULAR_REL = 1e-8


def singular_mask(*fields: np.ndarray, rel: float = SINGULAR_REL) -> np.ndarray:
    """Nodes where any of the quaternion fields is tiny relative to its median norm."""
    mask = np.zeros(fields[0].shape[:-1], dtype=bool)
    for values in fields:
        norms = qnorm(values)
        scale = float(np.median(norms))
        mask |= norms < rel * scale if scale > 0 else True
    return mask


def nodes_of(mask: np.ndarray) -> List[Node]:
    return [(int(i), int(j)) for i, j in np.argwhere(mask)]


@dataclass(frozen=True)
class DarbouxResult:
    """A transformed immersion f^ = f + T with its Gauss data and diagnostics."""

    surface: ImmersionField
    T: np.ndarray
    normal: np.ndarray
    right_normal: np.ndarray
    dual: Optional[ImmersionField] = None
    T_dual: Optional[np.ndarray] = None
    rho_hat: Optional[np.ndarray] = None
    singular: Optional[np.ndarray] = None
    cmc_residual: Optional[np.ndarray] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    spectral: Optional[SpectralPoint] = None
    kind: str = "rho"

    @property
    def values(self) -> np.ndarray:
        return self.surface.values

    @property
    def valid_mask(self) -> np.ndarray:
        """Interior nodes that are not flagged as singular."""
        mask = self.surface.grid.interior_mask()
        if self.singular is not None:
            mask = mask & ~self.singular
        return mask

    @property
    def singular_nodes(self) -> List[Node]:
        return [] if self.singular is None else nodes_of(self.singular)

    def max_cmc_residual(self) -> float:
        if self.cmc_residual is None:
            raise ValueError(f"{self.kind} transform carries no CMC residual")
        return float(np.max(self.cmc_residual[self.valid_mask]))

    def normals_residual(self) -> Dict[str, float]:
        """Interior maxima of |*df^ - N^ df^| and |*df^ + df^ R^|."""
        f = self.surface
        N, R = self.normal, self.right_normal
        mask = self.valid_mask
        left = qnorm(f.fy - qmul(N, f.fx)) + qnorm(-f.fx - qmul(N, f.fy))
        right = qnorm(f.fy + qmul(f.fx, R)) + qnorm(-f.fx + qmul(f.fy, R))
        return {"star_left": float(np.max(left[mask])), "star_right": float(np.max(right[mask]))}

    def translated_to(self, other: np.ndarray, node=(0, 0)) -> np.ndarray:
        """Values shifted so that they agree with ``other`` at ``node``."""
        i, j = node
        return self.values - self.values[i, j] + other[i, j]

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind, "residuals": dict(self.residuals)}
        if self.spectral is not None:
            out["spectral"] = self.spectral.as_dict()
        if self.cmc_residual is not None:
            out["residuals"]["cmc"] = self.max_cmc_residual()
        out["singular_nodes"] = [list(n) for n in self.singular_nodes]
        return out


@dataclass(frozen=True)
class DressingMatrix:
    """Simple factor dressing r(lambda) as a C^4 endomorphism field.

    ``basis`` holds, per node, the columns of an adapted basis of C^4 and
    :meth:`weights` gives the diagonal entries in that basis.
    """

    rho: complex
    basis: np.ndarray
    basis_inv: np.ndarray
    kind: str

    def weights(self, lam: complex) -> np.ndarray:
        rho, rbar = complex(self.rho), complex(self.rho).conjugate()
        if np.isinf(lam):
            gamma, sigma = rbar / rho, 0.0
        else:
            gamma = rbar * (rho - lam) / (rho * (rbar - lam))
            sigma = rbar / (rbar - lam)
        if self.kind == "E":
            return np.array([gamma, 1.0, sigma, sigma], dtype=complex)
        return np.array([gamma, gamma, 1.0, 1.0], dtype=complex)

    def __call__(self, lam: complex) -> np.ndarray:
        w = self.weights(lam)
        return np.einsum("...ij,j,...jk->...ik", self.basis, w, self.basis_inv)

    def at_infinity(self) -> np.ndarray:
        return self(np.inf)
