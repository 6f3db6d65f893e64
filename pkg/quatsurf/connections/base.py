"""Base class for complexified connection families."""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Union

import numpy as np

from ..core.spectral import SpectralPoint
from ..surfaces.immersion import ImmersionField
from ..surfaces.models import SurfaceModel

SurfaceLike = Union[ImmersionField, SurfaceModel]


class ConnectionKind(str, Enum):
    """The three associated families of a CMC surface."""

    ISOTHERMIC_RHO = "isothermic_rho"
    HARMONIC_GAUSS_N = "harmonic_gauss_n"
    CONFORMAL_GAUSS_S = "conformal_gauss_s"


def model_of(surface: SurfaceLike) -> SurfaceModel:
    return surface.model if isinstance(surface, ImmersionField) else surface


class Connection(ABC):
    """Flat connection d + omega on a trivial C^dim bundle.

    Sections solve d(phi)/ds = A phi along a curve, so omega = -A.
    """

    kind: ConnectionKind
    dimension: int
    spectral: SpectralPoint

    @abstractmethod
    def generator(self, x: np.ndarray, y: np.ndarray, direction: int) -> np.ndarray:
        """A_X at the points (x, y); shape broadcast(x, y) + (dim, dim), complex."""

    def generator_along(self, x: np.ndarray, y: np.ndarray, dx: float, dy: float) -> np.ndarray:
        """A evaluated on the tangent vector (dx, dy)."""
        out = 0.0
        if dx:
            out = out + dx * self.generator(x, y, 0)
        if dy:
            out = out + dy * self.generator(x, y, 1)
        if np.isscalar(out):
            shape = np.broadcast_shapes(np.shape(x), np.shape(y))
            return np.zeros(shape + (self.dimension, self.dimension), dtype=complex)
        return out

    @property
    def is_quaternionic(self) -> bool:
        """True when parallel transport commutes with right multiplication by j."""
        return False

    @property
    def multiplier_multiplicity(self) -> int:
        """How many monodromy eigenvalues share each multiplier generically."""
        return 1

    def describe(self) -> dict:
        return {"kind": self.kind.value, "dimension": self.dimension, **self.spectral.as_dict()}
