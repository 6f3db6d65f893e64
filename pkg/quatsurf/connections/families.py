"""The isothermic, harmonic-Gauss and conformal-Gauss connection families.

Quaternions act on C^2 through the split q = z0 + j z1 (see
:func:`quatsurf.core.quaternion.left_matrix`). Right multiplication by a
complex spectral value is then scalar, so each family is a complex-linear
generator field.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from ..core.quaternion import left_matrix, qmul
from ..core.spectral import (
    SpectralPoint,
    spectral_point_from_mu,
    spectral_point_from_rho,
)
from ..surfaces.models import ChristoffelDualModel, ParallelModel, SurfaceModel
from .base import Connection, ConnectionKind, SurfaceLike, model_of

logger = logging.getLogger(__name__)

DUAL_GAUGES = ("parallel_cmc", "isothermic_formula")


def _block(
    top_right: np.ndarray, bottom_left: np.ndarray, bottom_right: Optional[np.ndarray] = None
):
    shape = top_right.shape[:-2]
    out = np.zeros(shape + (4, 4), dtype=complex)
    out[..., 0:2, 2:4] = top_right
    if bottom_left is not None:
        out[..., 2:4, 0:2] = bottom_left
    if bottom_right is not None:
        out[..., 2:4, 2:4] = bottom_right
    return out


def _harmonic_block(
    model: SurfaceModel, spectral: SpectralPoint, x, y, direction: int
) -> np.ndarray:
    # d alpha = -1/2 df (N alpha (a - 1) + alpha b)
    fX = model.differential(x, y, direction)
    N = model.normal(x, y)
    a, b = spectral.a, spectral.b
    return -0.5 * ((a - 1.0) * left_matrix(qmul(fX, N)) + b * left_matrix(fX))


class IsothermicRho(Connection):
    """d_rho on C^4 = (H^2, right i): d alpha = -df beta, d beta = -df^d alpha rho.

    ``dual`` is the surface whose differential plays the role of df^d: the
    Christoffel dual, the parallel CMC surface g = f + N, or any other
    surface (a non-dual choice gives a curved connection).
    """

    kind = ConnectionKind.ISOTHERMIC_RHO
    dimension = 4

    def __init__(self, surface: SurfaceLike, dual: SurfaceLike, rho: complex):
        self.model = model_of(surface)
        self.dual = model_of(dual)
        self.rho = complex(rho)
        self.spectral = spectral_point_from_rho(self.rho)[0]

    def generator(self, x, y, direction):
        fX = left_matrix(self.model.differential(x, y, direction))
        dX = left_matrix(self.dual.differential(x, y, direction))
        return _block(-fX, -self.rho * dX)

    @property
    def is_quaternionic(self) -> bool:
        return abs(self.rho.imag) < 1e-14

    @property
    def multiplier_multiplicity(self) -> int:
        return 2


class HarmonicGaussN(Connection):
    """d^N_mu on C^2 = (H, right i), built from the left normal of ``surface``.

    Applied to the parallel surface g = f + N this is d^{N_g}_mu with
    N_g = -N.
    """

    kind = ConnectionKind.HARMONIC_GAUSS_N
    dimension = 2

    def __init__(self, surface: SurfaceLike, mu: Union[complex, SpectralPoint]):
        self.model = model_of(surface)
        self.spectral = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)

    def generator(self, x, y, direction):
        return _harmonic_block(self.model, self.spectral, x, y, direction)

    @property
    def is_quaternionic(self) -> bool:
        return self.spectral.on_unit_circle


class ConformalGaussS(Connection):
    """d^S_mu in the coordinates phi = e nu + psi beta with psi = (f, 1).

    d nu = -df beta and beta is d^{N_g}_mu-parallel for g = f + N, so the
    constant sections e n are always parallel.
    """

    kind = ConnectionKind.CONFORMAL_GAUSS_S
    dimension = 4

    def __init__(self, surface: SurfaceLike, mu: Union[complex, SpectralPoint]):
        self.model = model_of(surface)
        self.parallel = ParallelModel(self.model)
        self.spectral = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)

    def generator(self, x, y, direction):
        fX = left_matrix(self.model.differential(x, y, direction))
        inner = _harmonic_block(self.parallel, self.spectral, x, y, direction)
        return _block(-fX, None, inner)

    @property
    def is_quaternionic(self) -> bool:
        return self.spectral.on_unit_circle


def dual_model(surface: SurfaceLike, gauge: str) -> SurfaceModel:
    """The surface used as df^d in the isothermic family.

    ``parallel_cmc`` uses g = f + N, ``isothermic_formula`` uses
    df^d = f_x^{-1} dx - f_y^{-1} dy.
    """
    model = model_of(surface)
    if gauge == "parallel_cmc":
        return ParallelModel(model)
    if gauge == "isothermic_formula":
        return ChristoffelDualModel(model)
    raise ValueError(f"unknown dual gauge {gauge!r}; expected one of {DUAL_GAUGES}")


def isothermic_connection(
    surface: SurfaceLike, rho: complex, gauge: str = "parallel_cmc"
) -> IsothermicRho:
    return IsothermicRho(surface, dual_model(surface, gauge), rho)


def omega_eval(conn: Connection, node: Tuple[float, float], direction: int) -> np.ndarray:
    """Connection form omega(d/dX) at a point, with d phi = -omega phi."""
    x, y = node
    return -conn.generator(np.asarray(x, dtype=float), np.asarray(y, dtype=float), direction)
