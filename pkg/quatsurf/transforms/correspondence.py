"""Algebraic correspondences between parallel sections of the three families.

For a CMC surface f with H = 1, Gauss map N and parallel surface
g = f + N:

  * a d^N_mu-parallel alpha gives the d^{N_g}_mu-parallel
    beta = (N alpha (a - 1) + alpha b) / 2, and (alpha, beta) is
    d_rho-parallel with rho = (1 - a) / 2;
  * conversely alpha = N beta - beta b / (a - 1);
  * a d_rho-parallel section splits into d^N_{mu+} and d^N_{mu-} parts.
"""

import logging
from typing import Tuple

import numpy as np

from ..connections.families import ConformalGaussS, HarmonicGaussN, IsothermicRho
from ..connections.transport import SectionField
from ..core.quaternion import QuatLike, as_quat, qmul, right_complex
from ..core.spectral import SpectralPoint, spectral_point_from_mu, spectral_point_from_rho
from ..errors import DegenerateSpectral
from ..surfaces.immersion import ImmersionField
from ..surfaces.models import ParallelModel

logger = logging.getLogger(__name__)


def check_mu(sp: SpectralPoint) -> None:
    """Reject mu in {0, 1}; a - 1 must stay away from zero."""
    if abs(sp.a - 1.0) < 1e-10:
        raise DegenerateSpectral(f"mu = {sp.mu} is too close to 1")


def harmonic_term(N: np.ndarray, alpha: np.ndarray, sp: SpectralPoint) -> np.ndarray:
    """(N alpha (a - 1) + alpha b) / 2."""
    return 0.5 * (right_complex(qmul(N, alpha), sp.a - 1.0) + right_complex(alpha, sp.b))


def harmonic_derivative(
    fX: np.ndarray, N: np.ndarray, alpha: np.ndarray, sp: SpectralPoint
) -> np.ndarray:
    """alpha_X for a d^N_mu-parallel alpha."""
    return -qmul(fX, harmonic_term(N, alpha, sp))


def cw_alpha(N: np.ndarray, beta: np.ndarray, sp: SpectralPoint) -> np.ndarray:
    """alpha = N beta - beta b / (a - 1)."""
    check_mu(sp)
    return qmul(N, beta) - right_complex(beta, sp.b_over_a_minus_one())


def _parallel_node_data(f: ImmersionField):
    N = f.normal()
    Nx, Ny = f.normal_derivatives()
    return N, (f.fx + Nx, f.fy + Ny), (Nx, Ny)


def beta_field(
    f: ImmersionField, alpha: SectionField, mu
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """beta and its exact partials for a d^N_mu-parallel alpha."""
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    N, (gx, gy), _ = _parallel_node_data(f)
    a = alpha.alpha
    beta = harmonic_term(N, a, sp)
    # beta is d^{N_g}_mu-parallel with N_g = -N
    bx = harmonic_derivative(gx, -N, beta, sp)
    by = harmonic_derivative(gy, -N, beta, sp)
    return beta, bx, by


def isothermic_from_harmonic(f: ImmersionField, alpha: SectionField, mu) -> SectionField:
    """The d_rho-parallel section (alpha, beta) attached to a d^N_mu-parallel alpha."""
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    beta, bx, by = beta_field(f, alpha, sp)
    ax, ay = alpha.quaternion_derivatives()
    conn = IsothermicRho(f, ParallelModel(f.model), sp.rho)
    return SectionField.from_quaternions(
        f.grid,
        np.stack([alpha.alpha, beta], axis=-2),
        connection=conn,
        dx=np.stack([ax[..., 0, :], bx], axis=-2),
        dy=np.stack([ay[..., 0, :], by], axis=-2),
        mu=sp.mu,
    )


def conformal_from_harmonic(
    f: ImmersionField, alpha: SectionField, mu, n: QuatLike
) -> SectionField:
    """d^S_mu-parallel section e nu + psi beta with nu = alpha + n."""
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    beta, bx, by = beta_field(f, alpha, sp)
    ax, ay = alpha.quaternion_derivatives()
    nu = alpha.alpha + as_quat(n)
    return SectionField.from_quaternions(
        f.grid,
        np.stack([nu, beta], axis=-2),
        connection=ConformalGaussS(f, sp),
        dx=np.stack([ax[..., 0, :], bx], axis=-2),
        dy=np.stack([ay[..., 0, :], by], axis=-2),
        mu=sp.mu,
    )


def decompose_rho_section(
    f: ImmersionField, phi: SectionField, rho: complex
) -> Tuple[SectionField, SectionField]:
    """Split a d_rho-parallel (alpha, beta) into d^N_{mu+} and d^N_{mu-} parts.

    alpha_+- = (alpha +- (2 beta - N alpha (a - 1)) / b) / 2, using the
    (a, b) of mu+.

    Raises:
        DegenerateSpectral: rho in {0, 1}, where b vanishes
    """
    plus, minus = spectral_point_from_rho(rho)
    a, b = plus.a, plus.b
    if abs(b) < 1e-10:
        raise DegenerateSpectral(f"rho = {rho} has b = 0; no splitting into mu-sections")
    N = f.normal()
    Nx, Ny = f.normal_derivatives()
    alpha, beta = phi.alpha, phi.beta
    (ax, bx), (ay, by) = (
        (d[..., 0, :], d[..., 1, :]) for d in phi.quaternion_derivatives()
    )

    def odd(be, N_al):
        return right_complex(2.0 * be - right_complex(N_al, a - 1.0), 1.0 / b)

    d_plus = odd(beta, qmul(N, alpha))
    dx_odd = odd(bx, qmul(Nx, alpha) + qmul(N, ax))
    dy_odd = odd(by, qmul(Ny, alpha) + qmul(N, ay))
    parts = []
    for sign, sp in ((1.0, plus), (-1.0, minus)):
        parts.append(
            SectionField.from_quaternions(
                f.grid,
                (0.5 * (alpha + sign * d_plus))[..., None, :],
                connection=HarmonicGaussN(f, sp),
                dx=(0.5 * (ax + sign * dx_odd))[..., None, :],
                dy=(0.5 * (ay + sign * dy_odd))[..., None, :],
                mu=sp.mu,
            )
        )
    return parts[0], parts[1]
