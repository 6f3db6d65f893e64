"""Closed-form parallel sections of the CMC cylinder f = (ix + j e^{-iy})/2.

Sections are written in the complex split alpha = alpha0 + j alpha1 as

    alpha0 = c0 e^{i(theta + y)/2},   alpha1 = c1 e^{i(theta - y)/2},

with theta = sigma x + tau y and sigma^2 = rho, tau^2 = 1 - rho. The
isothermic family uses the parallel CMC surface g = f + N as dual, so
rho here is the parallel-surface gauge.
"""

import cmath
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from ..connections.families import HarmonicGaussN, IsothermicRho
from ..connections.transport import SectionField
from ..core.quaternion import decomplexify
from ..core.spectral import SpectralPoint, spectral_point_from_mu
from ..errors import DegenerateSpectral
from ..surfaces.immersion import ImmersionField
from ..surfaces.models import ParallelModel

logger = logging.getLogger(__name__)

COEFF_FLOOR = 1e-8


def cylinder_multipliers(rho: complex) -> Tuple[complex, complex]:
    """h = -e^{+- i pi sqrt(1 - rho)}."""
    tau = cmath.sqrt(1.0 - complex(rho))
    return -cmath.exp(1j * np.pi * tau), -cmath.exp(-1j * np.pi * tau)


def cylinder_resonances(k_max: int) -> List[float]:
    """Resonance points rho_k = 1 - k^2 for k = 2..k_max."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    return [float(1 - k * k) for k in range(2, k_max + 1)]


def _phases(X, Y, sigma: complex, tau: complex):
    theta = sigma * X + tau * Y
    return np.exp(0.5j * (theta + Y)), np.exp(0.5j * (theta - Y))


def _section_parts(X, Y, sigma, tau, c0, c1, d0=0.0, d1=0.0):
    """alpha and its partials; c0, c1 may depend on y with y-derivatives d0, d1."""
    e0, e1 = _phases(X, Y, sigma, tau)
    a0, a1 = c0 * e0, c1 * e1
    ax0, ax1 = 0.5j * sigma * a0, 0.5j * sigma * a1
    ay0 = (0.5j * (tau + 1.0) * c0 + d0) * e0
    ay1 = (0.5j * (tau - 1.0) * c1 + d1) * e1
    return (a0, a1), (ax0, ax1), (ay0, ay1)


def _quat_pair(first, second):
    return np.stack([decomplexify(*first), decomplexify(*second)], axis=-2)


def _isothermic_coefficients(sigma: complex, tau: complex) -> Tuple[complex, complex]:
    c0, c1 = sigma, 1.0 + tau
    if abs(c0) + abs(c1) < COEFF_FLOOR:
        c0, c1 = 1.0 - tau, sigma
    return c0, c1


def _harmonic_coefficients(
    sigma: complex, tau: complex, sp: SpectralPoint
) -> Tuple[complex, complex]:
    c0, c1 = sigma, 1.0 + tau
    if abs(c0) + abs(c1) < COEFF_FLOOR:
        c0, c1 = 2.0 * tau - sp.a - 1.0, sp.b
    return c0, c1


@dataclass(frozen=True)
class CylinderOracle:
    """Parallel sections of the isothermic family of the cylinder at ``rho``."""

    surface: ImmersionField
    rho: complex

    def __post_init__(self) -> None:
        if abs(self.rho) < 1e-14:
            raise DegenerateSpectral("rho = 0 has only constant parallel sections")

    @property
    def sigma(self) -> complex:
        return cmath.sqrt(complex(self.rho))

    @property
    def tau(self) -> complex:
        return cmath.sqrt(1.0 - complex(self.rho))

    @property
    def degenerate(self) -> bool:
        return abs(self.rho - 1.0) < 1e-14

    @property
    def multipliers(self) -> Tuple[complex, complex]:
        return cylinder_multipliers(self.rho)

    def connection(self) -> IsothermicRho:
        return IsothermicRho(self.surface, ParallelModel(self.surface.model), self.rho)

    def _build(self, sig, ta, c0, c1, d0=0.0, d1=0.0, **meta) -> SectionField:
        X, Y = self.surface.grid.mesh()
        if callable(c0):
            c0, c1, d0, d1 = c0(Y), c1(Y), d0(Y), d1(Y)
        alpha, ax, ay = _section_parts(X, Y, sig, ta, c0, c1, d0, d1)

        def beta_of(parts):
            return (-sig * parts[0], sig * parts[1])

        return SectionField.from_quaternions(
            self.surface.grid,
            _quat_pair(alpha, beta_of(alpha)),
            connection=self.connection(),
            dx=_quat_pair(ax, beta_of(ax)),
            dy=_quat_pair(ay, beta_of(ay)),
            **meta,
        )

    def section(self, sigma_sign: int = 1, tau_sign: int = 1) -> SectionField:
        """Exponential section with (sigma, tau) = (+-sqrt(rho), +-sqrt(1 - rho)).

        Its multiplier is -e^{i pi tau_sign sqrt(1 - rho)}.
        """
        sigma, tau = sigma_sign * self.sigma, tau_sign * self.tau
        c0, c1 = _isothermic_coefficients(sigma, tau)
        h = -cmath.exp(1j * np.pi * tau)
        return self._build(sigma, tau, c0, c1, multiplier=h, sigma=sigma, tau=tau)

    def linear_section(self, sigma_sign: int = 1) -> SectionField:
        """Non-multiplier section at rho = 1, with coefficients linear in y."""
        if not self.degenerate:
            raise ValueError("linear-in-y sections exist only at rho = 1")
        s = float(sigma_sign)

        def c0(y):
            return 0.5j * s * y

        def c1(y):
            return 1.0 + 0.5j * y

        def d0(y):
            return np.full_like(y, 0.5j * s, dtype=complex)

        def d1(y):
            return np.full_like(y, 0.5j, dtype=complex)

        return self._build(s, 0.0, c0, c1, d0, d1, multiplier=None, sigma=s, tau=0.0)

    def sections(self) -> List[SectionField]:
        """A complex basis of the parallel sections.

        Generically the four exponential sections; at rho = 1 the two
        exponential sections plus the two linear-in-y ones.
        """
        if self.degenerate:
            return [
                self.section(1), self.linear_section(1), self.section(-1), self.linear_section(-1)
            ]
        return [self.section(s, t) for s in (1, -1) for t in (1, -1)]


@dataclass(frozen=True)
class CylinderHarmonicOracle:
    """The two exponential d^N_mu-parallel sections of the cylinder.

    With w = sqrt(mu): tau = (w + 1/w)/2 and sigma = (w - 1/w)/(2i); the
    second section uses -w.
    """

    surface: ImmersionField
    mu: complex

    @property
    def spectral(self) -> SpectralPoint:
        return spectral_point_from_mu(self.mu)

    def sigma_tau(self, w_sign: int = 1) -> Tuple[complex, complex]:
        w = w_sign * cmath.sqrt(complex(self.mu))
        return (w - 1.0 / w) / 2j, (w + 1.0 / w) / 2.0

    def multiplier(self, w_sign: int = 1) -> complex:
        _, tau = self.sigma_tau(w_sign)
        return -cmath.exp(1j * np.pi * tau)

    def connection(self) -> HarmonicGaussN:
        return HarmonicGaussN(self.surface, self.spectral)

    def section(self, w_sign: int = 1) -> SectionField:
        sigma, tau = self.sigma_tau(w_sign)
        c0, c1 = _harmonic_coefficients(sigma, tau, self.spectral)
        X, Y = self.surface.grid.mesh()
        alpha, ax, ay = _section_parts(X, Y, sigma, tau, c0, c1)
        return SectionField.from_quaternions(
            self.surface.grid,
            decomplexify(*alpha)[..., None, :],
            connection=self.connection(),
            dx=decomplexify(*ax)[..., None, :],
            dy=decomplexify(*ay)[..., None, :],
            multiplier=self.multiplier(w_sign),
            sigma=sigma,
            tau=tau,
        )

    def sections(self) -> List[SectionField]:
        return [self.section(1), self.section(-1)]


def circle_family(surface: ImmersionField) -> Callable[[float], np.ndarray]:
    """t -> alpha(t) at the nodes, the d^N_{e^{it}}-parallel section with w = e^{it/2}.

    sigma = sin(t/2) and tau = cos(t/2) vary smoothly, and alpha(0) = 2j.
    """
    X, Y = surface.grid.mesh()

    def alpha(t: float) -> np.ndarray:
        sigma, tau = np.sin(0.5 * t), np.cos(0.5 * t)
        (a0, a1), _, _ = _section_parts(X, Y, sigma, tau, sigma, 1.0 + tau)
        return decomplexify(a0, a1)

    return alpha

