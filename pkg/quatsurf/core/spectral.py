"""Spectral parameters of the CMC, constrained Willmore and isothermic families.

A CMC spectral value mu determines

    a = (mu + 1/mu) / 2,   b = i (1/mu - mu) / 2,   rho = (1 - a) / 2,

so that a^2 + b^2 = 1 and mu = a + i b. Conversely every rho comes from the
pair mu_+- = 1 - 2 rho +- 2 i sqrt(rho (1 - rho)).
"""

import cmath
from dataclasses import dataclass
from typing import Tuple

from ..errors import DegenerateSpectral

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral data (mu, rho, a, b) of one family member."""

    mu: complex
    rho: complex
    a: complex
    b: complex

    @property
    def is_degenerate(self) -> bool:
        """True for mu = +-1, i.e. rho in {0, 1}."""
        return abs(self.mu - 1) < DEGENERATE_TOL or abs(self.mu + 1) < DEGENERATE_TOL

    @property
    def on_unit_circle(self) -> bool:
        return abs(abs(self.mu) - 1.0) < 1e-12

    def b_over_a_minus_one(self) -> complex:
        """b / (a - 1), guarded against mu near 1."""
        if abs(self.a - 1) < 1e-10:
            raise DegenerateSpectral(f"a - 1 vanishes for mu = {self.mu}")
        return self.b / (self.a - 1)

    def as_dict(self) -> dict:
        return {
            "mu": [self.mu.real, self.mu.imag],
            "rho": [self.rho.real, self.rho.imag],
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
        }


def spectral_point_from_mu(mu: complex) -> SpectralPoint:
    """Build the spectral point of a CMC parameter.

    Raises:
        DegenerateSpectral: mu = 0
    """
    mu = complex(mu)
    if mu == 0:
        raise DegenerateSpectral("mu = 0 does not define a connection")
    inv = 1.0 / mu
    a = 0.5 * (mu + inv)
    b = 0.5j * (inv - mu)
    return SpectralPoint(mu=mu, rho=0.5 * (1.0 - a), a=a, b=b)


def spectral_point_from_rho(rho: complex, branch: int = 1) -> Tuple[SpectralPoint, SpectralPoint]:
    """The two CMC spectral points over an isothermic parameter.

    The pair mu_+- does not depend on the square-root branch. It is returned
    sorted by imaginary part descending, then real part descending; a
    negative ``branch`` reverses the order.

    Args:
        rho: Isothermic spectral value
        branch: +1 or -1

    Returns:
        (first, second) spectral points, both with ``rho`` set exactly
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    rho = complex(rho)
    a = 1.0 - 2.0 * rho
    root = cmath.sqrt(rho) * cmath.sqrt(1.0 - rho)
    points = [
        SpectralPoint(mu=a + 1j * b, rho=rho, a=a, b=b) for b in (2.0 * root, -2.0 * root)
    ]
    points.sort(key=lambda p: (-round(p.mu.imag, 14), -round(p.mu.real, 14)))
    if branch < 0:
        points.reverse()
    return points[0], points[1]


def rho_of_mu(mu: complex) -> complex:
    """rho = -(mu - 1)^2 / (4 mu)."""
    mu = complex(mu)
    if mu == 0:
        raise DegenerateSpectral("mu = 0 does not define a connection")
    return -((mu - 1.0) ** 2) / (4.0 * mu)


def mu_on_circle(t: float) -> complex:
    """mu = e^{i t}."""
    return cmath.exp(1j * t)
