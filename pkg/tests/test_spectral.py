import cmath
import math

import numpy as np
import pytest

from quatsurf.core.spectral import (
    mu_on_circle,
    rho_of_mu,
    spectral_point_from_mu,
    spectral_point_from_rho,
)
from quatsurf.errors import DegenerateSpectral


@pytest.mark.parametrize("mu", [0.4 + 0.3j, -2.0, cmath.exp(0.9j), 7 - 4 * math.sqrt(3)])
def test_point_from_mu(mu):
    sp = spectral_point_from_mu(mu)
    assert abs(sp.a**2 + sp.b**2 - 1) < 1e-12
    assert abs(sp.a + 1j * sp.b - mu) < 1e-12
    assert abs(sp.rho - rho_of_mu(mu)) < 1e-12


def test_reference_values():
    assert abs(rho_of_mu(7 - 4 * math.sqrt(3)) + 3) < 1e-12
    assert abs(rho_of_mu(-1) - 1) < 1e-15


def test_real_pair_at_minus_three():
    first, second = spectral_point_from_rho(-3.0)
    assert first.mu == pytest.approx(7 + 4 * math.sqrt(3))
    assert second.mu == pytest.approx(7 - 4 * math.sqrt(3))
    assert first.rho == second.rho == -3.0


def test_round_trip_on_random_samples():
    rng = np.random.default_rng(7)
    rhos = rng.normal(scale=3.0, size=200) + 1j * rng.normal(scale=3.0, size=200)
    for rho in rhos:
        for sp in spectral_point_from_rho(rho):
            assert abs(rho_of_mu(sp.mu) - rho) <= 1e-12 * max(1.0, abs(rho))


def test_pair_is_reciprocal():
    first, second = spectral_point_from_rho(0.3 + 0.2j)
    assert abs(first.mu * second.mu - 1) < 1e-12


def test_branch_reverses_order():
    plus = spectral_point_from_rho(0.25 - 1.0j)
    minus = spectral_point_from_rho(0.25 - 1.0j, branch=-1)
    assert plus == minus[::-1]
    with pytest.raises(ValueError):
        spectral_point_from_rho(0.5, branch=2)


def test_degenerate_values():
    with pytest.raises(DegenerateSpectral):
        spectral_point_from_mu(0)
    with pytest.raises(DegenerateSpectral):
        rho_of_mu(0)
    assert spectral_point_from_mu(1.0).is_degenerate
    assert spectral_point_from_mu(-1.0).is_degenerate
    with pytest.raises(DegenerateSpectral):
        spectral_point_from_mu(1.0).b_over_a_minus_one()


def test_unit_circle():
    sp = spectral_point_from_mu(mu_on_circle(1.1))
    assert sp.on_unit_circle
    # real rho on the circle, between 0 and 1
    assert abs(sp.rho.imag) < 1e-12
    assert 0.0 < sp.rho.real < 1.0
    assert sp.as_dict()["mu"] == [sp.mu.real, sp.mu.imag]
