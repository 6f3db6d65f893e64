import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.connections.transport import SectionField
from quatsurf.core.quaternion import qnorm, qreal
from quatsurf.core.spectral import spectral_point_from_mu, spectral_point_from_rho
from quatsurf.errors import Dependent, NotSmooth
from quatsurf.oracles.cylinder import CylinderHarmonicOracle, CylinderOracle, circle_family
from quatsurf.transforms.associated import (
    calapso,
    cw_assoc,
    cw_limit,
    lawson,
    limit_isothermic_family,
    normalized_family,
    sym_bobenko,
)
from quatsurf.transforms.correspondence import harmonic_term

R = 0.2


def lawson_sections(cylinder, r):
    plus, minus = spectral_point_from_rho(r)
    return (
        CylinderHarmonicOracle(cylinder, plus.mu).section(),
        CylinderHarmonicOracle(cylinder, minus.mu).section(),
    )


@pytest.mark.parametrize("r", [0.05, R, 0.5])
def test_lawson_sphere_radius(cylinder, r):
    plus, minus = lawson_sections(cylinder, r)
    member = lawson(cylinder, plus, minus, r)
    b = 2.0 * math.sqrt(r * (1.0 - r))
    assert member.radius == pytest.approx(1.0 / b, rel=1e-10)
    assert member.radius_spread < 1e-10


@pytest.mark.parametrize("r", [0.05, R, 0.5])
def test_lawson_mean_curvature_in_sphere(cylinder, r):
    plus, minus = lawson_sections(cylinder, r)
    member = lawson(cylinder, plus, minus, r)
    assert member.mean_curvature_value() == pytest.approx(1.0 - 2.0 * r, abs=1e-5)
    assert member.mean_curvature_spread() < 1e-6
    report = member.as_dict()
    assert set(report) >= {"radius", "sphere_mean_curvature", "singular_nodes"}


@pytest.mark.parametrize("r", [0.0, 1.0, -0.5, 1.5])
def test_lawson_needs_r_in_unit_interval(cylinder, r):
    plus, minus = lawson_sections(cylinder, R)
    with pytest.raises(ValueError):
        lawson(cylinder, plus, minus, r)


def test_calapso_rejects_bad_input(cylinder):
    phi = CylinderOracle(cylinder, 0.5).section()
    with pytest.raises(ValueError):
        calapso(cylinder, phi, phi, 0.0)
    with pytest.raises(Dependent):
        calapso(cylinder, phi, phi, 0.5)


def test_constrained_willmore_associated_surface(cylinder):
    mu = np.exp(0.8j)
    alpha = CylinderHarmonicOracle(cylinder, mu).section()
    member = cw_assoc(cylinder, alpha, mu)
    assert_allclose(member.surface.values, -alpha.alpha)
    assert member.radius_spread < 1e-12
    with pytest.raises(ValueError):
        cw_assoc(cylinder, alpha, 0.5 * mu)


def test_circle_family_at_zero(cylinder):
    assert_allclose(circle_family(cylinder)(0.0)[0, 0], [0.0, 0.0, 2.0, 0.0], atol=1e-15)


def test_sym_bobenko_is_imaginary(cylinder):
    member = sym_bobenko(cylinder, circle_family(cylinder), 0.9)
    grid = cylinder.grid
    assert_allclose(member.values[grid.nx // 2, grid.ny // 2], np.zeros(4), atol=1e-10)
    assert np.max(np.abs(qreal(member.values))) < 1e-8


def test_sym_bobenko_smoothness_guard(cylinder):
    with pytest.raises(NotSmooth):
        sym_bobenko(cylinder, circle_family(cylinder), 0.9, tol=1e-20)


@pytest.mark.parametrize("limit", [limit_isothermic_family, cw_limit])
def test_families_converge_to_sym_bobenko(cylinder, limit):
    report = limit(cylinder, circle_family(cylinder), 0.9)
    assert report.monotone
    assert report.fitted_order > 0.5
    assert report.errors[-1] < report.errors[0]
    assert report.as_dict()["monotone"] is True


def test_cw_limit_endpoint_is_close(cylinder):
    report = cw_limit(cylinder, circle_family(cylinder), 0.9)
    assert report.errors[-1] < 5e-3


def test_limit_members_are_calapso_transforms(cylinder):
    s, t = 0.9, 0.25
    base = (cylinder.grid.nx // 2, cylinder.grid.ny // 2)
    fam = normalized_family(circle_family(cylinder), base)
    N = cylinder.normal()

    def lift(u):
        alpha = fam(u)
        return alpha, harmonic_term(N, alpha, spectral_point_from_mu(np.exp(1j * u)))

    (a_plus, b_plus), (a_minus, b_minus) = lift(s + t), lift(s - t)
    phi1 = SectionField.from_quaternions(cylinder.grid, np.stack([a_plus, b_plus], axis=-2))
    phi2 = SectionField.from_quaternions(
        cylinder.grid, np.stack([a_plus - a_minus, b_plus - b_minus], axis=-2) / t
    )
    member = calapso(cylinder, phi1, phi2, 0.5 * (1.0 - math.cos(s + t)))
    report = limit_isothermic_family(
        cylinder, circle_family(cylinder), s, ts=[0.5, t], base=base
    )
    mask = cylinder.grid.interior_mask()
    error = np.max(qnorm(member.surface.values - report.limit.values)[mask])
    assert report.errors[1] == pytest.approx(error, rel=1e-12)
