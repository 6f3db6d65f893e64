import cmath

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.connections.families import HarmonicGaussN
from quatsurf.connections.monodromy import monodromy
from quatsurf.errors import DegenerateSpectral
from quatsurf.oracles import (
    CylinderHarmonicOracle,
    CylinderOracle,
    RevolutionOracle,
    circle_family,
    cylinder_multipliers,
    cylinder_resonances,
    gauge_factor,
    revolution_resonances,
    to_formula_gauge,
    to_parallel_gauge,
)
from quatsurf.surfaces.grid import DomainGrid
from quatsurf.surfaces.immersion import christoffel_dual, make_plane, make_revolution
from quatsurf.surfaces.profile import example_profile
from quatsurf.transforms.darboux import rho_darboux

RHO = 0.3 + 0.2j


def test_cylinder_multipliers():
    h1, h2 = cylinder_multipliers(RHO)
    tau = cmath.sqrt(1 - RHO)
    assert h1 == pytest.approx(-cmath.exp(1j * np.pi * tau))
    assert h1 * h2 == pytest.approx(1.0)
    assert cylinder_resonances(4) == [-3.0, -8.0, -15.0]
    with pytest.raises(ValueError):
        cylinder_resonances(1)


@pytest.mark.parametrize("rho", [RHO, -2.0 + 0.5j, 0.7 - 0.4j, 4.0])
def test_cylinder_sections_are_parallel(cylinder, rho):
    oracle = CylinderOracle(cylinder, rho)
    for section in oracle.sections():
        assert section.transport_residual() < 1e-10


def test_cylinder_linear_sections(cylinder):
    oracle = CylinderOracle(cylinder, 1.0)
    assert oracle.degenerate
    sections = oracle.sections()
    assert len(sections) == 4
    assert sections[1].meta["multiplier"] is None
    for section in sections:
        assert section.transport_residual() < 1e-10
    with pytest.raises(ValueError):
        CylinderOracle(cylinder, RHO).linear_section()


def test_cylinder_section_metadata(cylinder):
    oracle = CylinderOracle(cylinder, RHO)
    section = oracle.section(-1, 1)
    assert section.meta["sigma"] == pytest.approx(-oracle.sigma)
    assert section.meta["tau"] == pytest.approx(oracle.tau)
    assert section.meta["multiplier"] == pytest.approx(-cmath.exp(1j * np.pi * oracle.tau))
    linear = CylinderOracle(cylinder, 1.0).linear_section(-1)
    assert linear.meta == {"multiplier": None, "sigma": -1.0, "tau": 0.0}
    assert linear.transport_residual() < 1e-10


def test_cylinder_oracle_rejects_zero(cylinder):
    with pytest.raises(DegenerateSpectral):
        CylinderOracle(cylinder, 0.0)


def test_section_multiplier_matches_monodromy(cylinder, settings):
    oracle = CylinderOracle(cylinder, RHO)
    section = oracle.section()
    result = monodromy(oracle.connection(), cylinder.grid, cylinder.grid.x_min, settings)
    assert min(abs(h - section.meta["multiplier"]) for h in result.multipliers) < 1e-6


def test_harmonic_oracle(cylinder, settings):
    mu = 0.8 * np.exp(0.6j)
    oracle = CylinderHarmonicOracle(cylinder, mu)
    expected = [oracle.multiplier(1), oracle.multiplier(-1)]
    for section in oracle.sections():
        assert section.dimension == 2
        assert section.transport_residual() < 1e-10
    result = monodromy(HarmonicGaussN(cylinder, mu), cylinder.grid, 0.0, settings)
    for h in result.eigenvalues:
        assert min(abs(h - e) for e in expected) < 1e-6


def test_circle_family_at_zero(cylinder):
    alpha = circle_family(cylinder)(0.0)
    assert_allclose(alpha, np.broadcast_to([0.0, 0.0, 2.0, 0.0], alpha.shape), atol=1e-14)


def test_cylinder_gauge_factor(cylinder):
    rho0 = gauge_factor(cylinder)
    assert rho0 == pytest.approx(-0.25)
    assert to_parallel_gauge(to_formula_gauge(RHO, rho0), rho0) == pytest.approx(RHO)


def test_revolution_oracle_on_cylinder(cylinder):
    rho0 = gauge_factor(cylinder)
    oracle = RevolutionOracle(cylinder, to_formula_gauge(RHO, rho0))
    expected = cylinder_multipliers(RHO)
    for h in oracle.multipliers:
        assert min(abs(h - e) for e in expected) < 1e-12


def test_revolution_gauge_factor_fails_off_cmc(revolution):
    with pytest.raises(ValueError):
        gauge_factor(revolution)


@pytest.mark.parametrize("rho", [0.75, -1.0 + 0.5j, 2.0 - 1.0j])
def test_revolution_sections_are_parallel(revolution, rho):
    oracle = RevolutionOracle(revolution, rho)
    for sign in (1, -1):
        assert oracle.section(sign).transport_residual() < 1e-7


def test_revolution_multipliers_match_monodromy(revolution, settings):
    oracle = RevolutionOracle(revolution, -1.0 + 0.5j)
    result = monodromy(oracle.connection(), revolution.grid, revolution.grid.x_min, settings)
    for h in result.multipliers:
        assert min(abs(h - e) for e in oracle.multipliers) < 1e-6


def test_revolution_linear_branch(revolution):
    oracle = RevolutionOracle(revolution, -0.25)
    assert oracle.degenerate
    assert oracle.linear_section().transport_residual() < 1e-7
    with pytest.raises(ValueError):
        RevolutionOracle(revolution, 0.75).linear_section()


def test_revolution_closed_form_transform(revolution):
    oracle = RevolutionOracle(revolution, 0.75)
    result = oracle.darboux_closed_form()
    assert result.kind == "revolution"
    assert result.residuals["section_quotient"] < 1e-7
    profile = oracle.rotation_profile()
    assert profile.q_hat.shape == revolution.grid.xs.shape
    # the transform is again a rotation surface: |T_1| depends on x only
    T1 = result.T[..., 2] ** 2 + result.T[..., 3] ** 2
    assert_allclose(T1, np.broadcast_to(T1[:, :1], T1.shape), rtol=1e-10, atol=1e-12)


def test_revolution_oracle_needs_rotation_surface(grid):
    with pytest.raises(TypeError):
        RevolutionOracle(make_plane(grid), 0.5)
    assert revolution_resonances(3) == [0.75, 2.0]


@pytest.mark.parametrize("rho", [0.75, -1.0 + 0.5j])
def test_revolution_closed_form_matches_section_quotient(rho):
    f = make_revolution(example_profile(), DomainGrid.periodic(-0.8, 0.8, 64, 64))
    oracle = RevolutionOracle(f, rho)
    closed = oracle.darboux_closed_form().surface.values
    quotient = rho_darboux(f, christoffel_dual(f), oracle.section(), rho).surface.values
    assert_allclose(closed - closed[0, 0], quotient - quotient[0, 0], atol=1e-10)
