import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.connections.transport import SectionField
from quatsurf.core.quaternion import qnorm
from quatsurf.errors import DegenerateSpectral, SingularEverywhere
from quatsurf.oracles.cylinder import CylinderHarmonicOracle, CylinderOracle
from quatsurf.surfaces.grid import DomainGrid
from quatsurf.surfaces.immersion import make_cylinder, parallel_surface
from quatsurf.transforms.correspondence import (
    conformal_from_harmonic,
    decompose_rho_section,
    isothermic_from_harmonic,
)
from quatsurf.transforms.darboux import (
    classical_darboux_riccati,
    cw_darboux,
    dual_darboux,
    g_mu_darboux,
    g_mu_residual,
    mu_darboux,
    rho_darboux,
)

RHO = 0.3 + 0.2j
MU = np.exp(0.8j)


@pytest.fixture
def parallel(cylinder):
    return parallel_surface(cylinder)


@pytest.fixture
def phi(cylinder):
    return CylinderOracle(cylinder, RHO).section()


@pytest.fixture
def harmonic(cylinder):
    return CylinderHarmonicOracle(cylinder, MU).section()


@pytest.fixture
def mixed(cylinder, phi):
    return phi + CylinderOracle(cylinder, RHO).section(-1, 1)


def test_rho_darboux_residuals(cylinder, parallel, phi):
    result = rho_darboux(cylinder, parallel, phi, RHO)
    assert result.kind == "rho"
    assert result.residuals["riccati"] < 1e-10
    assert result.residuals["parallel"] < 1e-10
    assert result.residuals["wedge"] < 1e-8
    assert_allclose(result.values, cylinder.values + result.T)
    report = result.as_dict()
    assert set(report) >= {"kind", "residuals", "singular_nodes"}


def test_cmc_condition_holds_for_single_sections_only(cylinder, parallel, phi, mixed):
    assert rho_darboux(cylinder, parallel, phi, RHO, cmc=True).max_cmc_residual() < 1e-8
    assert rho_darboux(cylinder, parallel, mixed, RHO, cmc=True).max_cmc_residual() > 1e-2


def test_dual_transform_matches_tracked_dual(cylinder, parallel, phi):
    result = rho_darboux(cylinder, parallel, phi, RHO)
    dual = dual_darboux(cylinder, parallel, phi, RHO)
    assert dual.kind == "dual"
    assert_allclose(dual.translated_to(result.dual.values), result.dual.values, atol=1e-10)


def test_rho_darboux_rejects_degenerate_input(cylinder, parallel, phi):
    with pytest.raises(DegenerateSpectral):
        rho_darboux(cylinder, parallel, phi, 0.0)
    quats = phi.quaternions().copy()
    quats[..., 1, :] = 0.0
    flat = SectionField.from_quaternions(cylinder.grid, quats)
    with pytest.raises(SingularEverywhere):
        rho_darboux(cylinder, parallel, flat, RHO)


def test_mu_darboux_is_cmc(cylinder, harmonic):
    result = mu_darboux(cylinder, harmonic, MU)
    assert result.kind == "mu"
    assert result.spectral.mu == pytest.approx(MU)
    assert result.max_cmc_residual() < 1e-6
    assert result.residuals["riccati"] < 1e-10


def test_mu_darboux_mean_curvature_on_finer_grid():
    f = make_cylinder(DomainGrid.periodic(-1.0, 1.0, 48, 48))
    result = mu_darboux(f, CylinderHarmonicOracle(f, MU).section(), MU)
    assert result.residuals["mean_curvature"] < 1e-4


def test_mu_darboux_parallel_surface(cylinder, harmonic):
    result = mu_darboux(cylinder, harmonic, MU)
    g_mu = g_mu_darboux(cylinder, harmonic, MU)
    assert g_mu_residual(g_mu, result) < 1e-6


@pytest.mark.parametrize("mu", [1.0, 0.0])
def test_mu_darboux_degenerate(cylinder, harmonic, mu):
    with pytest.raises(DegenerateSpectral):
        mu_darboux(cylinder, harmonic, mu)


def test_cw_darboux_of_mu_section_is_cmc(cylinder, harmonic):
    section = conformal_from_harmonic(cylinder, harmonic, MU, np.zeros(4))
    result = cw_darboux(cylinder, section, MU)
    assert result.kind == "cw"
    assert result.max_cmc_residual() < 1e-8
    assert result.residuals["harmonic"] < 1e-8


def test_cw_darboux_with_offset(cylinder, harmonic):
    n = np.array([0.5, 0.0, 1.0, 0.0])
    section = conformal_from_harmonic(cylinder, harmonic, MU, n)
    result = cw_darboux(cylinder, section, MU)
    assert result.residuals["offset_spread"] < 1e-12
    assert result.residuals["harmonic"] < 1e-8
    assert result.residuals["parallel"] < 1e-8
    # only n = 0 gives a mu-Darboux transform
    assert result.max_cmc_residual() > 1e-2


def test_classical_darboux(cylinder, parallel, settings):
    T0 = (0.0, 0.2, 0.0, 0.0)
    result = classical_darboux_riccati(cylinder, parallel, 0.04, T0, settings, cmc=True)
    assert result.kind == "classical"
    assert_allclose(result.T[0, 0], T0)
    assert result.residuals["riccati"] < 1e-3
    assert result.residuals["wedge"] < 1e-8
    assert np.all(np.isfinite(qnorm(result.values)))


def test_classical_darboux_residual_converges(settings):
    residuals = []
    for n in (24, 48):
        f = make_cylinder(DomainGrid.periodic(-1.0, 1.0, n, n))
        result = classical_darboux_riccati(
            f, parallel_surface(f), 0.04, (0.0, 0.2, 0.0, 0.0), settings
        )
        residuals.append(result.residuals["riccati"])
    assert residuals[0] < 1e-3
    assert residuals[1] < residuals[0] / 4.0


def test_classical_darboux_rejects_trivial_input(cylinder, parallel):
    with pytest.raises(ValueError):
        classical_darboux_riccati(cylinder, parallel, 0.0, (0.0, 1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        classical_darboux_riccati(cylinder, parallel, 0.5, (0.0, 0.0, 0.0, 0.0))


def test_isothermic_lift_of_harmonic_section(cylinder, harmonic):
    lifted = isothermic_from_harmonic(cylinder, harmonic, MU)
    assert lifted.dimension == 4
    assert_allclose(lifted.alpha, harmonic.alpha)
    assert lifted.transport_residual() < 1e-8


def test_decomposition_into_harmonic_parts(cylinder, mixed):
    plus, minus = decompose_rho_section(cylinder, mixed, RHO)
    assert_allclose(plus.alpha + minus.alpha, mixed.alpha, atol=1e-12)
    scale = np.max(qnorm(mixed.alpha))
    assert np.max(qnorm(plus.alpha)) > 1e-3 * scale
    assert np.max(qnorm(minus.alpha)) > 1e-3 * scale
    assert plus.transport_residual() < 1e-8
    assert minus.transport_residual() < 1e-8


def test_decomposition_needs_nonzero_b(cylinder, phi):
    with pytest.raises(DegenerateSpectral):
        decompose_rho_section(cylinder, phi, 1.0)
