import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.connections.transport import SectionField
from quatsurf.errors import DegenerateSpectral, NotIndependent
from quatsurf.oracles.cylinder import CylinderHarmonicOracle, CylinderOracle
from quatsurf.surfaces.immersion import parallel_surface
from quatsurf.transforms.bianchi import bianchi_common
from quatsurf.transforms.darboux import g_mu_darboux
from quatsurf.transforms.dressing import cmc_sfd, cw_sfd, sfd_isothermic, sfd_two_step

RHO1 = 0.3 + 0.2j
RHO2 = -2.0 + 0.5j
MU = np.exp(0.8j)


@pytest.fixture
def parallel(cylinder):
    return parallel_surface(cylinder)


def values_only(section):
    return SectionField(section.grid, section.values, section.connection)


def test_common_transform(cylinder, parallel):
    phi1 = CylinderOracle(cylinder, RHO1).section()
    phi2 = CylinderOracle(cylinder, RHO2).section()
    result = bianchi_common(cylinder, parallel, phi1, RHO1, phi2, RHO2)
    assert result.kind == "bianchi"
    assert result.residuals["frames"] < 1e-10
    assert result.residuals["symmetry"] < 1e-8
    assert result.residuals["parallel_f1"] < 1e-3
    assert result.dual is not None


def test_common_transform_parallel_check_with_differenced_sections(cylinder, parallel):
    phi1 = CylinderOracle(cylinder, RHO1).section()
    phi2 = CylinderOracle(cylinder, RHO2).section()
    exact = bianchi_common(cylinder, parallel, phi1, RHO1, phi2, RHO2)
    differenced = bianchi_common(
        cylinder, parallel, values_only(phi1), RHO1, values_only(phi2), RHO2
    )
    assert exact.residuals["parallel_f1"] < 1e-8
    assert differenced.residuals["parallel_f1"] < 1e-1
    assert_allclose(differenced.values, exact.values)


def test_common_transform_needs_independent_sections(cylinder, parallel):
    phi = CylinderOracle(cylinder, RHO1).section()
    with pytest.raises(NotIndependent) as info:
        bianchi_common(cylinder, parallel, phi, RHO1, phi, RHO1)
    assert info.value.nodes


def test_simple_factor_dressing(cylinder, parallel):
    phi = CylinderOracle(cylinder, RHO1).section()
    result = sfd_isothermic(cylinder, parallel, phi, RHO1)
    assert result.checks["anchor"] < 1e-10
    assert result.checks["darboux_gap"] < 1e-6
    assert result.checks["gauge"] < 1e-6
    assert result.matrix.kind == "E"
    assert result.as_dict()["rho"] == [RHO1.real, RHO1.imag]


def test_dressing_matrix_is_identity_at_zero(cylinder, parallel):
    phi = CylinderOracle(cylinder, RHO1).section()
    matrix = sfd_isothermic(cylinder, parallel, phi, RHO1).matrix
    assert_allclose(matrix(0.0)[3, 5], np.eye(4), atol=1e-10)


def test_two_step_dressing_is_trivial_for_real_rho(cylinder):
    oracle = CylinderOracle(cylinder, 0.5)
    phi1, phi2 = oracle.sections()[:2]
    assert sfd_two_step(cylinder, phi1, phi2, 0.5) is cylinder


def test_cmc_dressing_matches_parallel_offset(cylinder):
    alpha = CylinderHarmonicOracle(cylinder, MU).section()
    dressed = cmc_sfd(cylinder, alpha, MU)
    assert_allclose(dressed.values, g_mu_darboux(cylinder, alpha, MU).values)
    with pytest.raises(DegenerateSpectral):
        cmc_sfd(cylinder, alpha, 1.0)


@pytest.mark.parametrize("mu", [MU, 7.0 - 4.0 * np.sqrt(3.0)])
def test_conformal_gauss_dressing(cylinder, mu):
    alpha = CylinderHarmonicOracle(cylinder, mu).section()
    dressed = cw_sfd(cylinder, alpha, mu)
    assert dressed.values.shape == cylinder.values.shape
    # agrees with the CMC dressing up to translation
    cmc = cmc_sfd(cylinder, alpha, mu).values
    assert_allclose(dressed.values - dressed.values[0, 0], cmc - cmc[0, 0], atol=1e-6)
    with pytest.raises(DegenerateSpectral):
        cw_sfd(cylinder, alpha, 1.0)
