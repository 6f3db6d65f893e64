import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.connections.base import ConnectionKind
from quatsurf.connections.families import (
    ConformalGaussS,
    HarmonicGaussN,
    IsothermicRho,
    dual_model,
    isothermic_connection,
    omega_eval,
)
from quatsurf.connections.flatness import MIN_FLAT_ORDER, fit_order, flatness_check
from quatsurf.connections.monodromy import monodromy, resonance_points
from quatsurf.connections.sweep import (
    CSV_HEADER,
    SweepWindow,
    sweep_multipliers,
    write_sweep_csv,
)
from quatsurf.connections.transport import (
    TransportSettings,
    parallel_transport,
    transport_grid,
)
from quatsurf.core.spectral import spectral_point_from_rho
from quatsurf.errors import Blowup
from quatsurf.oracles.cylinder import CylinderOracle, cylinder_multipliers
from quatsurf.surfaces.grid import DomainGrid
from quatsurf.surfaces.immersion import make_cylinder

LEVELS = (8, 16, 32)
FLAT_LEVELS = (16, 32, 64)
RHO = 0.3 + 0.2j
POINTS = (RHO, -2.0 + 0.5j, 0.7 - 0.4j)


def gap(found, expected):
    return max(min(abs(h - e) for e in expected) for h in found)


def family_connection(f, family, rho):
    if family == "isothermic":
        return isothermic_connection(f, rho)
    mu = spectral_point_from_rho(rho)[0].mu
    return {"harmonic": HarmonicGaussN, "conformal": ConformalGaussS}[family](f, mu)


@pytest.mark.parametrize("rho", POINTS)
@pytest.mark.parametrize("family", ["isothermic", "harmonic", "conformal"])
def test_families_are_flat(cylinder, grid, family, rho):
    report = flatness_check(family_connection(cylinder, family, rho), grid, FLAT_LEVELS)
    assert report.passed
    assert report.fitted_order >= MIN_FLAT_ORDER
    assert [lv.n for lv in report.levels] == list(FLAT_LEVELS)


def test_formula_gauge_is_flat(revolution):
    conn = isothermic_connection(revolution, -2.0 + 0.5j, "isothermic_formula")
    assert flatness_check(conn, revolution.grid, LEVELS).passed


@pytest.mark.parametrize("family", [HarmonicGaussN, ConformalGaussS])
def test_cmc_families_are_flat_off_the_unit_circle(cylinder, grid, family):
    conn = family(cylinder, 1.3 * np.exp(0.7j))
    assert flatness_check(conn, grid, LEVELS).passed


def test_non_dual_gives_curved_connection(cylinder, grid):
    report = flatness_check(IsothermicRho(cylinder, cylinder, RHO), grid, LEVELS)
    assert not report.passed
    assert report.as_dict()["passed"] is False


def test_fit_order():
    hs = [0.1, 0.05, 0.025]
    assert fit_order(hs, [h**3 for h in hs]) == pytest.approx(3.0)
    assert math.isinf(fit_order(hs, [0.0, 0.0, 0.0]))


def test_unknown_gauge(cylinder):
    with pytest.raises(ValueError):
        dual_model(cylinder, "nearest")


def test_connection_metadata(cylinder):
    conn = isothermic_connection(cylinder, 0.5)
    assert conn.kind is ConnectionKind.ISOTHERMIC_RHO
    assert conn.is_quaternionic
    assert not isothermic_connection(cylinder, RHO).is_quaternionic
    assert conn.describe()["dimension"] == 4
    assert HarmonicGaussN(cylinder, np.exp(0.3j)).is_quaternionic
    omega = omega_eval(conn, (0.1, 0.2), 0)
    assert omega.shape == (4, 4)


def test_transport_reproduces_oracle(cylinder, settings):
    exact = CylinderOracle(cylinder, RHO).section()
    found = transport_grid(exact.connection, cylinder.grid, exact.values[0, 0], settings)
    scale = np.max(np.abs(exact.values))
    assert np.max(np.abs(found.values - exact.values)) / scale < 1e-8
    assert found.transport_residual() < 1e-3


def test_transported_residual_skips_the_seam(settings):
    residuals = []
    for n in (24, 48):
        f = make_cylinder(DomainGrid.periodic(-1.0, 1.0, n, n))
        exact = CylinderOracle(f, RHO).section()
        found = transport_grid(exact.connection, f.grid, exact.values[0, 0], settings)
        assert not found.periodic_in_y
        mask = found.residual_mask()
        assert not mask[:, :2].any() and not mask[:, -2:].any()
        # exact derivatives need no seam margin
        assert exact.residual_mask()[2:-2, 0].all()
        residuals.append(found.transport_residual())
    assert residuals[0] < 1e-3
    assert residuals[1] < residuals[0] / 8.0


def test_transport_step_doubling(cylinder):
    exact = CylinderOracle(cylinder, RHO).section()
    settings = TransportSettings(substeps=8, step_doubling=True, step_tolerance=1e-6)
    path = [(x, 0.0) for x in cylinder.grid.xs]
    values = parallel_transport(exact.connection, path, exact.values[0, 0], settings)
    assert_allclose(values, exact.values[:, 0], rtol=1e-7, atol=1e-9)


def test_transport_rejects_bad_input(cylinder):
    conn = isothermic_connection(cylinder, RHO)
    with pytest.raises(ValueError):
        parallel_transport(conn, [(0.0, 0.0), (1.0, 0.0)], np.zeros(4))
    with pytest.raises(ValueError):
        transport_grid(conn, cylinder.grid, np.ones(2))


def test_blowup_guard(cylinder):
    conn = isothermic_connection(cylinder, -400.0)
    settings = TransportSettings(substeps=16, blowup_guard=10.0)
    with pytest.raises(Blowup):
        transport_grid(conn, cylinder.grid, np.ones(4, dtype=complex), settings)


@pytest.mark.parametrize("rho", [RHO, -2.0 + 0.5j, 0.7 - 0.4j])
def test_monodromy_matches_closed_form(cylinder, settings, rho):
    result = monodromy(isothermic_connection(cylinder, rho), cylinder.grid, -1.0, settings)
    assert gap(result.multipliers, cylinder_multipliers(rho)) < 1e-6
    assert result.loop_residual < 1e-8
    assert not result.resonance


def test_monodromy_at_resonance(cylinder, settings):
    result = monodromy(isothermic_connection(cylinder, -3.0), cylinder.grid, 0.0, settings)
    assert result.resonance
    assert_allclose(result.multipliers, [-1.0, -1.0], atol=1e-6)
    assert resonance_points([result.multipliers, (1.0, -1.0)]) == [0]


def test_monodromy_eigen_sections(cylinder, settings):
    conn = isothermic_connection(cylinder, RHO)
    result = monodromy(conn, cylinder.grid, cylinder.grid.x_min, settings)
    h = result.eigenvalues[0]
    section = transport_grid(conn, cylinder.grid, result.eigen_section(0), settings)
    assert result.sections_for(h).shape[0] == 4
    assert section.values.shape == cylinder.grid.shape + (4,)


def test_monodromy_starts_at_x_min_by_default(cylinder, settings):
    conn = isothermic_connection(cylinder, RHO)
    result = monodromy(conn, cylinder.grid, settings=settings)
    assert result.x0 == cylinder.grid.x_min
    explicit = monodromy(conn, cylinder.grid, cylinder.grid.x_min, settings)
    assert_allclose(result.matrix, explicit.matrix, atol=1e-14)


def test_harmonic_monodromy_has_two_multipliers(cylinder, settings):
    result = monodromy(HarmonicGaussN(cylinder, 0.5 + 0.5j), cylinder.grid, 0.0, settings)
    assert len(result.eigenvalues) == 2
    assert result.matrix.shape == (2, 2)


def test_monodromy_needs_periodic_grid():
    grid = DomainGrid.rectangle(-1.0, 1.0, 0.0, 1.0, 16, 16)
    f = make_cylinder(DomainGrid.periodic(-1.0, 1.0, 16, 16))
    with pytest.raises(ValueError):
        monodromy(isothermic_connection(f, RHO), grid)


def test_sweep_window_points():
    window = SweepWindow(re_min=-1.0, re_max=1.0, n_re=3, im_min=0.0, im_max=1.0, n_im=2)
    assert window.points() == [complex(r, i) for r in (-1.0, 0.0, 1.0) for i in (0.0, 1.0)]
    assert SweepWindow(n_re=0).points() == []


@pytest.mark.asyncio
async def test_sweep_rows_follow_lattice_order(cylinder, settings):
    window = SweepWindow(re_min=-2.0, re_max=0.5, n_re=3, im_min=0.25, im_max=0.25, n_im=1)
    rows = await sweep_multipliers(cylinder, window, cylinder.grid, settings=settings, threads=2)
    assert [row.rho for row in rows] == window.points()
    for row in rows:
        assert gap((row.h1, row.h2), cylinder_multipliers(row.rho)) < 1e-6


@pytest.mark.asyncio
async def test_empty_sweep(cylinder, tmp_path):
    rows = await sweep_multipliers(cylinder, SweepWindow(n_im=0), cylinder.grid)
    assert rows == []
    path = write_sweep_csv(rows, tmp_path / "sweep.csv")
    assert path.read_text().splitlines() == [",".join(CSV_HEADER)]
