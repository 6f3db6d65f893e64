"""Surfaces, duals and parallel sections built from a run config."""

import logging
from typing import Any, List

import numpy as np

from ..connections.families import HarmonicGaussN, isothermic_connection
from ..connections.monodromy import monodromy
from ..connections.transport import SectionField, transport_grid
from ..core.quaternion import to_vector
from ..errors import ConfigInvalid
from ..io.config import RunConfig, SectionConfig, SurfaceConfig
from ..oracles.cylinder import CylinderHarmonicOracle, CylinderOracle
from ..oracles.revolution import RevolutionOracle
from ..surfaces.immersion import (
    ImmersionField,
    christoffel_dual,
    make_cylinder,
    make_plane,
    make_revolution,
    make_sphere,
    parallel_surface,
)
from ..surfaces.models import RevolutionModel
from ..surfaces.profile import ProfileCurve, example_profile

logger = logging.getLogger(__name__)

ConfigPath = List[Any]


def build_surface(cfg: SurfaceConfig) -> ImmersionField:
    grid = cfg.grid
    if cfg.kind == "cylinder":
        return make_cylinder(grid)
    if cfg.kind == "sphere":
        return make_sphere(grid)
    if cfg.kind == "plane":
        return make_plane(grid)
    if cfg.profile is None:
        return make_revolution(example_profile(), grid)
    profile = ProfileCurve.from_strings(cfg.profile.p, cfg.profile.q)
    return make_revolution(profile, grid)


def dual_surface(f: ImmersionField, gauge: str) -> ImmersionField:
    """The dual matching ``gauge``: g = f + N or the Christoffel dual."""
    if gauge == "parallel_cmc":
        return parallel_surface(f)
    return christoffel_dual(f)


def _is_cylinder(config: RunConfig) -> bool:
    return config.surface.kind == "cylinder"


def _transported(
    conn, f: ImmersionField, sec: SectionConfig, config: RunConfig, where: ConfigPath
) -> SectionField:
    grid = f.grid
    settings = config.transport
    if sec.source == "initial":
        quats = np.asarray(sec.initial, dtype=float)
        if 2 * len(quats) != conn.dimension:
            raise ConfigInvalid(
                f"initial value needs {conn.dimension // 2} quaternion(s)", where + ["initial"]
            )
        return transport_grid(conn, grid, to_vector(quats), settings)
    if not grid.periodic_y:
        raise ConfigInvalid("monodromy sections need a grid periodic in y", where + ["source"])
    result = monodromy(conn, grid, grid.x_min, settings)
    if sec.index >= conn.dimension:
        raise ConfigInvalid(f"eigenvector index must be below {conn.dimension}", where + ["index"])
    logger.info("section from monodromy eigenvalue %s", result.eigenvalues[sec.index])
    return transport_grid(conn, grid, result.eigen_section(sec.index), settings)


def isothermic_section(
    f: ImmersionField, rho: complex, sec: SectionConfig, config: RunConfig, where: ConfigPath
) -> SectionField:
    """A d_rho-parallel section in the configured dual gauge."""
    gauge = config.dual_gauge
    if sec.source != "oracle":
        return _transported(isothermic_connection(f, rho, gauge), f, sec, config, where)
    if gauge == "parallel_cmc" and _is_cylinder(config):
        return CylinderOracle(f, rho).section(sec.sign, sec.second_sign)
    if gauge == "isothermic_formula" and isinstance(f.model, RevolutionModel):
        return RevolutionOracle(f, rho).section(sec.sign)
    raise ConfigInvalid(
        f"no closed-form section for a {config.surface.kind} surface in the {gauge} gauge",
        where + ["source"],
    )


def harmonic_section(
    f: ImmersionField, mu: complex, sec: SectionConfig, config: RunConfig, where: ConfigPath
) -> SectionField:
    """A d^N_mu-parallel section."""
    if sec.source != "oracle":
        return _transported(HarmonicGaussN(f, mu), f, sec, config, where)
    if not _is_cylinder(config):
        raise ConfigInvalid(
            "closed-form harmonic sections exist for the cylinder only", where + ["source"]
        )
    return CylinderHarmonicOracle(f, mu).section(sec.sign)
