"""Subcommand implementations: surface export, transform pipeline, sweep, invariants."""

import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..connections.sweep import sweep_multipliers, write_sweep_csv
from ..core.spectral import spectral_point_from_rho
from ..errors import ConfigInvalid
from ..io.config import RunConfig, SectionConfig, TransformStep, config_digest
from ..io.diagnostics import write_json
from ..io.mesh import mesh_from_field, write_obj, write_ply
from ..oracles.revolution import RevolutionOracle
from ..surfaces.immersion import ImmersionField, gauss_residuals, parallel_surface
from ..surfaces.models import RevolutionModel
from ..transforms.associated import lawson
from ..transforms.bianchi import bianchi_common
from ..transforms.correspondence import conformal_from_harmonic
from ..transforms.darboux import (
    classical_darboux_riccati,
    cw_darboux,
    dual_darboux,
    mu_darboux,
    rho_darboux,
)
from ..transforms.dressing import cmc_sfd, cw_sfd, sfd_isothermic
from .builders import (
    ConfigPath,
    build_surface,
    dual_surface,
    harmonic_section,
    isothermic_section,
)
from .invariants import run_invariants

logger = logging.getLogger(__name__)


@dataclass
class StepOutput:
    """Surface, diagnostics and mesh options produced by one pipeline step."""

    surface: ImmersionField
    diagnostics: Dict[str, Any]
    singular: Optional[np.ndarray] = None
    projection: Optional[str] = None
    radius: Optional[float] = None


def _darboux(result) -> StepOutput:
    return StepOutput(result.surface, result.as_dict(), result.singular)


def run_step(
    f: ImmersionField, step: TransformStep, config: RunConfig, where: ConfigPath
) -> StepOutput:
    """Apply one pipeline step to ``f``."""
    kind = step.kind
    value = step.value()
    section_at = where + ["section"]
    if kind in ("rho", "dual", "sfd"):
        dual = dual_surface(f, config.dual_gauge)
        phi = isothermic_section(f, value, step.section, config, section_at)
        if kind == "rho":
            return _darboux(rho_darboux(f, dual, phi, value, cmc=step.cmc))
        if kind == "dual":
            return _darboux(dual_darboux(f, dual, phi, value))
        dressed = sfd_isothermic(f, dual, phi, value)
        return StepOutput(dressed.surface, dressed.as_dict())
    if kind == "classical":
        if abs(value.imag) > 0:
            raise ConfigInvalid("classical steps need a real spectral value", where + ["spectral"])
        dual = dual_surface(f, config.dual_gauge)
        result = classical_darboux_riccati(
            f, dual, value.real, step.T0, config.transport, cmc=step.cmc
        )
        return _darboux(result)
    if kind == "bianchi":
        dual = dual_surface(f, config.dual_gauge)
        rho2 = step.second_value()
        phi1 = isothermic_section(f, value, step.section, config, section_at)
        phi2 = isothermic_section(
            f, rho2, step.second_section or SectionConfig(), config, where + ["second_section"]
        )
        return _darboux(bianchi_common(f, dual, phi1, value, phi2, rho2, cmc=step.cmc))
    if kind == "revolution":
        if not isinstance(f.model, RevolutionModel):
            raise ConfigInvalid("revolution steps need a surface of revolution", where + ["kind"])
        return _darboux(RevolutionOracle(f, value).darboux_closed_form(step.section.sign))
    if kind == "lawson":
        if abs(value.imag) > 0 or not 0.0 < value.real < 1.0:
            raise ConfigInvalid("lawson steps need r in (0, 1)", where + ["spectral"])
        plus, minus = spectral_point_from_rho(value.real)
        alpha_plus = harmonic_section(f, plus.mu, step.section, config, section_at)
        alpha_minus = harmonic_section(
            f, minus.mu, step.second_section or step.section, config, where + ["second_section"]
        )
        member = lawson(f, alpha_plus, alpha_minus, value.real)
        return StepOutput(
            member.surface, member.as_dict(), member.singular, "stereographic", member.radius
        )
    alpha = harmonic_section(f, value, step.section, config, section_at)
    if kind == "mu":
        return _darboux(mu_darboux(f, alpha, value))
    if kind == "cw":
        phi = conformal_from_harmonic(f, alpha, value, (1.0, 0.0, 0.0, 0.0))
        return _darboux(cw_darboux(f, phi, value))
    if kind == "sfd_mu":
        surface = cmc_sfd(f, alpha, value)
    else:
        surface = cw_sfd(f, alpha, value)
    return StepOutput(surface, {"kind": kind})


def _write_mesh(
    surface: ImmersionField,
    out: Path,
    stem: str,
    config: RunConfig,
    header: Dict[str, str],
    projection: Optional[str] = None,
    singular: Optional[np.ndarray] = None,
    radius: Optional[float] = None,
) -> List[Path]:
    mesh = mesh_from_field(
        surface, projection or config.output.projection, singular, header, radius
    )
    written = []
    if "obj" in config.output.formats:
        written.append(write_obj(mesh, out / f"{stem}.obj"))
    if "ply" in config.output.formats:
        written.append(write_ply(mesh, out / f"{stem}.ply"))
    return written


def cmd_surface(config: RunConfig, out: Path, threads: Optional[int] = None) -> List[Path]:
    """Export the configured surface and the requested derived surfaces.

    Raises:
        RoundSphere: a dual or parallel surface of a round sphere was requested
    """
    f = build_surface(config.surface)
    header = {"config_sha256": config_digest(config), "kind": config.surface.kind}
    written = _write_mesh(f, out, "surface", config, header)
    diagnostics: Dict[str, Any] = {"surface": f.name, "gauss": gauss_residuals(f)}
    for derived in config.surface.derived:
        if derived == "dual":
            g = dual_surface(f, config.dual_gauge)
        else:
            g = parallel_surface(f)
        written += _write_mesh(g, out, derived, config, {**header, "derived": derived})
        diagnostics[derived] = {"surface": g.name}
    written.append(write_json(diagnostics, out / config.output.diagnostics))
    logger.info("surface export wrote %d files to %s", len(written), out)
    return written


def cmd_darboux(config: RunConfig, out: Path, threads: Optional[int] = None) -> List[Path]:
    """Run the transform pipeline; one mesh per step plus a JSON report."""
    f = build_surface(config.surface)
    digest = config_digest(config)
    written: List[Path] = []
    steps = []
    for k, step in enumerate(config.pipeline):
        output = run_step(f, step, config, ["pipeline", k])
        value = step.value()
        stem = step.name or f"step{k:02d}_{step.kind}"
        header = {
            "config_sha256": digest,
            "step": step.kind,
            "spectral": f"{value.real!r} {value.imag!r}",
        }
        written += _write_mesh(
            output.surface, out, stem, config, header,
            step.projection or output.projection, output.singular, output.radius,
        )
        steps.append({"index": k, "name": stem, "spectral": value, **output.diagnostics})
        logger.info("step %d (%s) done", k, step.kind)
    report = {"config_sha256": digest, "steps": steps}
    written.append(write_json(report, out / config.output.diagnostics))
    return written


def cmd_sweep(config: RunConfig, out: Path, threads: Optional[int] = None) -> List[Path]:
    """Multiplier map over the configured rho window, written as CSV."""
    f = build_surface(config.surface)
    grid = f.grid
    if not grid.periodic_y and config.sweep.points():
        raise ConfigInvalid("sweeps need a grid periodic in y", ["surface", "grid", "periodic_y"])
    rows = asyncio.run(
        sweep_multipliers(
            f, config.sweep, grid, config.dual_gauge, grid.x_min, config.transport, threads
        )
    )
    return [write_sweep_csv(rows, out / config.output.sweep_csv)]


def cmd_invariants(config: RunConfig, out: Path, threads: Optional[int] = None) -> List[Path]:
    report = run_invariants(config)
    return [write_json(report, out / config.output.invariants)]


COMMANDS: Dict[str, Callable[[RunConfig, Path, Optional[int]], Sequence[Path]]] = {
    "surface": cmd_surface,
    "darboux": cmd_darboux,
    "sweep": cmd_sweep,
    "invariants": cmd_invariants,
}
