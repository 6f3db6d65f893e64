"""Plaquette holonomy study of flatness under grid refinement."""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..surfaces.grid import DomainGrid
from .base import Connection
from .transport import rk4_segments

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = (16, 32, 64)
MIN_FLAT_ORDER = 2.0


@dataclass(frozen=True)
class FlatnessLevel:
    n: int
    h: float
    max_deviation: float


@dataclass(frozen=True)
class FlatnessReport:
    """Holonomy defect per refinement level and the fitted convergence order.

    The defect of a plaquette is |Hol - I| divided by its area, so a curved
    connection keeps a nonzero defect under refinement.
    """

    levels: List[FlatnessLevel]
    fitted_order: float

    @property
    def passed(self) -> bool:
        return self.fitted_order >= MIN_FLAT_ORDER

    def as_dict(self) -> dict:
        return {
            "levels": [
                {"n": lv.n, "h": lv.h, "max_deviation": lv.max_deviation} for lv in self.levels
            ],
            "fitted_order": self.fitted_order if math.isfinite(self.fitted_order) else "inf",
            "passed": self.passed,
        }


def plaquette_defect(conn: Connection, grid: DomainGrid) -> float:
    """Largest holonomy defect over all grid plaquettes (one RK4 step per edge)."""
    xs, ys = grid.xs, grid.ys
    X, Y = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
    x0, y0 = X.ravel(), Y.ravel()
    x1, y1 = x0 + grid.hx, y0 + grid.hy
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    dim = conn.dimension
    frame = np.broadcast_to(np.eye(dim, dtype=complex), (x0.size, dim, dim))
    state = frame.copy()
    for (ax, ay), (bx, by) in zip(corners[:-1], corners[1:]):
        state = rk4_segments(conn, np.stack([ax, ay], -1), np.stack([bx, by], -1), state, 1)
    deviation = np.abs(state - frame).max(axis=(-2, -1)) / (grid.hx * grid.hy)
    return float(np.max(deviation))


def fit_order(hs: Sequence[float], deviations: Sequence[float]) -> float:
    """Least-squares slope of log(deviation) against log(h).

    Exactly vanishing deviations give an infinite order.
    """
    devs = np.asarray(deviations, dtype=float)
    if np.all(devs == 0.0):
        return math.inf
    devs = np.maximum(devs, np.finfo(float).tiny)
    slope, _ = np.polyfit(np.log(np.asarray(hs, dtype=float)), np.log(devs), 1)
    return float(slope)


def flatness_check(
    conn: Connection, grid: DomainGrid, levels: Sequence[int] = DEFAULT_LEVELS
) -> FlatnessReport:
    """Refinement study of plaquette holonomies on the domain of ``grid``."""
    results = []
    for n in levels:
        g = grid.refined(n, n)
        dev = plaquette_defect(conn, g)
        logger.debug("flatness level n=%d defect %.3e", n, dev)
        results.append(FlatnessLevel(n=n, h=max(g.hx, g.hy), max_deviation=dev))
    order = fit_order([lv.h for lv in results], [lv.max_deviation for lv in results])
    logger.info("flatness of %s: fitted order %.2f", conn.kind.value, order)
    return FlatnessReport(levels=results, fitted_order=order)
