"""Parallel transport by classical fourth-order Runge-Kutta.

Every edge is split into a fixed number of substeps. Generators for all
stage points of an edge are evaluated in one vectorized call, and batches
of independent edges (grid columns, plaquettes) are integrated together.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.quaternion import from_vector, right_j, to_vector
from ..errors import Blowup, StepTooCoarse
from ..surfaces.differences import diff_x, diff_y
from ..surfaces.grid import DomainGrid
from .base import Connection

logger = logging.getLogger(__name__)


class TransportSettings(BaseModel):
    """Integrator settings shared by transport, monodromy and Riccati passes."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    substeps: int = Field(64, ge=1, description="RK4 substeps per grid edge")
    step_doubling: bool = Field(
        False, description="Repeat each transport with half the substeps and compare"
    )
    step_tolerance: float = Field(1e-8, gt=0, description="Relative step-doubling tolerance")
    blowup_guard: float = Field(1e12, gt=0, description="Abort when a norm exceeds this value")
    singular_threshold: float = Field(
        1e-8, gt=0, description="Relative threshold for flagging singular nodes"
    )


DEFAULT_SETTINGS = TransportSettings()

PERIODIC_TOL = 1e-12


def rk4_segments(
    conn: Connection,
    starts: np.ndarray,
    ends: np.ndarray,
    phi: np.ndarray,
    substeps: int,
) -> np.ndarray:
    """Transport ``phi`` along a batch of straight segments.

    Args:
        conn: Connection to integrate
        starts: Segment start points, shape (B, 2)
        ends: Segment end points, shape (B, 2)
        phi: Initial values, shape (B, dim) or (B, dim, m)
        substeps: RK4 steps per segment

    Returns:
        Values at the segment ends, same shape as ``phi``
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    delta = ends - starts
    vector = phi.ndim == 2
    state = phi[..., None] if vector else phi
    state = state.astype(complex)
    h = 1.0 / substeps
    s = np.linspace(0.0, 1.0, 2 * substeps + 1)
    px = starts[:, 0, None] + s[None, :] * delta[:, 0, None]
    py = starts[:, 1, None] + s[None, :] * delta[:, 1, None]
    gens = (
        delta[:, 0, None, None, None] * conn.generator(px, py, 0)
        + delta[:, 1, None, None, None] * conn.generator(px, py, 1)
    )
    for k in range(substeps):
        a0 = gens[:, 2 * k]
        am = gens[:, 2 * k + 1]
        a1 = gens[:, 2 * k + 2]
        k1 = a0 @ state
        k2 = am @ (state + 0.5 * h * k1)
        k3 = am @ (state + 0.5 * h * k2)
        k4 = a1 @ (state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state[..., 0] if vector else state


def _guard(values: np.ndarray, settings: TransportSettings, node) -> None:
    if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > settings.blowup_guard:
        raise Blowup("parallel transport exceeded the overflow guard", last_good_node=node)


def _step_doubling(
    conn: Connection, starts, ends, phi, settings: TransportSettings, full: np.ndarray
) -> None:
    if not settings.step_doubling or settings.substeps < 2:
        return
    coarse = rk4_segments(conn, starts, ends, phi, settings.substeps // 2)
    scale = max(float(np.max(np.abs(full))), 1.0)
    estimate = float(np.max(np.abs(full - coarse))) / (15.0 * scale)
    if estimate > settings.step_tolerance:
        raise StepTooCoarse("transport substeps too coarse for this edge", estimate)


def parallel_transport(
    conn: Connection,
    path: Sequence[Tuple[float, float]],
    initial: np.ndarray,
    settings: TransportSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Transport ``initial`` along a polyline.

    Args:
        conn: Connection
        path: Polyline vertices (x, y), at least two
        initial: Value at the first vertex, shape (dim,) or (dim, m)

    Returns:
        Values at every vertex, shape (len(path),) + initial.shape

    Raises:
        StepTooCoarse: step doubling is enabled and its estimate exceeds tolerance
        Blowup: values exceed the overflow guard
    """
    pts = np.asarray(path, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValueError("path needs at least two (x, y) vertices")
    phi = np.asarray(initial, dtype=complex)
    if not np.any(phi):
        raise ValueError("initial value of a parallel section must be nonzero")
    out = [phi]
    for n in range(len(pts) - 1):
        start, end = pts[n : n + 1], pts[n + 1 : n + 2]
        nxt = rk4_segments(conn, start, end, out[-1][None], settings.substeps)
        _step_doubling(conn, start, end, out[-1][None], settings, nxt)
        _guard(nxt, settings, (n,))
        out.append(nxt[0])
    return np.stack(out)


@dataclass(frozen=True)
class SectionField:
    """Section of C^dim sampled on grid nodes.

    ``dx`` and ``dy`` hold exact node derivatives when the section comes
    from a closed form; otherwise finite differences are used.
    """

    grid: DomainGrid
    values: np.ndarray
    connection: Optional[Connection] = None
    dx: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.values.shape[:2] != self.grid.shape:
            raise ValueError("section values must have the grid shape as leading axes")
        if not np.any(self.values):
            raise ValueError("trivial section")

    @classmethod
    def from_quaternions(
        cls,
        grid: DomainGrid,
        quats: np.ndarray,
        connection: Optional[Connection] = None,
        dx: Optional[np.ndarray] = None,
        dy: Optional[np.ndarray] = None,
        **meta,
    ) -> "SectionField":
        """Build from quaternion components of shape (nx, ny, m, 4)."""
        return cls(
            grid=grid,
            values=to_vector(quats),
            connection=connection,
            dx=None if dx is None else to_vector(dx),
            dy=None if dy is None else to_vector(dy),
            meta=meta,
        )

    @property
    def dimension(self) -> int:
        return int(self.values.shape[-1])

    def quaternions(self) -> np.ndarray:
        """H^m view, shape (nx, ny, m, 4)."""
        return from_vector(self.values)

    def component(self, index: int) -> np.ndarray:
        return self.quaternions()[..., index, :]

    @property
    def alpha(self) -> np.ndarray:
        return self.component(0)

    @property
    def beta(self) -> np.ndarray:
        if self.dimension < 4:
            raise ValueError("C^2 sections have no second quaternion component")
        return self.component(1)

    @property
    def has_multiplier(self) -> bool:
        return self.meta.get("multiplier") is not None

    @property
    def periodic_in_y(self) -> bool:
        """True when the values repeat across the y seam (multiplier 1)."""
        h = self.meta.get("multiplier")
        return self.grid.periodic_y and h is not None and abs(h - 1.0) < PERIODIC_TOL

    def residual_mask(self, margin: int = 2) -> np.ndarray:
        """Nodes where the derivatives are fourth-order accurate."""
        seam = self.dy is None and not self.periodic_in_y
        return self.grid.interior_mask(margin, seam=seam)

    def derivatives(self) -> Tuple[np.ndarray, np.ndarray]:
        """Exact node derivatives when known, else finite differences.

        Sections with multiplier h != 1 jump by h across the seam and are
        differenced with the non-periodic stencil.
        """
        gx = self.dx if self.dx is not None else diff_x(self.values, self.grid.hx)
        gy = (
            self.dy
            if self.dy is not None
            else diff_y(self.values, self.grid.hy, self.periodic_in_y)
        )
        return gx, gy

    def quaternion_derivatives(self) -> Tuple[np.ndarray, np.ndarray]:
        gx, gy = self.derivatives()
        return from_vector(gx), from_vector(gy)

    def transport_residual(self, connection: Optional[Connection] = None) -> float:
        """max over interior nodes of |d phi - A phi| (relative to max |phi|)."""
        conn = connection or self.connection
        if conn is None:
            raise ValueError("section has no connection to check against")
        X, Y = self.grid.mesh()
        mask = self.residual_mask()
        gx, gy = self.derivatives()
        worst = 0.0
        for direction, g in ((0, gx), (1, gy)):
            A = conn.generator(X, Y, direction)
            res = np.abs(g - np.einsum("...ij,...j->...i", A, self.values)).max(axis=-1)
            worst = max(worst, float(np.max(res[mask])))
        return worst / max(float(np.max(np.abs(self.values))), 1e-300)

    def scaled(self, c: complex) -> "SectionField":
        """Right multiplication by a complex number."""
        return SectionField(
            self.grid,
            self.values * c,
            self.connection,
            None if self.dx is None else self.dx * c,
            None if self.dy is None else self.dy * c,
            dict(self.meta),
        )

    def __add__(self, other: "SectionField") -> "SectionField":
        exact = self.dx is not None and other.dx is not None
        return SectionField(
            self.grid,
            self.values + other.values,
            self.connection,
            self.dx + other.dx if exact else None,
            self.dy + other.dy if exact else None,
        )

    def right_j(self) -> "SectionField":
        """phi j; parallel again when the connection is quaternionic."""
        def conv(v):
            return None if v is None else to_vector(right_j(from_vector(v)))

        return SectionField(
            self.grid, conv(self.values), self.connection, conv(self.dx), conv(self.dy)
        )


def transport_grid(
    conn: Connection,
    grid: DomainGrid,
    initial: np.ndarray,
    settings: TransportSettings = DEFAULT_SETTINGS,
) -> SectionField:
    """Parallel section through every node, started at (x_min, y_min).

    The x-axis row at y_min is integrated first, then all columns are
    integrated in y together.
    """
    phi0 = np.asarray(initial, dtype=complex)
    if phi0.shape != (conn.dimension,):
        raise ValueError(f"initial value needs shape ({conn.dimension},)")
    xs, ys = grid.xs, grid.ys
    row = parallel_transport(conn, [(x, ys[0]) for x in xs], phi0, settings)
    values = np.empty(grid.shape + (conn.dimension,), dtype=complex)
    values[:, 0] = row
    starts = np.stack([xs, np.full_like(xs, ys[0])], axis=-1)
    state = row
    for j in range(1, grid.ny):
        ends = np.stack([xs, np.full_like(xs, ys[j])], axis=-1)
        nxt = rk4_segments(conn, starts, ends, state, settings.substeps)
        _step_doubling(conn, starts, ends, state, settings, nxt)
        _guard(nxt, settings, (0, j - 1))
        values[:, j] = nxt
        state, starts = nxt, ends
    logger.debug("transported %s section over %dx%d grid", conn.kind.value, grid.nx, grid.ny)
    return SectionField(grid=grid, values=values, connection=conn)
