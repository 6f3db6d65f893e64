"""Sampled conformal immersions and their Gauss data.

An :class:`ImmersionField` pairs a grid with a :class:`SurfaceModel` and
caches node values and partials. Everything downstream (connections,
transforms, mesh export) consumes immersion fields.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import cumulative_trapezoid

from ..errors import DegenerateImmersion, NotClosed, RoundSphere
from ..core.quaternion import qdot, qimag, qinv, qmul, qmul_chain, qnorm, qreal
from .differences import diff_x, diff_y
from .grid import DomainGrid
from .models import (
    ChristoffelDualModel,
    ParallelModel,
    PlaneModel,
    RevolutionModel,
    SampledModel,
    SurfaceModel,
    mean_curvature_from,
)
from .profile import ProfileCurve, cylinder_profile, sphere_profile

logger = logging.getLogger(__name__)

IMMERSED_TOL = 1e-10
CLOSEDNESS_TOL = 1e-5
ROUND_SPHERE_RATIO = 1e-10
CMC_TOL = 1e-4
GAUSS_POINTS = 4


@dataclass(frozen=True)
class GaussData:
    """Left and right normals and the quaternionic mean curvature per node."""

    N: np.ndarray
    R: np.ndarray
    H: np.ndarray

    def unit_residual(self) -> float:
        """max |N^2 + 1| + |R^2 + 1| over nodes."""
        one = np.array([1.0, 0.0, 0.0, 0.0])
        n2 = qnorm(qmul(self.N, self.N) + one)
        r2 = qnorm(qmul(self.R, self.R) + one)
        return float(np.max(n2 + r2))

    def scalar_mean_curvature(self) -> np.ndarray:
        """Real part of H (the mean curvature for surfaces in R^3)."""
        return qreal(self.H)


@dataclass(frozen=True)
class ImmersionField:
    """Immersion sampled on a grid, backed by a model for off-node evaluation."""

    grid: DomainGrid
    model: SurfaceModel
    values: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    is_r3: bool = False
    name: str = "surface"
    _cache: Dict[str, object] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_model(cls, model: SurfaceModel, grid: DomainGrid) -> "ImmersionField":
        X, Y = grid.mesh()
        values = model.value(X, Y)
        if model.is_r3:
            values = values.copy()
            values[..., 0] = 0.0
        return cls(
            grid=grid,
            model=model,
            values=values,
            fx=model.fx(X, Y),
            fy=model.fy(X, Y),
            is_r3=model.is_r3,
            name=model.name,
        )

    @classmethod
    def from_values(
        cls,
        grid: DomainGrid,
        values: np.ndarray,
        fx: Optional[np.ndarray] = None,
        fy: Optional[np.ndarray] = None,
        normal: Optional[np.ndarray] = None,
        is_r3: bool = False,
        name: str = "sampled",
    ) -> "ImmersionField":
        """Wrap node values; partials are finite differences unless given."""
        model = SampledModel(grid, values, fx=fx, fy=fy, normal=normal, is_r3=is_r3, name=name)
        return cls(
            grid=grid,
            model=model,
            values=model.node_values,
            fx=model.node_fx,
            fy=model.node_fy,
            is_r3=is_r3,
            name=name,
        )

    def mesh(self):
        return self.grid.mesh()

    def normal(self) -> np.ndarray:
        if "N" not in self._cache:
            self._cache["N"] = self.model.normal(*self.mesh())
        return self._cache["N"]  # type: ignore[return-value]

    def normal_derivatives(self):
        if "dN" not in self._cache:
            X, Y = self.mesh()
            self._cache["dN"] = (self.model.normal_dx(X, Y), self.model.normal_dy(X, Y))
        return self._cache["dN"]

    def differential(self, direction: int) -> np.ndarray:
        return self.fx if direction == 0 else self.fy

    def translated(self, offset: np.ndarray) -> "ImmersionField":
        return ImmersionField.from_values(
            self.grid, self.values + offset, fx=self.fx, fy=self.fy,
            normal=self.normal(), is_r3=self.is_r3, name=self.name,
        )

    def conformality_residual(self) -> np.ndarray:
        """|<f_x, f_y>| + ||f_x| - |f_y|| per node."""
        return np.abs(qdot(self.fx, self.fy)) + np.abs(qnorm(self.fx) - qnorm(self.fy))

    def real_part_residual(self) -> float:
        """Spread of Re f over the nodes."""
        re = qreal(self.values)
        return float(np.max(re) - np.min(re))

    def mean_curvature(self) -> np.ndarray:
        return gauss_map(self).H


def make_cylinder(grid: DomainGrid) -> ImmersionField:
    """f = (i x + j e^{-iy}) / 2, the CMC cylinder with H = 1."""
    if not grid.periodic_y or not np.isclose(grid.period_y, 2.0 * np.pi):
        raise ValueError("the cylinder needs a grid periodic in y with period 2 pi")
    return ImmersionField.from_model(RevolutionModel(cylinder_profile(), name="cylinder"), grid)


def make_revolution(profile: ProfileCurve, grid: DomainGrid) -> ImmersionField:
    """f = i p(x) + j q(x) e^{-iy}.

    Raises:
        ProfileInvalid: the profile violates the arc-length constraint on the grid
    """
    profile.validate(grid.xs)
    return ImmersionField.from_model(RevolutionModel(profile), grid)


def make_sphere(grid: DomainGrid) -> ImmersionField:
    """Unit sphere f = i tanh x + j sech x e^{-iy}."""
    return ImmersionField.from_model(RevolutionModel(sphere_profile(), name="sphere"), grid)


def make_plane(grid: DomainGrid) -> ImmersionField:
    return ImmersionField.from_model(PlaneModel(), grid)


def _degenerate_nodes(fx: np.ndarray, fy: np.ndarray) -> list:
    bad = (qnorm(fx) < IMMERSED_TOL) | (qnorm(fy) < IMMERSED_TOL)
    return [tuple(int(v) for v in idx) for idx in np.argwhere(bad)]


def gauss_map(f: ImmersionField) -> GaussData:
    """Left normal N, right normal R and mean curvature H of ``f``.

    Raises:
        DegenerateImmersion: |f_x| or |f_y| vanishes at some nodes
    """
    if "gauss" in f._cache:
        return f._cache["gauss"]  # type: ignore[return-value]
    nodes = _degenerate_nodes(f.fx, f.fy)
    if nodes:
        raise DegenerateImmersion("immersion derivative vanishes", nodes)
    X, Y = f.mesh()
    N = f.normal()
    R = f.model.right_normal(X, Y)
    Nx, Ny = f.normal_derivatives()
    H = mean_curvature_from(f.fx, N, Nx, Ny)
    data = GaussData(N=N, R=R, H=H)
    f._cache["gauss"] = data
    return data


def gauss_residuals(f: ImmersionField) -> Dict[str, float]:
    """Interior maxima of |*df - N df|, |*df + df R| and |N v + v R|."""
    data = gauss_map(f)
    mask = f.grid.interior_mask()
    N, R = data.N, data.R
    star_left = qnorm(f.fy - qmul(N, f.fx)) + qnorm(-f.fx - qmul(N, f.fy))
    star_right = qnorm(f.fy + qmul(f.fx, R)) + qnorm(-f.fx + qmul(f.fy, R))
    tangent = qnorm(qmul(N, f.fx) + qmul(f.fx, R)) + qnorm(qmul(N, f.fy) + qmul(f.fy, R))
    return {
        "star_left": float(np.max(star_left[mask])),
        "star_right": float(np.max(star_right[mask])),
        "tangent_split": float(np.max(tangent[mask])),
        "unit_normals": data.unit_residual(),
    }


def wedge_residual(
    fx: np.ndarray,
    fy: np.ndarray,
    gx: np.ndarray,
    gy: np.ndarray,
    mask: Optional[np.ndarray] = None,
) -> float:
    """max over nodes of |df ^ dg| + |dg ^ df|, with (w ^ v)(dx, dy) = w_x v_y - w_y v_x."""
    left = qnorm(qmul(fx, gy) - qmul(fy, gx))
    right = qnorm(qmul(gx, fy) - qmul(gy, fx))
    total = left + right
    if mask is not None:
        total = total[mask]
    return float(np.max(total))


def closedness_residual(grid: DomainGrid, wx: np.ndarray, wy: np.ndarray) -> float:
    """Relative mismatch of mixed partials of the one-form w_x dx + w_y dy."""
    mismatch = qnorm(diff_y(wx, grid.hy, grid.periodic_y) - diff_x(wy, grid.hx))
    mask = grid.interior_mask()
    scale = max(float(np.max(qnorm(wx))), float(np.max(qnorm(wy))), 1.0)
    return float(np.max(mismatch[mask])) / scale


def analytic_closedness_residual(f: "ImmersionField") -> float:
    """Closedness of f_x^{-1} dx - f_y^{-1} dy from the model's mixed partial.

    d/dy f_x^{-1} - d/dx (-f_y^{-1}) = -f_x^{-1} f_xy f_x^{-1} - f_y^{-1} f_xy f_y^{-1}.
    """
    X, Y = f.mesh()
    fxy = f.model.fxy(X, Y)
    inv_x, inv_y = qinv(f.fx), qinv(f.fy)
    mismatch = qnorm(qmul_chain(inv_x, fxy, inv_x) + qmul_chain(inv_y, fxy, inv_y))
    scale = max(float(np.max(qnorm(inv_x))), float(np.max(qnorm(inv_y))), 1.0)
    return float(np.max(mismatch)) / scale


def integrate_one_form(
    grid: DomainGrid, model_x, model_y, wx: np.ndarray, wy: np.ndarray, analytic: bool
) -> np.ndarray:
    """Integrate w_x dx + w_y dy from the grid origin.

    The path runs along x at y_min and then up each column. Analytic
    integrands use Gauss-Legendre quadrature on every edge; sampled ones use
    the cumulative trapezoid rule.
    """
    xs, ys = grid.xs, grid.ys
    if analytic:
        nodes, weights = leggauss(GAUSS_POINTS)
        t = 0.5 * (nodes + 1.0)
        w = 0.5 * weights
        # base row
        xa = xs[:-1, None] + grid.hx * t[None, :]
        row_inc = grid.hx * np.einsum("k,ekq->eq", w, model_x(xa, np.full_like(xa, ys[0])))
        row = np.concatenate([np.zeros((1, 4)), np.cumsum(row_inc, axis=0)], axis=0)
        ya = ys[:-1, None] + grid.hy * t[None, :]
        XX = np.broadcast_to(xs[:, None, None], (len(xs),) + ya.shape)
        YY = np.broadcast_to(ya[None, :, :], XX.shape)
        col_inc = grid.hy * np.einsum("k,xekq->xeq", w, model_y(XX, YY))
        cols = np.concatenate([np.zeros((len(xs), 1, 4)), np.cumsum(col_inc, axis=1)], axis=1)
        return row[:, None, :] + cols
    row = cumulative_trapezoid(wx[:, 0, :], dx=grid.hx, axis=0, initial=0.0)
    cols = cumulative_trapezoid(wy, dx=grid.hy, axis=1, initial=0.0)
    return row[:, None, :] + cols


def christoffel_dual(
    f: ImmersionField, closedness_tol: float = CLOSEDNESS_TOL, analytic: Optional[bool] = None
) -> ImmersionField:
    """Christoffel dual df^d = f_x^{-1} dx - f_y^{-1} dy, normalized by f^d(origin) = 0.

    Closedness is measured with the model's mixed partial for analytic models
    and with node differences for sampled ones.

    Raises:
        NotClosed: the coordinates are not conformal curvature-line coordinates
    """
    nodes = _degenerate_nodes(f.fx, f.fy)
    if nodes:
        raise DegenerateImmersion("immersion derivative vanishes", nodes)
    if analytic is None:
        analytic = not isinstance(f.model, SampledModel)
    wx = qinv(f.fx)
    wy = -qinv(f.fy)
    if analytic:
        residual = analytic_closedness_residual(f)
    else:
        residual = closedness_residual(f.grid, wx, wy)
    logger.debug("dual closedness residual %.3e for %s", residual, f.name)
    if residual > closedness_tol:
        raise NotClosed(f"dual one-form of {f.name} is not closed", residual)
    dual_model = ChristoffelDualModel(f.model)
    values = integrate_one_form(f.grid, dual_model.fx, dual_model.fy, wx, wy, analytic)
    sampled = SampledModel(
        f.grid, values, fx=wx, fy=wy, normal=dual_model.normal(*f.mesh()), is_r3=f.is_r3,
        name=dual_model.name,
    )
    dual_model.sampled = sampled
    return ImmersionField(
        grid=f.grid, model=dual_model, values=values, fx=wx, fy=wy, is_r3=f.is_r3,
        name=dual_model.name,
    )


def parallel_surface(f: ImmersionField, cmc_tol: float = CMC_TOL) -> ImmersionField:
    """Parallel CMC surface g = f + N of an H = 1 surface.

    Raises:
        RoundSphere: dg vanishes identically
        ValueError: f does not have constant mean curvature 1
    """
    g_model = ParallelModel(f.model)
    g = ImmersionField.from_model(g_model, f.grid)
    scale = max(float(np.max(qnorm(f.fx))), float(np.max(qnorm(f.fy))))
    dg = max(float(np.max(qnorm(g.fx))), float(np.max(qnorm(g.fy))))
    if dg <= ROUND_SPHERE_RATIO * scale:
        raise RoundSphere(f"parallel surface of {f.name} collapses to a point")
    H = gauss_map(f).H
    mask = f.grid.interior_mask()
    one = np.array([1.0, 0.0, 0.0, 0.0])
    deviation = float(np.max(qnorm(H - one)[mask]))
    if deviation > cmc_tol:
        raise ValueError(f"{f.name} is not CMC with H = 1 (max |H - 1| = {deviation:.3e})")
    return g


def is_imaginary(values: np.ndarray, tol: float = 0.0) -> bool:
    return bool(np.max(np.abs(qreal(values))) <= tol)


def imaginary_part(field_: ImmersionField) -> ImmersionField:
    """Drop the real part of a field with constant real part."""
    return ImmersionField.from_values(
        field_.grid, qimag(field_.values), fx=qimag(field_.fx), fy=qimag(field_.fy),
        is_r3=True, name=field_.name,
    )
