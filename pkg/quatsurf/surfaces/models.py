"""Surface models: evaluate an immersion and its first-order data anywhere.

A model gives the immersion value, the partials f_x and f_y, the left
normal N and its partials at arbitrary parameter points. Connections and
integrators sample models at Runge-Kutta stage points, so every derived
surface (dual, parallel, sampled, transformed) is wrapped as a model too.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..core.quaternion import (
    I,
    J,
    K,
    from_complex,
    qimag,
    qinv,
    qmul,
    qnorm,
)
from .differences import diff_x, diff_y
from .grid import DomainGrid
from .profile import ProfileCurve

NORMAL_FD_STEP = 1e-5
MIXED_FD_STEP = 1e-3


def normalize_imaginary(q: np.ndarray) -> np.ndarray:
    """Project to Im H and scale to unit length."""
    v = qimag(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        return v / qnorm(v)[..., None]


class SurfaceModel(ABC):
    """Immersion f(x, y) with vectorized first-order data.

    Subclasses implement :meth:`value`, :meth:`fx` and :meth:`fy`; normals
    default to N = f_y f_x^{-1}, R = -f_x^{-1} f_y with central-difference
    normal derivatives.
    """

    is_r3: bool = False
    name: str = "surface"

    @abstractmethod
    def value(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """f(x, y) with shape broadcast(x, y) + (4,)."""

    @abstractmethod
    def fx(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def fy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ...

    def differential(self, x: np.ndarray, y: np.ndarray, direction: int) -> np.ndarray:
        """f_x for direction 0, f_y for direction 1."""
        return self.fx(x, y) if direction == 0 else self.fy(x, y)

    def fxy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Mixed partial f_xy: fourth-order difference of the exact f_x along y."""
        h = MIXED_FD_STEP
        y = np.asarray(y, dtype=float)
        return (
            -self.fx(x, y + 2.0 * h)
            + 8.0 * self.fx(x, y + h)
            - 8.0 * self.fx(x, y - h)
            + self.fx(x, y - 2.0 * h)
        ) / (12.0 * h)

    def normal(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Left normal N with *df = N df."""
        n = qmul(self.fy(x, y), qinv(self.fx(x, y)))
        return normalize_imaginary(n)

    def right_normal(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Right normal R with *df = -df R."""
        r = -qmul(qinv(self.fx(x, y)), self.fy(x, y))
        return normalize_imaginary(r)

    def normal_dx(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        h = NORMAL_FD_STEP
        x = np.asarray(x, dtype=float)
        return (self.normal(x + h, y) - self.normal(x - h, y)) / (2.0 * h)

    def normal_dy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        h = NORMAL_FD_STEP
        y = np.asarray(y, dtype=float)
        return (self.normal(x, y + h) - self.normal(x, y - h)) / (2.0 * h)

    def normal_differential(self, x: np.ndarray, y: np.ndarray, direction: int) -> np.ndarray:
        return self.normal_dx(x, y) if direction == 0 else self.normal_dy(x, y)

    def mean_curvature(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Quaternionic mean curvature from -df H = (dN)'."""
        return mean_curvature_from(
            self.fx(x, y), self.normal(x, y), self.normal_dx(x, y), self.normal_dy(x, y)
        )


def mean_curvature_from(
    fx: np.ndarray, normal: np.ndarray, normal_dx: np.ndarray, normal_dy: np.ndarray
) -> np.ndarray:
    """H = -f_x^{-1} (N_x - N N_y) / 2.

    The tangential part (dN)' = (dN - N *dN)/2 evaluated on d/dx uses
    *dN(d/dx) = N_y.
    """
    tangential = 0.5 * (normal_dx - qmul(normal, normal_dy))
    return -qmul(qinv(fx), tangential)


def _exp_iy(y: np.ndarray, sign: float = -1.0) -> np.ndarray:
    return from_complex(np.exp(sign * 1j * np.asarray(y, dtype=float)))


class RevolutionModel(SurfaceModel):
    """f = i p(x) + j q(x) e^{-iy}, with closed-form Gauss map."""

    is_r3 = True

    def __init__(self, profile: ProfileCurve, name: str = "revolution"):
        self.profile = profile
        self.name = name

    def _jq(self, coeff: np.ndarray, y: np.ndarray) -> np.ndarray:
        # j c e^{-iy} for real c
        return qmul(J * coeff[..., None], _exp_iy(y))

    def value(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return I * self.profile.p(x)[..., None] + self._jq(self.profile.q(x), y)

    def fx(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return I * self.profile.dp(x)[..., None] + self._jq(self.profile.dq(x), y)

    def fy(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return qmul(K * self.profile.q(x)[..., None], _exp_iy(y))

    def normal(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        q = self.profile.q(x)[..., None]
        return (I * self.profile.dq(x)[..., None] - self._jq(self.profile.dp(x), y)) / q

    right_normal = normal

    def normal_dx(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        q = self.profile.q(x)[..., None]
        dq = self.profile.dq(x)[..., None]
        second = I * self.profile.ddq(x)[..., None] - self._jq(self.profile.ddp(x), y)
        return second / q - dq * self.normal(x, y) / q

    def normal_dy(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        q = self.profile.q(x)[..., None]
        return -qmul(K * self.profile.dp(x)[..., None], _exp_iy(y)) / q


class PlaneModel(SurfaceModel):
    """f = x j + y k with N = R = i."""

    is_r3 = True
    name = "plane"

    def value(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return J * x[..., None] + K * y[..., None]

    def fx(self, x, y):
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))
        return np.broadcast_to(J, shape + (4,)).copy()

    def fy(self, x, y):
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))
        return np.broadcast_to(K, shape + (4,)).copy()

    def normal_dx(self, x, y):
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))
        return np.zeros(shape + (4,))

    normal_dy = normal_dx


class ChristoffelDualModel(SurfaceModel):
    """Derivatives of the dual df^d = f_x^{-1} dx - f_y^{-1} dy of ``base``.

    Values come from an integrated node array when one is attached.
    """

    def __init__(self, base: SurfaceModel, sampled_values: Optional["SampledModel"] = None):
        self.base = base
        self.sampled = sampled_values
        self.is_r3 = base.is_r3
        self.name = f"{base.name}^d"

    def value(self, x, y):
        if self.sampled is None:
            raise ValueError("dual values are only available after integration")
        return self.sampled.value(x, y)

    def fx(self, x, y):
        return qinv(self.base.fx(x, y))

    def fy(self, x, y):
        return -qinv(self.base.fy(x, y))

    def normal(self, x, y):
        return -self.base.right_normal(x, y)

    def right_normal(self, x, y):
        return -self.base.normal(x, y)


class ParallelModel(SurfaceModel):
    """g = f + N, with Gauss map N_g = -N."""

    def __init__(self, base: SurfaceModel):
        self.base = base
        self.is_r3 = base.is_r3
        self.name = f"{base.name}+N"

    def value(self, x, y):
        return self.base.value(x, y) + self.base.normal(x, y)

    def fx(self, x, y):
        return self.base.fx(x, y) + self.base.normal_dx(x, y)

    def fy(self, x, y):
        return self.base.fy(x, y) + self.base.normal_dy(x, y)

    def normal(self, x, y):
        return -self.base.normal(x, y)

    right_normal = normal

    def normal_dx(self, x, y):
        return -self.base.normal_dx(x, y)

    def normal_dy(self, x, y):
        return -self.base.normal_dy(x, y)


class SampledModel(SurfaceModel):
    """Immersion known at grid nodes, linearly interpolated in between.

    Partials default to finite differences of the node values; callers that
    know exact node derivatives pass them in.
    """

    def __init__(
        self,
        grid: DomainGrid,
        values: np.ndarray,
        fx: Optional[np.ndarray] = None,
        fy: Optional[np.ndarray] = None,
        normal: Optional[np.ndarray] = None,
        is_r3: bool = False,
        name: str = "sampled",
    ):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape + (4,):
            raise ValueError(f"sampled values need shape {grid.shape + (4,)}, got {values.shape}")
        self.grid = grid
        self.is_r3 = is_r3
        self.name = name
        self.node_values = values
        self.node_fx = diff_x(values, grid.hx) if fx is None else np.asarray(fx, dtype=float)
        self.node_fy = (
            diff_y(values, grid.hy, grid.periodic_y) if fy is None else np.asarray(fy, dtype=float)
        )
        if normal is None:
            normal = normalize_imaginary(qmul(self.node_fy, qinv(self.node_fx)))
        self.node_normal = normal
        self.node_normal_dx = diff_x(normal, grid.hx)
        self.node_normal_dy = diff_y(normal, grid.hy, grid.periodic_y)
        self._interpolators = {
            key: self._make_interpolator(arr)
            for key, arr in (
                ("value", values),
                ("fx", self.node_fx),
                ("fy", self.node_fy),
                ("normal", self.node_normal),
                ("normal_dx", self.node_normal_dx),
                ("normal_dy", self.node_normal_dy),
            )
        }

    def _make_interpolator(self, arr: np.ndarray) -> RegularGridInterpolator:
        ys = self.grid.ys
        if self.grid.periodic_y:
            ys = np.append(ys, self.grid.y_min + self.grid.period_y)
            arr = np.concatenate([arr, arr[:, :1]], axis=1)
        return RegularGridInterpolator(
            (self.grid.xs, ys), arr, method="linear", bounds_error=False, fill_value=None
        )

    def _eval(self, key: str, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if self.grid.periodic_y:
            y = self.grid.y_min + np.mod(y - self.grid.y_min, self.grid.period_y)
        points = np.stack([x.ravel(), y.ravel()], axis=-1)
        out = self._interpolators[key](points)
        return out.reshape(x.shape + (4,))

    def value(self, x, y):
        return self._eval("value", x, y)

    def fx(self, x, y):
        return self._eval("fx", x, y)

    def fy(self, x, y):
        return self._eval("fy", x, y)

    def normal(self, x, y):
        return self._eval("normal", x, y)

    def normal_dx(self, x, y):
        return self._eval("normal_dx", x, y)

    def normal_dy(self, x, y):
        return self._eval("normal_dy", x, y)

