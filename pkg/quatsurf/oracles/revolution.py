"""Parallel sections and Darboux transforms of surfaces of revolution.

For f = i p(x) + j q(x) e^{-iy} and the dual df^d = f_x^{-1} dx - f_y^{-1} dy
the parallel sections of d_rho are

    alpha = e^{iy/2} c(x) e^{+-isy/2},   beta = -f_x^{-1} alpha_x,

with s = sqrt(1 + 4 rho) and c = c0 + j c1 solving

    c0' = ((1 +- s) q' c0 + i (1 -+ s) p' c1) / (2q)
    c1' = (i (1 +- s) p' c0 + (1 -+ s) q' c1) / (2q).

The resulting Darboux transforms are rotation surfaces
f^ = (i p + w0) + j (q + w1) e^{-iy} with w0 + j w1 = -c c'^{-1}(i p' + j q').
"""

import cmath
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..connections.families import IsothermicRho
from ..connections.transport import SectionField
from ..core.quaternion import complexify, decomplexify, qinv, qmul, qmul_chain, qnorm, right_complex
from ..errors import Blowup, DegenerateDenominator, DegenerateSpectral
from ..surfaces.immersion import ImmersionField
from ..surfaces.models import ChristoffelDualModel, RevolutionModel
from ..transforms.results import DarbouxResult, singular_mask

logger = logging.getLogger(__name__)

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
DENOMINATOR_FLOOR = 1e-12
GAUGE_TOL = 1e-8


def revolution_resonances(k_max: int) -> List[float]:
    """r_k = (k^2 - 1) / 4 for k = 2..k_max, where s = k is an integer."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    return [(k * k - 1) / 4.0 for k in range(2, k_max + 1)]


def gauge_factor(f: ImmersionField) -> float:
    """rho0 with d(f + N) = rho0 df^d for the formula dual df^d.

    Raises:
        ValueError: the parallel surface is not a constant multiple of the dual
    """
    Nx, _ = f.normal_derivatives()
    ratio = qmul(f.fx + Nx, f.fx)
    mask = f.grid.interior_mask()
    rho0 = float(np.mean(ratio[mask][..., 0]))
    spread = float(np.max(qnorm(ratio[mask] - np.array([rho0, 0.0, 0.0, 0.0]))))
    if spread > GAUGE_TOL * max(abs(rho0), 1.0):
        raise ValueError(f"{f.name} has no constant gauge factor (spread {spread:.3e})")
    return rho0


def to_formula_gauge(rho: complex, rho0: float) -> complex:
    """Spectral value for the formula dual from one for the parallel-surface dual."""
    return complex(rho) * rho0


def to_parallel_gauge(rho: complex, rho0: float) -> complex:
    return complex(rho) / rho0


@dataclass(frozen=True)
class RotationProfile:
    """f^ = p^ + j q^ e^{i(theta - y)} sampled at ``xs``."""

    xs: np.ndarray
    p_hat: np.ndarray
    q_hat: np.ndarray
    theta: np.ndarray


@dataclass(frozen=True)
class RevolutionOracle:
    """Isothermic family of a surface of revolution in the formula gauge.

    Attributes:
        surface: Surface of revolution on its grid
        rho: Spectral value for the dual f_x^{-1} dx - f_y^{-1} dy
        x_start: Where initial coefficients are imposed (default x_min)
    """

    surface: ImmersionField
    rho: complex
    x_start: Optional[float] = None

    def __post_init__(self) -> None:
        if not isinstance(self.surface.model, RevolutionModel):
            raise TypeError("the revolution oracle needs a surface of revolution")
        if abs(self.rho) < 1e-14:
            raise DegenerateSpectral("rho = 0 has only constant parallel sections")

    @property
    def profile(self):
        return self.surface.model.profile

    @property
    def s(self) -> complex:
        return cmath.sqrt(1.0 + 4.0 * complex(self.rho))

    @property
    def degenerate(self) -> bool:
        return abs(self.s) < 1e-12

    @property
    def multipliers(self) -> Tuple[complex, complex]:
        """-e^{+- i pi s}."""
        return -cmath.exp(1j * np.pi * self.s), -cmath.exp(-1j * np.pi * self.s)

    def connection(self) -> IsothermicRho:
        return IsothermicRho(self.surface, ChristoffelDualModel(self.surface.model), self.rho)

    def _x0(self) -> float:
        return self.surface.grid.x_min if self.x_start is None else float(self.x_start)

    def _matrix(self, x: float, s: complex) -> np.ndarray:
        dp, dq = float(self.profile.dp(x)), float(self.profile.dq(x))
        return np.array(
            [[(1 + s) * dq, 1j * (1 - s) * dp], [1j * (1 + s) * dp, (1 - s) * dq]], dtype=complex
        )

    def _integrate(self, rhs, initial: np.ndarray) -> np.ndarray:
        """Values at every grid x, integrating outwards from x_start in both directions."""
        xs = self.surface.grid.xs
        x0 = self._x0()
        out = np.empty((len(xs), len(initial)), dtype=complex)
        for side in (xs >= x0, xs < x0):
            targets = xs[side]
            if targets.size == 0:
                continue
            # t_eval must be ordered along the direction of integration
            t_eval = targets if targets[0] >= x0 else targets[::-1]
            if np.all(t_eval == x0):
                out[side] = initial
                continue
            sol = solve_ivp(
                rhs, (x0, t_eval[-1]), initial, method="DOP853", t_eval=t_eval,
                rtol=ODE_RTOL, atol=ODE_ATOL,
            )
            if not sol.success or not np.all(np.isfinite(sol.y)):
                raise Blowup(f"coefficient ODE failed: {sol.message}")
            values = sol.y.T
            out[side] = values if targets[0] >= x0 else values[::-1]
        return out

    def coefficients(
        self, sign: int = 1, c_init: Sequence[complex] = (1.0, 1.0)
    ) -> Tuple[np.ndarray, np.ndarray]:
        """(c, c') at the grid xs, shape (nx, 2) each."""
        s = sign * self.s

        def rhs(x, c):
            return self._matrix(x, s) @ c / (2.0 * float(self.profile.q(x)))

        c = self._integrate(rhs, np.asarray(c_init, dtype=complex))
        dc = np.stack([rhs(x, ci) for x, ci in zip(self.surface.grid.xs, c)])
        return c, dc

    def _section_from(self, alpha, ax, ay, **meta) -> SectionField:
        f = self.surface
        inv_fx = qinv(f.fx)
        beta = -qmul(inv_fx, ax)
        bx = -right_complex(qmul(inv_fx, alpha), self.rho)
        by = right_complex(qmul(qinv(f.fy), alpha), self.rho)
        return SectionField.from_quaternions(
            f.grid,
            np.stack([alpha, beta], axis=-2),
            connection=self.connection(),
            dx=np.stack([ax, bx], axis=-2),
            dy=np.stack([ay, by], axis=-2),
            **meta,
        )

    def section(self, sign: int = 1, c_init: Sequence[complex] = (1.0, 1.0)) -> SectionField:
        """alpha = e^{iy/2} c e^{sign i s y/2}, with multiplier -e^{sign i pi s}."""
        s = sign * self.s
        c, dc = self.coefficients(sign, c_init)
        _, Y = self.surface.mesh()
        e0 = np.exp(0.5j * (1.0 + s) * Y)
        e1 = np.exp(0.5j * (s - 1.0) * Y)
        alpha = decomplexify(c[:, None, 0] * e0, c[:, None, 1] * e1)
        ax = decomplexify(dc[:, None, 0] * e0, dc[:, None, 1] * e1)
        ay = decomplexify(
            0.5j * (1.0 + s) * c[:, None, 0] * e0, 0.5j * (s - 1.0) * c[:, None, 1] * e1
        )
        h = -cmath.exp(1j * np.pi * s)
        return self._section_from(alpha, ax, ay, multiplier=h, sign=sign)

    def linear_section(
        self, c_init: Sequence[complex] = (1.0, 1.0), e_init: Sequence[complex] = (0.0, 0.0)
    ) -> SectionField:
        """Non-periodic section at s = 0: alpha = e^{iy/2} (e + c i y / 2).

        Here e is the s-derivative of the coefficients, solving
        e' = (M(0) e + M_s c) / (2q).
        """
        if not self.degenerate:
            raise ValueError("the linear-in-y branch exists only at s = 0")

        def rhs(x, ce):
            dp, dq = float(self.profile.dp(x)), float(self.profile.dq(x))
            m0 = self._matrix(x, 0.0)
            ms = np.array([[dq, -1j * dp], [1j * dp, -dq]], dtype=complex)
            c, e = ce[:2], ce[2:]
            return np.concatenate([m0 @ c, m0 @ e + ms @ c]) / (2.0 * float(self.profile.q(x)))

        initial = np.concatenate(
            [np.asarray(c_init, dtype=complex), np.asarray(e_init, dtype=complex)]
        )
        ce = self._integrate(rhs, initial)
        dce = np.stack([rhs(x, v) for x, v in zip(self.surface.grid.xs, ce)])
        _, Y = self.surface.mesh()
        ep, em = np.exp(0.5j * Y), np.exp(-0.5j * Y)
        c0, c1, e0, e1 = (ce[:, None, k] for k in range(4))
        d0, d1, de0, de1 = (dce[:, None, k] for k in range(4))
        u0 = e0 + 0.5j * Y * c0
        u1 = e1 + 0.5j * Y * c1
        alpha = decomplexify(u0 * ep, u1 * em)
        ax = decomplexify((de0 + 0.5j * Y * d0) * ep, (de1 + 0.5j * Y * d1) * em)
        ay = decomplexify((0.5j * c0 + 0.5j * u0) * ep, (0.5j * c1 - 0.5j * u1) * em)
        return self._section_from(alpha, ax, ay, multiplier=None, sign=0)

    def _offset(self, sign: int, c_init: Sequence[complex]) -> np.ndarray:
        """w = -c c'^{-1} (i p' + j q') at the grid xs, as quaternions."""
        c, dc = self.coefficients(sign, c_init)
        cq = decomplexify(c[:, 0], c[:, 1])
        dcq = decomplexify(dc[:, 0], dc[:, 1])
        bad = np.flatnonzero(qnorm(dcq) < DENOMINATOR_FLOOR * max(float(np.max(qnorm(cq))), 1.0))
        if bad.size:
            raise DegenerateDenominator(f"c' vanishes at x = {self.surface.grid.xs[bad[0]]:.6g}")
        xs = self.surface.grid.xs
        fx0 = decomplexify(1j * self.profile.dp(xs), self.profile.dq(xs))
        return -qmul_chain(cq, qinv(dcq), fx0)

    def rotation_profile(
        self, sign: int = 1, c_init: Sequence[complex] = (1.0, 1.0)
    ) -> RotationProfile:
        xs = self.surface.grid.xs
        w0, w1 = complexify(self._offset(sign, c_init))
        outer = self.profile.q(xs) + w1
        return RotationProfile(
            xs=xs, p_hat=1j * self.profile.p(xs) + w0, q_hat=np.abs(outer), theta=np.angle(outer)
        )

    def darboux_closed_form(
        self, sign: int = 1, c_init: Sequence[complex] = (1.0, 1.0)
    ) -> DarbouxResult:
        """The transform from the rotation-surface formula, without any section quotient.

        Raises:
            DegenerateDenominator: c' vanishes at a grid node
        """
        f = self.surface
        w0, w1 = complexify(self._offset(sign, c_init))
        _, Y = f.mesh()
        T = decomplexify(np.broadcast_to(w0[:, None], Y.shape), w1[:, None] * np.exp(-1j * Y))
        phi = self.section(sign, c_init)
        alpha = phi.alpha
        rho_T = qmul_chain(right_complex(alpha, self.rho), qinv(alpha), T)
        N = f.normal()
        N_hat = -qmul_chain(T, N, qinv(T))
        R_hat = -qmul_chain(qinv(rho_T), N, rho_T)
        f_hat = ImmersionField.from_values(f.grid, f.values + T, normal=N_hat, name=f"D({f.name})")
        singular = singular_mask(T)
        consistency = qnorm(T - qmul(alpha, qinv(phi.beta)))
        logger.debug("closed-form Darboux transform, sign %d, s = %s", sign, self.s)
        return DarbouxResult(
            surface=f_hat,
            T=T,
            normal=N_hat,
            right_normal=R_hat,
            singular=singular,
            residuals={"section_quotient": float(np.max(consistency[~singular]))},
            kind="revolution",
        )
