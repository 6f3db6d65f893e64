"""Darboux transforms: classical (Riccati), rho, mu, dual-tracking and conformal Gauss.

Conventions: a d_rho-parallel section phi = (alpha, beta) gives
T = alpha beta^{-1} and the transform f^ = f + T, with

    df^   = T df^d rho^ T,          rho^ = alpha rho alpha^{-1},
    T^d   = beta rho^{-1} alpha^{-1},
    N^    = -T R T^{-1},            R^ = -(rho^ T)^{-1} N (rho^ T).
"""

import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from ..connections.base import SurfaceLike, model_of
from ..connections.families import IsothermicRho
from ..connections.transport import DEFAULT_SETTINGS, SectionField, TransportSettings
from ..core.quaternion import (
    QuatLike,
    as_quat,
    from_real,
    qinv,
    qmul,
    qmul_chain,
    qnorm,
    qreal,
    right_complex,
)
from ..core.spectral import SpectralPoint, spectral_point_from_mu
from ..errors import Blowup, DegenerateSpectral, SingularEverywhere
from ..surfaces.differences import diff_x, diff_y
from ..surfaces.immersion import ImmersionField, parallel_surface, wedge_residual
from ..surfaces.models import mean_curvature_from
from .correspondence import check_mu, cw_alpha, isothermic_from_harmonic
from .results import DarbouxResult, singular_mask

logger = logging.getLogger(__name__)

BETA_FLOOR = 1e-12


def _node_partials(surface: SurfaceLike, grid) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(surface, ImmersionField):
        return surface.fx, surface.fy
    model = model_of(surface)
    X, Y = grid.mesh()
    return model.fx(X, Y), model.fy(X, Y)


def _node_values(surface: SurfaceLike, grid) -> Optional[np.ndarray]:
    if isinstance(surface, ImmersionField):
        return surface.values
    try:
        return model_of(surface).value(*grid.mesh())
    except ValueError:
        return None


def _right_normal(f: ImmersionField) -> np.ndarray:
    return f.model.right_normal(*f.mesh())


def _relative_max(values: np.ndarray, mask: np.ndarray, scale: float) -> float:
    if not np.any(mask):
        return 0.0
    return float(np.max(values[mask])) / max(scale, 1e-300)


def cmc_condition(T_dual: np.ndarray, N: np.ndarray, rho_hat: np.ndarray) -> np.ndarray:
    """|(T^d + N)^2 - (rho^^{-1} - 1)| per node."""
    X = T_dual + N
    return qnorm(qmul(X, X) - (qinv(rho_hat) - from_real(1.0)))


def rho_darboux(
    f: ImmersionField,
    dual: SurfaceLike,
    phi: SectionField,
    rho: complex,
    cmc: bool = False,
) -> DarbouxResult:
    """The rho-Darboux transform D_{phi, rho}(f) = f + alpha beta^{-1}.

    Args:
        f: Isothermic immersion
        dual: Dual surface of f in the gauge the section was computed for
        phi: d_rho-parallel section (alpha, beta)
        rho: Spectral value
        cmc: Also report the CMC condition, for ``dual`` the parallel surface

    Raises:
        DegenerateSpectral: rho = 0
        SingularEverywhere: beta vanishes identically
    """
    rho = complex(rho)
    if rho == 0:
        raise DegenerateSpectral("rho = 0 gives no Darboux transform")
    grid = f.grid
    alpha, beta = phi.alpha, phi.beta
    if float(np.max(qnorm(beta))) < BETA_FLOOR:
        raise SingularEverywhere("beta vanishes at every node")
    singular = singular_mask(alpha, beta)
    inv_beta = qinv(beta)
    T = qmul(alpha, inv_beta)
    alpha_rho = right_complex(alpha, rho)
    rho_hat = qmul(alpha_rho, qinv(alpha))
    rho_T = qmul(alpha_rho, inv_beta)
    dx, dy = _node_partials(dual, grid)
    fx_hat = qmul_chain(T, dx, rho_T)
    fy_hat = qmul_chain(T, dy, rho_T)
    T_dual = qmul(right_complex(beta, 1.0 / rho), qinv(alpha))
    beta_alpha = qmul(beta, qinv(alpha))
    dual_fx_hat = qmul_chain(T_dual, f.fx, beta_alpha)
    dual_fy_hat = qmul_chain(T_dual, f.fy, beta_alpha)

    N, R = f.normal(), _right_normal(f)
    N_hat = -qmul_chain(T, R, qinv(T))
    R_hat = -qmul_chain(qinv(rho_T), N, rho_T)
    surface = f.values + T
    f_hat = ImmersionField.from_values(
        grid, surface, fx=fx_hat, fy=fy_hat, normal=N_hat, name=f"D({f.name})"
    )
    dual_values = _node_values(dual, grid)
    f_hat_dual = None
    if dual_values is not None:
        f_hat_dual = ImmersionField.from_values(
            grid, dual_values + T_dual, fx=dual_fx_hat, fy=dual_fy_hat, normal=-R_hat,
            name=f"D({f.name})^d",
        )

    mask = phi.residual_mask() & ~singular
    scale = float(np.max(qnorm(f.fx)))
    ax, ay = (d[..., 0, :] for d in phi.quaternion_derivatives())
    bx, by = (d[..., 1, :] for d in phi.quaternion_derivatives())
    riccati = np.zeros(grid.shape)
    for aX, bX, fX, hatX in ((ax, bx, f.fx, fx_hat), (ay, by, f.fy, fy_hat)):
        dT = qmul(aX, inv_beta) - qmul_chain(T, bX, inv_beta)
        riccati = np.maximum(riccati, qnorm(dT + fX - hatX))
    residuals = {
        "riccati": _relative_max(riccati, mask, scale),
        "wedge": wedge_residual(fx_hat, fy_hat, dual_fx_hat, dual_fy_hat, mask)
        / max(float(np.max(qnorm(fx_hat[mask]) * qnorm(dual_fx_hat[mask]))), 1e-300),
    }
    if phi.connection is not None:
        residuals["parallel"] = phi.transport_residual()
    cmc_residual = cmc_condition(T_dual, N, rho_hat) if cmc else None
    if singular.any():
        logger.info("rho-Darboux transform has %d singular nodes", int(singular.sum()))
    logger.debug("rho-Darboux at rho=%s residuals %s", rho, residuals)
    return DarbouxResult(
        surface=f_hat,
        T=T,
        normal=N_hat,
        right_normal=R_hat,
        dual=f_hat_dual,
        T_dual=T_dual,
        rho_hat=rho_hat,
        singular=singular,
        cmc_residual=cmc_residual,
        residuals=residuals,
        kind="rho",
    )


def dual_section(
    phi: SectionField, rho: complex, dual: SurfaceLike, f: SurfaceLike
) -> SectionField:
    """phi^d = (beta rho^{-1}, alpha), parallel for the family of the dual."""
    inv = 1.0 / complex(rho)
    q = phi.quaternions()
    qx, qy = phi.quaternion_derivatives()

    def swap(v):
        return np.stack([right_complex(v[..., 1, :], inv), v[..., 0, :]], axis=-2)

    return SectionField.from_quaternions(
        phi.grid, swap(q), connection=IsothermicRho(dual, f, rho), dx=swap(qx), dy=swap(qy)
    )


def dual_darboux(
    f: ImmersionField, dual: ImmersionField, phi: SectionField, rho: complex
) -> DarbouxResult:
    """D_{phi^d, rho}(f^d); agrees with the tracked dual of D_{phi, rho}(f) up to translation."""
    result = rho_darboux(dual, f, dual_section(phi, rho, dual, f), rho)
    return replace(result, kind="dual")


def _mean_curvature_deviation(result: DarbouxResult) -> float:
    f_hat = result.surface
    grid = f_hat.grid
    N_hat = result.normal
    Nx = diff_x(N_hat, grid.hx)
    Ny = diff_y(N_hat, grid.hy, periodic=False)
    H = mean_curvature_from(f_hat.fx, N_hat, Nx, Ny)
    deviation = qnorm(H - from_real(1.0))
    return float(np.max(deviation[result.valid_mask & grid.interior_mask(seam=True)]))


def mu_darboux(f: ImmersionField, alpha: SectionField, mu) -> DarbouxResult:
    """The mu-Darboux transform f + alpha beta^{-1} of a CMC surface with H = 1.

    beta = (N alpha (a - 1) + alpha b) / 2, and the transform is taken with
    the parallel surface g = f + N as dual. Besides the rho-Darboux
    residuals this reports the CMC condition, the deviation of the mean
    curvature from 1 and the spread of the real part.

    Raises:
        DegenerateSpectral: mu in {0, 1}
    """
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    check_mu(sp)
    phi = isothermic_from_harmonic(f, alpha, sp)
    g = parallel_surface(f)
    result = rho_darboux(f, g, phi, sp.rho, cmc=True)
    mask = result.valid_mask
    re = qreal(result.values)[mask]
    residuals = dict(result.residuals)
    residuals["real_part"] = float(np.max(re) - np.min(re)) if re.size else 0.0
    residuals["mean_curvature"] = _mean_curvature_deviation(result)
    return replace(result, residuals=residuals, spectral=sp, kind="mu")


def conjugated_offset(
    f: ImmersionField, alpha: SectionField, sp: SpectralPoint, name: str
) -> ImmersionField:
    """f - alpha c alpha^{-1} with c = b / (a - 1), with exact partials."""
    c = sp.b_over_a_minus_one()
    a = alpha.alpha
    inv = qinv(a)
    offset = qmul(right_complex(a, c), inv)
    ax, ay = (d[..., 0, :] for d in alpha.quaternion_derivatives())

    def partial(fX, aX):
        return fX - qmul(right_complex(aX, c), inv) + qmul_chain(offset, aX, inv)

    return ImmersionField.from_values(
        f.grid, f.values - offset, fx=partial(f.fx, ax), fy=partial(f.fy, ay), is_r3=False,
        name=name,
    )


def g_mu_darboux(f: ImmersionField, alpha: SectionField, mu) -> ImmersionField:
    """Parallel surface g^mu = f - alpha (b / (a - 1)) alpha^{-1} of the mu-Darboux transform.

    Raises:
        DegenerateSpectral: mu in {0, 1}
    """
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    check_mu(sp)
    return conjugated_offset(f, alpha, sp, name=f"g^mu({f.name})")


def g_mu_residual(g_mu: ImmersionField, result: DarbouxResult) -> float:
    """max |g^mu - (f^mu + N^mu)| over the valid nodes of ``result``."""
    gap = qnorm(g_mu.values - (result.values + result.normal))
    return float(np.max(gap[result.valid_mask]))


def cw_darboux(f: ImmersionField, phi: SectionField, mu) -> DarbouxResult:
    """Darboux transform f + nu beta^{-1} for the conformal Gauss family.

    With alpha = N beta - beta b / (a - 1) the transform satisfies
    df^ = T dg alpha rho beta^{-1}; its right normal is
    -T_g N T_g^{-1} with T_g = beta rho^{-1} alpha^{-1}. The reported
    ``cmc_residual`` is |N^ - R^|, which vanishes exactly for mu-Darboux
    transforms (nu = alpha).

    Raises:
        DegenerateSpectral: mu in {0, 1}
        SingularEverywhere: beta vanishes identically
    """
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    check_mu(sp)
    nu, beta = phi.alpha, phi.beta
    if float(np.max(qnorm(beta))) < BETA_FLOOR:
        raise SingularEverywhere("beta vanishes at every node")
    N = f.normal()
    alpha = cw_alpha(N, beta, sp)
    g = parallel_surface(f)
    inv_beta = qinv(beta)
    T = qmul(nu, inv_beta)
    tail = qmul(right_complex(alpha, sp.rho), inv_beta)
    fx_hat = qmul_chain(T, g.fx, tail)
    fy_hat = qmul_chain(T, g.fy, tail)
    N_hat = qmul(fy_hat, qinv(fx_hat))
    T_g = qmul(right_complex(beta, 1.0 / sp.rho), qinv(alpha))
    R_hat = -qmul_chain(T_g, N, qinv(T_g))
    singular = singular_mask(nu, beta)
    f_hat = ImmersionField.from_values(
        f.grid, f.values + T, fx=fx_hat, fy=fy_hat, normal=N_hat, name=f"D^S({f.name})"
    )
    mask = f.grid.interior_mask() & ~singular
    scale = float(np.max(qnorm(fx_hat[mask]))) if np.any(mask) else 1.0
    harmonic = qnorm(fy_hat + qmul(fx_hat, R_hat)) + qnorm(-fx_hat + qmul(fy_hat, R_hat))
    offset = nu - alpha
    spread = qnorm(offset - offset[0, 0])
    residuals = {
        "harmonic": _relative_max(harmonic, mask, scale),
        "offset_spread": float(np.max(spread[mask])) if np.any(mask) else 0.0,
    }
    if phi.connection is not None:
        residuals["parallel"] = phi.transport_residual()
    logger.debug("conformal Gauss Darboux at mu=%s residuals %s", sp.mu, residuals)
    return DarbouxResult(
        surface=f_hat,
        T=T,
        normal=N_hat,
        right_normal=R_hat,
        singular=singular,
        cmc_residual=qnorm(N_hat - R_hat),
        residuals=residuals,
        spectral=sp,
        kind="cw",
    )


def _riccati_segments(
    f_model, d_model, r: float, starts: np.ndarray, ends: np.ndarray, T: np.ndarray, substeps: int
) -> np.ndarray:
    """RK4 for dT = -df + T df^d r T along a batch of straight segments."""
    delta = ends - starts
    h = 1.0 / substeps
    s = np.linspace(0.0, 1.0, 2 * substeps + 1)
    px = starts[:, 0, None] + s[None, :] * delta[:, 0, None]
    py = starts[:, 1, None] + s[None, :] * delta[:, 1, None]
    F = delta[:, 0, None, None] * f_model.fx(px, py) + delta[:, 1, None, None] * f_model.fy(px, py)
    D = r * (
        delta[:, 0, None, None] * d_model.fx(px, py)
        + delta[:, 1, None, None] * d_model.fy(px, py)
    )

    def rhs(state, k):
        return -F[:, k] + qmul_chain(state, D[:, k], state)

    state = T
    for k in range(substeps):
        k1 = rhs(state, 2 * k)
        k2 = rhs(state + 0.5 * h * k1, 2 * k + 1)
        k3 = rhs(state + 0.5 * h * k2, 2 * k + 1)
        k4 = rhs(state + h * k3, 2 * k + 2)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def _riccati_guard(T: np.ndarray, settings: TransportSettings, node) -> None:
    if not np.all(np.isfinite(T)) or float(np.max(qnorm(T))) > settings.blowup_guard:
        raise Blowup("Riccati solution exceeded the overflow guard", last_good_node=node)


def riccati_grid(
    f: ImmersionField,
    dual: SurfaceLike,
    r: float,
    T0: QuatLike,
    settings: TransportSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Solve the Riccati equation from (x_min, y_min): the x row first, then all columns."""
    grid = f.grid
    f_model, d_model = f.model, model_of(dual)
    xs, ys = grid.xs, grid.ys
    T = np.empty(grid.shape + (4,))
    T[0, 0] = as_quat(T0)
    for i in range(grid.nx - 1):
        start = np.array([[xs[i], ys[0]]])
        end = np.array([[xs[i + 1], ys[0]]])
        nxt = _riccati_segments(f_model, d_model, r, start, end, T[i : i + 1, 0], settings.substeps)
        _riccati_guard(nxt, settings, (i, 0))
        T[i + 1, 0] = nxt[0]
    starts = np.stack([xs, np.full_like(xs, ys[0])], axis=-1)
    for j in range(1, grid.ny):
        ends = np.stack([xs, np.full_like(xs, ys[j])], axis=-1)
        nxt = _riccati_segments(f_model, d_model, r, starts, ends, T[:, j - 1], settings.substeps)
        _riccati_guard(nxt, settings, (0, j - 1))
        T[:, j] = nxt
        starts = ends
    return T


def classical_darboux_riccati(
    f: ImmersionField,
    dual: SurfaceLike,
    r: float,
    T0: QuatLike,
    settings: TransportSettings = DEFAULT_SETTINGS,
    cmc: bool = False,
) -> DarbouxResult:
    """Classical Darboux transform f + T from the Riccati equation dT = -df + T df^d r T.

    Raises:
        ValueError: r = 0 or T0 = 0
        Blowup: the solution exceeds the overflow guard
    """
    r = float(r)
    if r == 0.0:
        raise ValueError("the classical spectral parameter must be nonzero")
    if not np.any(as_quat(T0)):
        raise ValueError("initial value T0 must be nonzero")
    grid = f.grid
    T = riccati_grid(f, dual, r, T0, settings)
    singular = singular_mask(T)
    dx, dy = _node_partials(dual, grid)
    fx_hat = r * qmul_chain(T, dx, T)
    fy_hat = r * qmul_chain(T, dy, T)
    inv_T = qinv(T)
    T_dual = inv_T / r
    dual_fx_hat = r * qmul_chain(T_dual, f.fx, T_dual)
    dual_fy_hat = r * qmul_chain(T_dual, f.fy, T_dual)
    N, R = f.normal(), _right_normal(f)
    N_hat = -qmul_chain(T, R, inv_T)
    R_hat = -qmul_chain(inv_T, N, T)
    f_hat = ImmersionField.from_values(
        grid, f.values + T, fx=fx_hat, fy=fy_hat, normal=N_hat, name=f"D_r({f.name})"
    )
    dual_values = _node_values(dual, grid)
    f_hat_dual = None
    if dual_values is not None:
        f_hat_dual = ImmersionField.from_values(
            grid, dual_values + T_dual, fx=dual_fx_hat, fy=dual_fy_hat, normal=-R_hat,
            name=f"D_r({f.name})^d",
        )
    # T is not periodic in y; difference it one-sided and keep clear of the seam
    mask = grid.interior_mask(seam=True) & ~singular
    Tx = diff_x(T, grid.hx)
    Ty = diff_y(T, grid.hy, periodic=False)
    riccati = np.maximum(qnorm(Tx + f.fx - fx_hat), qnorm(Ty + f.fy - fy_hat))
    residuals = {
        "riccati": _relative_max(riccati, mask, float(np.max(qnorm(f.fx)))),
        "wedge": wedge_residual(fx_hat, fy_hat, dual_fx_hat, dual_fy_hat, mask)
        / max(float(np.max(qnorm(fx_hat[mask]) * qnorm(dual_fx_hat[mask]))), 1e-300),
    }
    rho_hat = np.broadcast_to(from_real(r), T.shape)
    return DarbouxResult(
        surface=f_hat,
        T=T,
        normal=N_hat,
        right_normal=R_hat,
        dual=f_hat_dual,
        T_dual=T_dual,
        rho_hat=rho_hat,
        singular=singular,
        cmc_residual=cmc_condition(T_dual, N, rho_hat) if cmc else None,
        residuals=residuals,
        kind="classical",
    )
