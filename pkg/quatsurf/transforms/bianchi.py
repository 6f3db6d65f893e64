"""Bianchi permutability: the common Darboux transform of two Darboux transforms."""

import logging

import numpy as np

from ..connections.transport import SectionField
from ..core.hmatrix import hmat_det
from ..core.quaternion import from_complex, qinv, qmul, qmul_chain, qnorm, qnorm2, right_complex
from ..errors import NotIndependent
from ..surfaces.differences import diff_x, diff_y
from ..surfaces.immersion import ImmersionField, wedge_residual
from .darboux import cmc_condition, rho_darboux
from .results import DarbouxResult, nodes_of, singular_mask

logger = logging.getLogger(__name__)

INDEPENDENCE_TOL = 1e-10


def _check_independent(a1, b1, a2, b2) -> None:
    m = np.stack([np.stack([a1, a2], axis=-2), np.stack([b1, b2], axis=-2)], axis=-3)
    scale = (qnorm2(a1) + qnorm2(b1)) * (qnorm2(a2) + qnorm2(b2))
    ratio = hmat_det(m) / np.maximum(scale, 1e-300) ** 2
    bad = ratio < INDEPENDENCE_TOL
    if bad.any():
        raise NotIndependent("sections are quaternionically dependent", nodes_of(bad))


def _common_values(f_values, a1, b1, rho1, a2, b2, rho2) -> np.ndarray:
    """f + (alpha2 - alpha1 chi)(beta2 - beta1 chi)^{-1}.

    chi = rho1^{-1} alpha1^{-1} alpha2 rho2.
    """
    chi = qmul_chain(from_complex(1.0 / complex(rho1)), qinv(a1), right_complex(a2, rho2))
    return f_values + qmul(a2 - qmul(a1, chi), qinv(b2 - qmul(b1, chi)))


def _common_section_partials(a1, b1, a2, b2, rho1, rho2, d1, d2):
    """Product-rule partials of alpha~ and beta~ from the partials of both sections."""
    (da1, db1), (da2, db2) = d1, d2
    inv_a1, inv_b1 = qinv(a1), qinv(b1)
    d_ta = (
        da2
        - qmul_chain(da1, inv_b1, b2)
        + qmul_chain(a1, inv_b1, db1, inv_b1, b2)
        - qmul_chain(a1, inv_b1, db2)
    )
    c = from_complex(1.0 / complex(rho1))
    a2_rho = right_complex(a2, rho2)
    chi = qmul_chain(c, inv_a1, a2_rho)
    d_chi = qmul(
        c, qmul(inv_a1, right_complex(da2, rho2)) - qmul_chain(inv_a1, da1, inv_a1, a2_rho)
    )
    d_tb = db2 - qmul(db1, chi) - qmul(b1, d_chi)
    return d_ta, d_tb


def bianchi_common(
    f: ImmersionField,
    dual: ImmersionField,
    phi1: SectionField,
    rho1: complex,
    phi2: SectionField,
    rho2: complex,
    cmc: bool = False,
) -> DarbouxResult:
    """Common rho2-Darboux transform of f1 = D_{phi1, rho1}(f) and rho1-transform of f2.

    In the frame of f1 the transform comes from

        alpha~ = alpha2 - alpha1 beta1^{-1} beta2,   beta~ = beta2 - beta1 chi,

    a d_{rho2}-parallel section for f1. ``residuals`` reports how far
    (alpha~, beta~) is from parallel and how far the result moves when the
    two sections swap roles.

    Raises:
        NotIndependent: phi1 and phi2 are quaternionically dependent at a node
    """
    grid = f.grid
    a1, b1, a2, b2 = phi1.alpha, phi1.beta, phi2.alpha, phi2.beta
    _check_independent(a1, b1, a2, b2)
    first = rho_darboux(f, dual, phi1, rho1)
    f1, f1_dual = first.surface, first.dual
    if f1_dual is None:
        raise ValueError("the dual surface needs node values to track the first transform")

    chi = qmul_chain(from_complex(1.0 / complex(rho1)), qinv(a1), right_complex(a2, rho2))
    ta = a2 - qmul_chain(a1, qinv(b1), b2)
    tb = b2 - qmul(b1, chi)
    T = qmul(ta, qinv(tb))
    ta_rho = right_complex(ta, rho2)
    rho_hat = qmul(ta_rho, qinv(ta))
    rho_T = qmul(ta_rho, qinv(tb))
    fx_hat = qmul_chain(T, f1_dual.fx, rho_T)
    fy_hat = qmul_chain(T, f1_dual.fy, rho_T)
    T_dual = qmul(right_complex(tb, 1.0 / complex(rho2)), qinv(ta))
    tail = qmul(tb, qinv(ta))
    dual_fx_hat = qmul_chain(T_dual, f1.fx, tail)
    dual_fy_hat = qmul_chain(T_dual, f1.fy, tail)
    N1, R1 = first.normal, first.right_normal
    N_hat = -qmul_chain(T, R1, qinv(T))
    R_hat = -qmul_chain(qinv(rho_T), N1, rho_T)

    singular = singular_mask(ta, tb) | first.singular
    surface = ImmersionField.from_values(
        grid, f1.values + T, fx=fx_hat, fy=fy_hat, normal=N_hat, name=f"B({f.name})"
    )
    f_hat_dual = ImmersionField.from_values(
        grid, f1_dual.values + T_dual, fx=dual_fx_hat, fy=dual_fy_hat, normal=-R_hat,
        name=f"B({f.name})^d",
    )

    mask = grid.interior_mask() & ~singular
    swapped = _common_values(f.values, a2, b2, rho2, a1, b1, rho1)
    direct = _common_values(f.values, a1, b1, rho1, a2, b2, rho2)
    scale = max(float(np.max(qnorm(direct[mask]))), 1.0) if mask.any() else 1.0
    parallel_mask = mask
    if all(p.dx is not None and p.dy is not None for p in (phi1, phi2)):
        q1, q2 = phi1.quaternion_derivatives(), phi2.quaternion_derivatives()
        partials = [
            _common_section_partials(
                a1, b1, a2, b2, rho1, rho2, (q1X[..., 0, :], q1X[..., 1, :]),
                (q2X[..., 0, :], q2X[..., 1, :]),
            )
            for q1X, q2X in zip(q1, q2)
        ]
    else:
        # alpha~ and beta~ mix two multipliers and jump across the seam
        parallel_mask = grid.interior_mask(seam=True) & ~singular
        partials = [
            (diff_x(ta, grid.hx), diff_x(tb, grid.hx)),
            (diff_y(ta, grid.hy, periodic=False), diff_y(tb, grid.hy, periodic=False)),
        ]
    parallel = np.zeros(grid.shape)
    size = np.sqrt(qnorm2(ta) + qnorm2(tb))
    for (d_ta, d_tb), f1X, d1X in zip(partials, (f1.fx, f1.fy), (f1_dual.fx, f1_dual.fy)):
        res_a = qnorm(d_ta + qmul(f1X, tb))
        res_b = qnorm(d_tb + qmul(d1X, ta_rho))
        parallel = np.maximum(parallel, (res_a + res_b) / np.maximum(size, 1e-300))
    residuals = {
        "parallel_f1": (
            float(np.max(parallel[parallel_mask])) if parallel_mask.any() else 0.0
        ),
        "symmetry": float(np.max(qnorm(direct - swapped)[mask])) / scale if mask.any() else 0.0,
        "frames": (
            float(np.max(qnorm(direct - surface.values)[mask])) / scale if mask.any() else 0.0
        ),
        "wedge": wedge_residual(fx_hat, fy_hat, dual_fx_hat, dual_fy_hat, mask)
        / max(float(np.max(qnorm(fx_hat[mask]) * qnorm(dual_fx_hat[mask]))), 1e-300),
    }
    logger.debug("common transform residuals %s", residuals)
    return DarbouxResult(
        surface=surface,
        T=T,
        normal=N_hat,
        right_normal=R_hat,
        dual=f_hat_dual,
        T_dual=T_dual,
        rho_hat=rho_hat,
        singular=singular,
        cmc_residual=cmc_condition(T_dual, N1, rho_hat) if cmc else None,
        residuals=residuals,
        kind="bianchi",
    )
