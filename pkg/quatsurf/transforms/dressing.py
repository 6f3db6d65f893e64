"""Simple factor dressing of isothermic, CMC and constrained Willmore surfaces.

Everything here works in the affine frame of H^2: a section (alpha, beta)
in the frame of f becomes phi^ = (alpha + f beta, beta), the surface is the
line spanned by psi = (f, 1), and the isothermic family reads d + lam eta
with

    eta = [[f df^d, -f df^d f], [df^d, -df^d f]].

Matrices on C^4 act on the complexification of H^2 (see ``to_vector``).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from ..connections.transport import SectionField
from ..core.hmatrix import hmat_apply, hmat_complexify, hmat_inv_array, hmat_mul
from ..core.quaternion import (
    QuatLike,
    as_quat,
    from_complex,
    from_real,
    from_vector,
    qinv,
    qmul,
    qmul_chain,
    qnorm,
    right_j,
    to_vector,
)
from ..core.spectral import SpectralPoint, spectral_point_from_mu
from ..errors import Singular, SplittingDegenerate
from ..surfaces.differences import diff_x, diff_y
from ..surfaces.immersion import ImmersionField
from .correspondence import check_mu, harmonic_term
from .darboux import _node_partials, conjugated_offset
from .results import DressingMatrix, nodes_of

logger = logging.getLogger(__name__)

COND_BOUND = 1e10
DEFAULT_LAMBDAS: Tuple[complex, ...] = (0.3 + 0.2j, -1.5 + 0.0j, 2.0j)


def _pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return to_vector(np.stack([a, b], axis=-2))


def _with_j(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return _pair(a, b), _pair(right_j(a), right_j(b))


def _checked_inverse(B: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(B)
    bad = ~np.isfinite(cond) | (cond > COND_BOUND)
    if bad.any():
        raise SplittingDegenerate(f"{what} is not a direct sum at some nodes", nodes_of(bad))
    return np.linalg.inv(B)


def _affine(vec: np.ndarray) -> np.ndarray:
    q = from_vector(vec)
    return qmul(q[..., 0, :], qinv(q[..., 1, :]))


def _image_affine(m: np.ndarray) -> np.ndarray:
    """Affine coordinate of the quaternionic line spanned by the image of ``m``."""
    u, _, _ = np.linalg.svd(m)
    candidates = [from_vector(u[..., :, k]) for k in (0, 1)]
    weight = [qnorm(c[..., 1, :]) for c in candidates]
    pick = (weight[0] >= weight[1])[..., None]
    chosen = np.where(pick[..., None], candidates[0], candidates[1])
    return qmul(chosen[..., 0, :], qinv(chosen[..., 1, :]))


def eta_matrices(
    f: ImmersionField, dx: np.ndarray, dy: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Complexified eta_x, eta_y at the nodes."""
    out = []
    fv = f.values
    for d in (dx, dy):
        m = np.stack(
            [
                np.stack([qmul(fv, d), -qmul_chain(fv, d, fv)], axis=-2),
                np.stack([d, -qmul(d, fv)], axis=-2),
            ],
            axis=-3,
        )
        out.append(hmat_complexify(m))
    return out[0], out[1]


def _projection_derivative(B, B_inv, BX, weights) -> np.ndarray:
    """d(B diag(w) B^{-1}) for constant weights."""
    D = np.diag(weights)
    P = B @ D @ B_inv
    return BX @ D @ B_inv - P @ BX @ B_inv


@dataclass(frozen=True)
class DressingResult:
    """Dressing matrix, dressed surface and the numerical checks of the dressed family."""

    matrix: DressingMatrix
    surface: ImmersionField
    eta_hat: Tuple[np.ndarray, np.ndarray]
    checks: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        rho = complex(self.matrix.rho)
        return {"rho": [rho.real, rho.imag], "kind": self.matrix.kind, "checks": dict(self.checks)}


def sfd_isothermic(
    f: ImmersionField,
    dual: ImmersionField,
    phi: SectionField,
    rho: complex,
    lambdas: Sequence[complex] = DEFAULT_LAMBDAS,
) -> DressingResult:
    """Simple factor dressing by E = phi C.

    r(lam) = pi_E gamma(lam) + pi_Ej + pi_L sigma(lam). The dressed
    connection r d_lam r^{-1} is checked against d + lam eta^ at each
    sample ``lambdas`` and eta^ against the retraction-form conditions.

    Raises:
        SplittingDegenerate: C^4 = E + Ej + L fails at some node
    """
    rho = complex(rho)
    grid = f.grid
    alpha, beta = phi.alpha, phi.beta
    bx, by = (d[..., 1, :] for d in phi.quaternion_derivatives())
    fv = f.values
    one = np.broadcast_to(from_real(1.0), fv.shape)
    zero = np.zeros_like(fv)
    hat, hat_j = _with_j(alpha + qmul(fv, beta), beta)
    psi, psi_j = _with_j(fv, one)
    B = np.stack([hat, hat_j, psi, psi_j], axis=-1)
    B_inv = _checked_inverse(B, "E + Ej + L")
    derivs = []
    for fX, bX in ((f.fx, bx), (f.fy, by)):
        dh, dh_j = _with_j(qmul(fv, bX), bX)
        dp, dp_j = _with_j(fX, zero)
        derivs.append(np.stack([dh, dh_j, dp, dp_j], axis=-1))
    matrix = DressingMatrix(rho=rho, basis=B, basis_inv=B_inv, kind="E")

    dX, dY = _node_partials(dual, grid)
    eta = eta_matrices(f, dX, dY)
    P_E = B @ np.diag([1.0, 0, 0, 0]).astype(complex) @ B_inv
    P_Ej = B @ np.diag([0, 1.0, 0, 0]).astype(complex) @ B_inv
    eta_hat = []
    for BX in derivs:
        dPL = _projection_derivative(B, B_inv, BX, np.array([0, 0, 1.0, 1.0], dtype=complex))
        eta_hat.append(-(P_E @ dPL / rho + P_Ej @ dPL / rho.conjugate()))

    mask = grid.interior_mask()
    scale = max(
        float(np.max(np.abs(eta_hat[0][mask]))), float(np.max(np.abs(eta_hat[1][mask]))), 1e-300
    )
    gauge_gap = 0.0
    for lam in lambdas:
        w = matrix.weights(lam)
        r = matrix(lam)
        r_inv = B @ np.diag(1.0 / w) @ B_inv
        for BX, eX, hX in zip(derivs, eta, eta_hat):
            d_r_inv = _projection_derivative(B, B_inv, BX, 1.0 / w)
            omega = r @ d_r_inv + lam * (r @ eX @ r_inv)
            gap = np.abs(omega - lam * hX).max(axis=(-2, -1))
            gauge_gap = max(gauge_gap, float(np.max(gap[mask])) / (abs(lam) * scale))
    hx, hy = eta_hat
    square = np.abs(hx @ hy - hy @ hx).max(axis=(-2, -1))
    # projections onto span(phi) repeat across the seam only for multiplier sections
    periodic = grid.periodic_y and phi.has_multiplier
    curl_mask = mask if periodic else grid.interior_mask(seam=True)
    curl = np.abs(diff_x(hy, grid.hx) - diff_y(hx, grid.hy, periodic)).max(axis=(-2, -1))
    anchor = np.abs(matrix(0.0) - np.eye(4)).max(axis=(-2, -1))

    values = _image_affine(matrix.at_infinity())
    surface = ImmersionField.from_values(grid, values, name=f"sfd({f.name})")
    darboux = qnorm(values - (fv + qmul(alpha, qinv(beta))))
    checks = {
        "gauge": gauge_gap,
        "eta_square": float(np.max(square[mask])) / scale**2,
        "eta_closed": float(np.max(curl[curl_mask])) / scale,
        "anchor": float(np.max(anchor)),
        "darboux_gap": float(np.max(darboux[mask])),
    }
    logger.debug("simple factor dressing at rho=%s checks %s", rho, checks)
    return DressingResult(matrix=matrix, surface=surface, eta_hat=(hx, hy), checks=checks)


def sfd_two_step(
    f: ImmersionField, phi1: SectionField, phi2: SectionField, rho: complex
) -> ImmersionField:
    """Two-step dressing by W = span(phi1, phi2): f^ from r_W(inf) psi.

    For real rho the dressing is the identity and f comes back unchanged.

    Raises:
        SplittingDegenerate: W + Wj is not all of C^4 at some node
    """
    rho = complex(rho)
    if abs(rho.imag) < 1e-14:
        return f
    fv = f.values
    one = np.broadcast_to(from_real(1.0), fv.shape)
    h1, h1_j = _with_j(phi1.alpha + qmul(fv, phi1.beta), phi1.beta)
    h2, h2_j = _with_j(phi2.alpha + qmul(fv, phi2.beta), phi2.beta)
    B = np.stack([h1, h2, h1_j, h2_j], axis=-1)
    matrix = DressingMatrix(rho=rho, basis=B, basis_inv=_checked_inverse(B, "W + Wj"), kind="W")
    image = np.einsum("...ij,...j->...i", matrix.at_infinity(), _pair(fv, one))
    return ImmersionField.from_values(f.grid, _affine(image), name=f"sfd2({f.name})")


def cmc_sfd(f: ImmersionField, alpha: SectionField, mu) -> ImmersionField:
    """CMC simple factor dressing f - alpha (b / (a - 1)) alpha^{-1}.

    Raises:
        DegenerateSpectral: mu in {0, 1}
    """
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    check_mu(sp)
    return conjugated_offset(f, alpha, sp, name=f"sfd_mu({f.name})")


def cw_sfd(
    f: ImmersionField, alpha: SectionField, mu, n: QuatLike = (1.0, 0.0, 0.0, 0.0)
) -> ImmersionField:
    """Conformal Gauss simple factor dressing by W = span(e n, phi).

    The dressed line is (S + Phi c Phi^{-1}) L with c = b / (a - 1),
    S = F [[N, 0], [1, -N]] F^{-1} and Phi = F [[n, alpha], [0, beta]].

    Raises:
        DegenerateSpectral: mu in {0, 1}
        SplittingDegenerate: Phi is not invertible at some node
    """
    sp = mu if isinstance(mu, SpectralPoint) else spectral_point_from_mu(mu)
    check_mu(sp)
    N = f.normal()
    fv = f.values
    a = alpha.alpha
    beta = harmonic_term(N, a, sp)
    one = np.broadcast_to(from_real(1.0), fv.shape)
    zero = np.zeros_like(fv)
    nq = np.broadcast_to(as_quat(n), fv.shape)

    def hm(m00, m01, m10, m11):
        return np.stack([np.stack([m00, m01], axis=-2), np.stack([m10, m11], axis=-2)], axis=-3)

    F = hm(one, fv, zero, one)
    F_inv = hm(one, -fv, zero, one)
    S = hmat_mul(hmat_mul(F, hm(N, zero, one, -N)), F_inv)
    Phi = hmat_mul(F, hm(nq, a, zero, beta))
    try:
        Phi_inv = hmat_inv_array(Phi)
    except Singular as exc:
        raise SplittingDegenerate(f"e n and phi do not span a rank-2 bundle: {exc}") from exc
    c = np.broadcast_to(from_complex(sp.b_over_a_minus_one()), fv.shape)
    C = hm(c, zero, zero, c)
    M = S + hmat_mul(hmat_mul(Phi, C), Phi_inv)
    image = hmat_apply(M, np.stack([fv, one], axis=-2))
    values = qmul(image[..., 0, :], qinv(image[..., 1, :]))
    return ImmersionField.from_values(f.grid, values, name=f"sfd_S({f.name})")
