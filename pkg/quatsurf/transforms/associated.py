"""Associated families: Calapso / Lawson transforms, Sym-Bobenko and their limits.

Spectral families of sections are passed as callables ``t -> alpha(t)``
returning node quaternions of a d^N_{e^{it}}-parallel section. They are
normalized to alpha(t)(base) = 1 by a constant right factor, which keeps
them parallel because a and b are real on the unit circle.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..connections.flatness import fit_order
from ..connections.transport import SectionField
from ..core.hmatrix import hmat_det
from ..core.quaternion import qinv, qmul, qmul_chain, qnorm, qnorm2, qreal
from ..core.spectral import spectral_point_from_mu
from ..errors import Dependent, NotSmooth
from ..surfaces.immersion import ImmersionField
from ..surfaces.models import mean_curvature_from
from .correspondence import check_mu, harmonic_term
from .results import nodes_of, singular_mask

logger = logging.getLogger(__name__)

SectionFamily = Callable[[float], np.ndarray]

DEPENDENCE_TOL = 1e-10
DEFAULT_DELTA = 1e-4
SMOOTHNESS_TOL = 1e-6
DEFAULT_TS: Tuple[float, ...] = (0.5, 0.25, 0.125, 0.01)


@dataclass(frozen=True)
class AssociatedSurface:
    """Associated-family member f^Phi together with its sphere data.

    ``sphere_mean_curvature`` is Re(f^Phi H^Phi) / radius per node, the mean
    curvature inside the sphere of that radius when f^Phi lies on it.
    """

    surface: ImmersionField
    radius: float
    radius_spread: float
    sphere_mean_curvature: np.ndarray
    singular: np.ndarray

    @property
    def valid_mask(self) -> np.ndarray:
        return self.surface.grid.interior_mask() & ~self.singular

    def mean_curvature_value(self) -> float:
        return float(np.mean(self.sphere_mean_curvature[self.valid_mask]))

    def mean_curvature_spread(self) -> float:
        h = self.sphere_mean_curvature[self.valid_mask]
        return float(np.max(h) - np.min(h))

    def as_dict(self) -> dict:
        return {
            "radius": self.radius,
            "radius_spread": self.radius_spread,
            "sphere_mean_curvature": self.mean_curvature_value(),
            "sphere_mean_curvature_spread": self.mean_curvature_spread(),
            "singular_nodes": [list(n) for n in nodes_of(self.singular)],
        }


@dataclass(frozen=True)
class LimitReport:
    """Distances between a one-parameter family and its limit surface."""

    ts: List[float]
    errors: List[float]
    fitted_order: float
    limit: ImmersionField = field(repr=False)

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    def as_dict(self) -> dict:
        order = self.fitted_order if math.isfinite(self.fitted_order) else "inf"
        return {"t": list(self.ts), "errors": list(self.errors), "fitted_order": order,
                "monotone": self.monotone}


def _sphere_data(
    surface: ImmersionField, normal, normal_dx, normal_dy, singular
) -> AssociatedSurface:
    H = mean_curvature_from(surface.fx, normal, normal_dx, normal_dy)
    mask = surface.grid.interior_mask() & ~singular
    norms = qnorm(surface.values)[mask]
    radius = float(np.mean(norms))
    h_sphere = qreal(qmul(surface.values, H)) / radius
    return AssociatedSurface(
        surface=surface,
        radius=radius,
        radius_spread=float(np.std(norms)),
        sphere_mean_curvature=h_sphere,
        singular=singular,
    )


def calapso(
    f: ImmersionField, phi1: SectionField, phi2: SectionField, r: float
) -> AssociatedSurface:
    """f^Phi = -alpha1^{-1} alpha2 for d_r-parallel sections in the frame of f.

    df^Phi = alpha1^{-1} df (beta2 - beta1 alpha1^{-1} alpha2), and the
    Gauss map is alpha1^{-1} N alpha1.

    Raises:
        ValueError: r = 0
        Dependent: the sections are quaternionically dependent at a node
    """
    if float(r) == 0.0:
        raise ValueError("the associated family is not defined at r = 0")
    a1, b1, a2, b2 = phi1.alpha, phi1.beta, phi2.alpha, phi2.beta
    m = np.stack([np.stack([a1, a2], axis=-2), np.stack([b1, b2], axis=-2)], axis=-3)
    scale = (qnorm2(a1) + qnorm2(b1)) * (qnorm2(a2) + qnorm2(b2))
    bad = hmat_det(m) / np.maximum(scale, 1e-300) ** 2 < DEPENDENCE_TOL
    if bad.any():
        raise Dependent("sections defining the associated surface are dependent", nodes_of(bad))
    singular = singular_mask(a1)
    inv = qinv(a1)
    values = -qmul(inv, a2)
    tail = b2 - qmul_chain(b1, inv, a2)
    N = f.normal()
    Nx, Ny = f.normal_derivatives()
    normal = qmul_chain(inv, N, a1)
    partials, normal_partials = [], []
    alpha_partials = (d[..., 0, :] for d in phi1.quaternion_derivatives())
    for fX, NX, aX in zip((f.fx, f.fy), (Nx, Ny), alpha_partials):
        partials.append(qmul_chain(inv, fX, tail))
        K = qmul(inv, aX)
        normal_partials.append(qmul_chain(inv, NX, a1) + qmul(normal, K) - qmul(K, normal))
    surface = ImmersionField.from_values(
        f.grid, values, fx=partials[0], fy=partials[1], normal=normal, name=f"T_r({f.name})"
    )
    return _sphere_data(surface, normal, normal_partials[0], normal_partials[1], singular)


def lawson(
    f: ImmersionField,
    alpha_plus: SectionField,
    alpha_minus: SectionField,
    r: float,
    normalize: bool = True,
    base: Tuple[int, int] = (0, 0),
) -> AssociatedSurface:
    """Lawson correspondence of a CMC surface: the Calapso transform at r in (0, 1).

    ``alpha_plus`` and ``alpha_minus`` are d^N-parallel for mu = a +- i b
    with a = 1 - 2r, b = 2 sqrt(r(1 - r)). With ``normalize`` the minus
    section is rescaled so the sphere radius is 1/b, which puts the mean
    curvature in the sphere at 1 - 2r.
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError("the Lawson correspondence needs r in (0, 1)")
    a, b = 1.0 - 2.0 * r, 2.0 * math.sqrt(r * (1.0 - r))
    N = f.normal()
    Nx, Ny = f.normal_derivatives()
    if normalize:
        i, j = base
        current = float(qnorm(alpha_minus.alpha[i, j]) / qnorm(alpha_plus.alpha[i, j]))
        alpha_minus = alpha_minus.scaled((1.0 / b) / current)

    def isothermic(section: SectionField, sign: float) -> SectionField:
        al = section.alpha
        ax, ay = (d[..., 0, :] for d in section.quaternion_derivatives())

        def beta_of(av, nv_al):
            return 0.5 * (nv_al * (a - 1.0) + sign * b * av)

        beta = beta_of(al, qmul(N, al))
        bx = beta_of(ax, qmul(Nx, al) + qmul(N, ax))
        by = beta_of(ay, qmul(Ny, al) + qmul(N, ay))
        return SectionField.from_quaternions(
            f.grid,
            np.stack([al, beta], axis=-2),
            dx=np.stack([ax, bx], axis=-2),
            dy=np.stack([ay, by], axis=-2),
        )

    return calapso(f, isothermic(alpha_plus, 1.0), isothermic(alpha_minus, -1.0), r)


def cw_assoc(f: ImmersionField, alpha: SectionField, mu) -> AssociatedSurface:
    """Constrained Willmore associated surface -alpha in the sphere of radius |alpha|.

    Raises:
        DegenerateSpectral: mu = 1, where alpha is constant
    """
    sp = spectral_point_from_mu(mu)
    check_mu(sp)
    if not sp.on_unit_circle:
        raise ValueError("the constrained Willmore associated family needs |mu| = 1")
    al = alpha.alpha
    ax, ay = (d[..., 0, :] for d in alpha.quaternion_derivatives())
    N = f.normal()
    Nx, Ny = f.normal_derivatives()
    surface = ImmersionField.from_values(
        f.grid, -al, fx=-ax, fy=-ay, normal=N, name=f"A_S({f.name})"
    )
    return _sphere_data(surface, N, Nx, Ny, singular_mask(al))


def _base_node(f: ImmersionField, base: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    return (f.grid.nx // 2, f.grid.ny // 2) if base is None else base


def normalized_family(family: SectionFamily, base: Tuple[int, int]) -> SectionFamily:
    """t -> alpha(t) alpha(t)(base)^{-1}."""
    i, j = base

    def alpha(t: float) -> np.ndarray:
        values = family(t)
        return qmul(values, qinv(values[i, j]))

    return alpha


def sym_bobenko(
    f: ImmersionField,
    family: SectionFamily,
    s: float,
    delta: float = DEFAULT_DELTA,
    tol: float = SMOOTHNESS_TOL,
    base: Optional[Tuple[int, int]] = None,
) -> ImmersionField:
    """f^alpha = -2 alpha^{-1} d alpha / dt at t = s, vanishing at ``base``.

    The t-derivative is a Richardson-extrapolated central difference.

    Raises:
        NotSmooth: the differences at delta and delta/2 disagree beyond ``tol``
    """
    base = _base_node(f, base)
    fam = normalized_family(family, base)

    def central(h: float) -> np.ndarray:
        return (fam(s + h) - fam(s - h)) / (2.0 * h)

    coarse, fine = central(delta), central(0.5 * delta)
    size = max(float(np.max(qnorm(fine))), 1e-300)
    disagreement = float(np.max(qnorm(coarse - fine))) / size
    if disagreement > tol:
        raise NotSmooth(f"t-derivative unstable at s = {s}", disagreement)
    alpha = fam(s)
    dalpha = (4.0 * fine - coarse) / 3.0
    inv = qinv(alpha)
    values = -2.0 * qmul(inv, dalpha)

    a, b = math.cos(s), math.sin(s)
    da, db = -math.sin(s), math.cos(s)
    N = f.normal()
    partials = []
    for fX in (f.fx, f.fy):
        aX = -0.5 * qmul(fX, qmul(N, alpha) * (a - 1.0) + alpha * b)
        daX = -0.5 * qmul(
            fX, qmul(N, dalpha) * (a - 1.0) + dalpha * b + qmul(N, alpha) * da + alpha * db
        )
        partials.append(2.0 * qmul_chain(inv, aX, inv, dalpha) - 2.0 * qmul(inv, daX))
    normal = qmul_chain(inv, N, alpha)
    logger.debug("Sym-Bobenko surface at s=%.6g, derivative disagreement %.3e", s, disagreement)
    return ImmersionField.from_values(
        f.grid, values, fx=partials[0], fy=partials[1], normal=normal, name=f"A_N({f.name})"
    )


def _limit_report(
    f: ImmersionField, family: SectionFamily, s: float, ts: Sequence[float], base, member
) -> LimitReport:
    base = _base_node(f, base)
    limit = sym_bobenko(f, family, s, base=base)
    fam = normalized_family(family, base)
    mask = f.grid.interior_mask()
    errors = []
    for t in ts:
        approx = member(fam, float(t))
        errors.append(float(np.max(qnorm(approx - limit.values)[mask])))
    order = fit_order(ts, errors)
    logger.info("limit errors %s, fitted order %.2f", ["%.3e" % e for e in errors], order)
    return LimitReport(ts=[float(t) for t in ts], errors=errors, fitted_order=order, limit=limit)


def limit_isothermic_family(
    f: ImmersionField,
    family: SectionFamily,
    s: float,
    ts: Sequence[float] = DEFAULT_TS,
    base: Optional[Tuple[int, int]] = None,
) -> LimitReport:
    """Calapso transforms built from phi1 = phi+ and phi2 = (phi+ - phi-)/t approaching f^alpha.

    phi+- are the d_r-parallel lifts (alpha, beta) of alpha(s +- t), with
    beta = (N alpha (a - 1) + alpha b) / 2 at mu = e^{i(s +- t)}. Each
    member is :func:`calapso` of (phi1, phi2).
    """
    N = f.normal()

    def lift(fam, t: float) -> Tuple[np.ndarray, np.ndarray]:
        sp = spectral_point_from_mu(cmath.exp(1j * t))
        alpha = fam(t)
        return alpha, harmonic_term(N, alpha, sp)

    def member(fam, t):
        (a_plus, b_plus), (a_minus, b_minus) = lift(fam, s + t), lift(fam, s - t)
        phi1 = SectionField.from_quaternions(f.grid, np.stack([a_plus, b_plus], axis=-2))
        phi2 = SectionField.from_quaternions(
            f.grid, np.stack([a_plus - a_minus, b_plus - b_minus], axis=-2) / t
        )
        r = 0.5 * (1.0 - math.cos(s + t))
        return calapso(f, phi1, phi2, r).surface.values

    return _limit_report(f, family, s, ts, base, member)


def cw_limit(
    f: ImmersionField,
    family: SectionFamily,
    s: float,
    ts: Sequence[float] = DEFAULT_TS,
    base: Optional[Tuple[int, int]] = None,
) -> LimitReport:
    """(2/t)(1 - alpha(s)^{-1} alpha(s + t)) approaching the Sym-Bobenko surface."""

    def member(fam, t):
        alpha = fam(s)
        return (2.0 / t) * (np.array([1.0, 0.0, 0.0, 0.0]) - qmul(qinv(alpha), fam(s + t)))

    return _limit_report(f, family, s, ts, base, member)

