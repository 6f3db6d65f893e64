"""Period monodromy along the periodic y direction."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import DefectiveMonodromy
from ..surfaces.grid import DomainGrid
from .base import Connection, ConnectionKind
from .transport import DEFAULT_SETTINGS, TransportSettings, rk4_segments

logger = logging.getLogger(__name__)

RESONANCE_TOL = 1e-8


@dataclass(frozen=True)
class MonodromyResult:
    """Monodromy of the canonical frame at (x0, y_min) over one y period."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    multipliers: Tuple[complex, complex]
    resonance: bool
    loop_residual: float
    x0: float

    def eigen_section(self, index: int) -> np.ndarray:
        """Initial value of the eigen-section for ``eigenvalues[index]``."""
        return self.eigenvectors[:, index]

    def sections_for(self, multiplier: complex, tol: float = 1e-6) -> np.ndarray:
        """Initial values (columns) whose eigenvalue is within ``tol`` of ``multiplier``."""
        picked = [k for k, h in enumerate(self.eigenvalues) if abs(h - multiplier) < tol]
        return self.eigenvectors[:, picked]

    def as_dict(self) -> dict:
        return {
            "x0": self.x0,
            "multipliers": [[h.real, h.imag] for h in self.multipliers],
            "resonance": self.resonance,
            "loop_residual": self.loop_residual,
        }


def multiplier_order(h: complex) -> Tuple[float, float]:
    return (-round(h.imag, 12), -round(h.real, 12))


def _pair_eigenvalues(eigs: np.ndarray) -> List[complex]:
    # Each isothermic multiplier carries a two-dimensional eigenspace.
    best = None
    for pairing in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
        a, b, c, d = pairing
        spread = max(abs(eigs[a] - eigs[b]), abs(eigs[c] - eigs[d]))
        if best is None or spread < best[0]:
            best = (spread, pairing)
    _, p = best  # type: ignore[misc]
    return [complex(0.5 * (eigs[p[0]] + eigs[p[1]])), complex(0.5 * (eigs[p[2]] + eigs[p[3]]))]


def reduce_multipliers(conn: Connection, eigs: np.ndarray) -> Tuple[complex, complex]:
    """The two multipliers of a monodromy, sorted by imaginary then real part."""
    if conn.multiplier_multiplicity == 2 and len(eigs) == 4:
        values = _pair_eigenvalues(eigs)
    elif conn.kind is ConnectionKind.CONFORMAL_GAUSS_S:
        # drop the two eigenvalues of the constant sections e n
        order = np.argsort(np.abs(eigs - 1.0))
        values = [complex(eigs[k]) for k in sorted(order[2:])]
    else:
        values = [complex(h) for h in eigs]
    values.sort(key=multiplier_order)
    return values[0], values[1]


def transport_period(
    conn: Connection,
    grid: DomainGrid,
    x0: float,
    frame: np.ndarray,
    settings: TransportSettings,
    reverse: bool = False,
) -> np.ndarray:
    ys = grid.y_min + grid.hy * np.arange(grid.ny + 1)
    if reverse:
        ys = ys[::-1]
    state = frame[None]
    for j in range(grid.ny):
        start, end = np.array([[x0, ys[j]]]), np.array([[x0, ys[j + 1]]])
        state = rk4_segments(conn, start, end, state, settings.substeps)
    return state[0]


def monodromy(
    conn: Connection,
    grid: DomainGrid,
    x0: Optional[float] = None,
    settings: TransportSettings = DEFAULT_SETTINGS,
) -> MonodromyResult:
    """Monodromy of ``conn`` around the y period at fixed x0, by default x_min.

    x_min is where :func:`transport_grid` starts, so eigenvectors are initial
    values for sections on the whole grid.

    Raises:
        ValueError: the grid is not periodic in y
        DefectiveMonodromy: the eigen-decomposition failed
    """
    if not grid.periodic_y:
        raise ValueError("monodromy needs a grid periodic in y")
    if x0 is None:
        x0 = grid.x_min
    eye = np.eye(conn.dimension, dtype=complex)
    M = transport_period(conn, grid, x0, eye, settings)
    back = transport_period(conn, grid, x0, eye, settings, reverse=True)
    loop_residual = float(np.max(np.abs(back @ M - eye)))
    try:
        eigs, vecs = scipy.linalg.eig(M)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise DefectiveMonodromy(f"eigen-decomposition of the monodromy failed: {exc}") from exc
    if not np.all(np.isfinite(eigs)) or not np.all(np.isfinite(vecs)):
        raise DefectiveMonodromy("monodromy eigen-decomposition produced non-finite values")
    order = sorted(range(len(eigs)), key=lambda k: multiplier_order(complex(eigs[k])))
    eigs, vecs = eigs[order], vecs[:, order]
    h1, h2 = reduce_multipliers(conn, eigs)
    resonance = abs(h1 - h2) < RESONANCE_TOL
    if resonance:
        logger.info("resonance: multipliers coincide at %s", conn.spectral.rho)
    return MonodromyResult(
        matrix=M,
        eigenvalues=eigs,
        eigenvectors=vecs,
        multipliers=(h1, h2),
        resonance=resonance,
        loop_residual=loop_residual,
        x0=float(x0),
    )


def resonance_points(
    multipliers: List[Tuple[complex, complex]], tol: float = RESONANCE_TOL
) -> List[int]:
    return [k for k, (h1, h2) in enumerate(multipliers) if abs(h1 - h2) < tol]
