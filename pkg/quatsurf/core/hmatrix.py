"""2x2 quaternionic matrices and vectors in H^2.

Vectors are scaled by quaternions from the right, matrices act from the left.
Inversion goes through the 4x4 complexification, which avoids adjugate
formulas that do not survive noncommutativity.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg

from ..errors import Singular
from .quaternion import (
    QuatLike,
    as_quat,
    decomplexify,
    from_vector,
    left_matrix,
    qinv,
    qmul,
    to_vector,
)

DET_FLOOR = 1e-14
DEFAULT_COND_BOUND = 1e12


def hmat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of arrays of shape (..., 2, 2, 4)."""
    rows = []
    for r in range(2):
        cols = []
        for c in range(2):
            left = qmul(a[..., r, 0, :], b[..., 0, c, :])
            cols.append(left + qmul(a[..., r, 1, :], b[..., 1, c, :]))
        rows.append(np.stack(cols, axis=-2))
    return np.stack(rows, axis=-3)


def hmat_apply(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply (..., 2, 2, 4) matrices to (..., 2, 4) vectors."""
    top = qmul(m[..., 0, 0, :], v[..., 0, :]) + qmul(m[..., 0, 1, :], v[..., 1, :])
    bottom = qmul(m[..., 1, 0, :], v[..., 0, :]) + qmul(m[..., 1, 1, :], v[..., 1, :])
    return np.stack([top, bottom], axis=-2)


def hmat_complexify(m: np.ndarray) -> np.ndarray:
    """4x4 complex matrix of a quaternionic 2x2 matrix acting on to_vector coordinates."""
    blocks = left_matrix(m)  # (..., 2, 2, 2, 2)
    top = np.concatenate([blocks[..., 0, 0, :, :], blocks[..., 0, 1, :, :]], axis=-1)
    bottom = np.concatenate([blocks[..., 1, 0, :, :], blocks[..., 1, 1, :, :]], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def hmat_decomplexify(c: np.ndarray) -> np.ndarray:
    """Quaternionic 2x2 matrix from a j-commuting 4x4 complex matrix."""
    entries = []
    for r in range(2):
        row = []
        for col in range(2):
            b = c[..., 2 * r : 2 * r + 2, 2 * col : 2 * col + 2]
            p0 = 0.5 * (b[..., 0, 0] + np.conj(b[..., 1, 1]))
            p1 = 0.5 * (b[..., 1, 0] - np.conj(b[..., 0, 1]))
            row.append(decomplexify(p0, p1))
        entries.append(np.stack(row, axis=-2))
    return np.stack(entries, axis=-3)


def hmat_inv_array(m: np.ndarray, cond_bound: float = DEFAULT_COND_BOUND) -> np.ndarray:
    """Vectorized inverse of (..., 2, 2, 4) matrices.

    Raises:
        Singular: some complexified determinant is below the floor or the
            condition number exceeds ``cond_bound``
    """
    c = hmat_complexify(np.asarray(m, dtype=float))
    det = np.abs(np.linalg.det(c))
    if np.any(det < DET_FLOOR):
        raise Singular(f"quaternionic matrix is singular (|det| = {float(det.min()):.3e})")
    cond = np.linalg.cond(c)
    if np.any(cond > cond_bound):
        raise Singular(f"quaternionic matrix is ill conditioned (cond = {float(cond.max()):.3e})")
    return hmat_decomplexify(np.linalg.inv(c))


def hmat_det(m: np.ndarray) -> np.ndarray:
    """Determinant of the complexification; real and nonnegative for quaternionic matrices."""
    return np.abs(np.linalg.det(hmat_complexify(m)))


def _identity() -> np.ndarray:
    out = np.zeros((2, 2, 4))
    out[0, 0, 0] = out[1, 1, 0] = 1.0
    return out


@dataclass(frozen=True)
class HVector2:
    """Column vector (a, b) in H^2."""

    data: np.ndarray = field(default_factory=lambda: np.zeros((2, 4)))

    @classmethod
    def of(cls, a: QuatLike, b: QuatLike) -> "HVector2":
        return cls(np.stack([as_quat(a), as_quat(b)]))

    @property
    def a(self) -> np.ndarray:
        return self.data[0]

    @property
    def b(self) -> np.ndarray:
        return self.data[1]

    def scale(self, q: QuatLike) -> "HVector2":
        """Right scaling v q."""
        q = as_quat(q)
        return HVector2(np.stack([qmul(self.a, q), qmul(self.b, q)]))

    def complexify(self) -> np.ndarray:
        return to_vector(self.data)

    @classmethod
    def from_complex(cls, vec: np.ndarray) -> "HVector2":
        return cls(from_vector(vec))

    def affine(self) -> np.ndarray:
        """Affine coordinate a b^{-1} of the quaternionic line v H."""
        return qmul(self.a, qinv(self.b))


@dataclass(frozen=True)
class HMatrix2:
    """Row-major 2x2 quaternionic matrix."""

    data: np.ndarray = field(default_factory=_identity)

    @classmethod
    def of(cls, m00: QuatLike, m01: QuatLike, m10: QuatLike, m11: QuatLike) -> "HMatrix2":
        return cls(np.array([[as_quat(m00), as_quat(m01)], [as_quat(m10), as_quat(m11)]]))

    @classmethod
    def identity(cls) -> "HMatrix2":
        return cls(_identity())

    def __matmul__(self, other: Union["HMatrix2", HVector2]) -> Union["HMatrix2", HVector2]:
        if isinstance(other, HMatrix2):
            return HMatrix2(hmat_mul(self.data, other.data))
        if isinstance(other, HVector2):
            return HVector2(hmat_apply(self.data, other.data))
        return NotImplemented

    def complexify(self) -> np.ndarray:
        return hmat_complexify(self.data)

    def inverse(self, cond_bound: float = DEFAULT_COND_BOUND) -> "HMatrix2":
        return hmat_inv(self, cond_bound)

    def __sub__(self, other: "HMatrix2") -> "HMatrix2":
        return HMatrix2(self.data - other.data)


def hmat_inv(m: HMatrix2, cond_bound: float = DEFAULT_COND_BOUND) -> HMatrix2:
    """Inverse of a single quaternionic 2x2 matrix via its complexification.

    Raises:
        Singular: complexified determinant magnitude below 1e-14, or condition
            number above ``cond_bound``
    """
    c = m.complexify()
    det = abs(scipy.linalg.det(c))
    if det < DET_FLOOR:
        raise Singular(f"quaternionic matrix is singular (|det| = {det:.3e})")
    cond = np.linalg.cond(c)
    if cond > cond_bound:
        raise Singular(f"quaternionic matrix is ill conditioned (cond = {cond:.3e})")
    return HMatrix2(hmat_decomplexify(scipy.linalg.inv(c)))


__all__ = [
    "HMatrix2",
    "HVector2",
    "hmat_apply",
    "hmat_complexify",
    "hmat_decomplexify",
    "hmat_det",
    "hmat_inv",
    "hmat_inv_array",
    "hmat_mul",
]
