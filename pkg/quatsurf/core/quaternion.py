"""Quaternion arithmetic on numpy arrays.

Quaternions are stored as float arrays whose trailing axis has length 4,
holding the coefficients (w, x, y, z) of 1, i, j, k. All functions broadcast
over leading axes.

Complex numbers embed as w + x i. The complex split used throughout is
q = z0 + j z1 with z0 = w + i x and z1 = y - i z; right multiplication by a
complex number then acts componentwise on (z0, z1).
"""

from dataclasses import dataclass
from typing import Iterator, Tuple, Union

import numpy as np

QuatLike = Union["Quaternion", np.ndarray, Tuple[float, float, float, float]]


def as_quat(q: QuatLike) -> np.ndarray:
    """Return ``q`` as a float array with trailing axis 4."""
    if isinstance(q, Quaternion):
        return q.to_array()
    arr = np.asarray(q, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"quaternion arrays need a trailing axis of length 4, got {arr.shape}")
    return arr


def qmul(p: QuatLike, q: QuatLike) -> np.ndarray:
    """Hamilton product p q.

    Args:
        p: Left factor, shape (..., 4)
        q: Right factor, shape (..., 4)

    Returns:
        Broadcast product, shape (..., 4)
    """
    p = as_quat(p)
    q = as_quat(q)
    pw, px, py, pz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qmul_chain(*factors: QuatLike) -> np.ndarray:
    """Product of several quaternion arrays, left to right."""
    if not factors:
        return ONE.copy()
    out = as_quat(factors[0])
    for factor in factors[1:]:
        out = qmul(out, factor)
    return out


def qconj(q: QuatLike) -> np.ndarray:
    q = as_quat(q)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q: QuatLike) -> np.ndarray:
    q = as_quat(q)
    return np.sum(q * q, axis=-1)


def qnorm(q: QuatLike) -> np.ndarray:
    return np.sqrt(qnorm2(q))


def qinv(q: QuatLike) -> np.ndarray:
    """Multiplicative inverse; zero quaternions map to non-finite values."""
    q = as_quat(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        return qconj(q) / qnorm2(q)[..., None]


def qreal(q: QuatLike) -> np.ndarray:
    return as_quat(q)[..., 0]


def qimag(q: QuatLike) -> np.ndarray:
    """Imaginary part as a quaternion (real coefficient zeroed)."""
    q = as_quat(q).copy()
    q[..., 0] = 0.0
    return q


def qdot(p: QuatLike, q: QuatLike) -> np.ndarray:
    """Euclidean inner product on R^4."""
    return np.sum(as_quat(p) * as_quat(q), axis=-1)


def from_complex(z: Union[complex, np.ndarray]) -> np.ndarray:
    """Embed complex numbers as quaternions w + x i."""
    z = np.asarray(z, dtype=complex)
    zeros = np.zeros(z.shape)
    return np.stack([z.real, z.imag, zeros, zeros], axis=-1)


def from_real(r: Union[float, np.ndarray]) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    zeros = np.zeros(r.shape)
    return np.stack([r, zeros, zeros, zeros], axis=-1)


def complexify(q: QuatLike) -> Tuple[np.ndarray, np.ndarray]:
    """Split q = z0 + j z1.

    Returns:
        Tuple (z0, z1) of complex arrays with z0 = w + i x and z1 = y - i z
    """
    q = as_quat(q)
    return q[..., 0] + 1j * q[..., 1], q[..., 2] - 1j * q[..., 3]


def decomplexify(z0: Union[complex, np.ndarray], z1: Union[complex, np.ndarray]) -> np.ndarray:
    """Inverse of :func:`complexify`: build z0 + j z1."""
    z0, z1 = np.broadcast_arrays(np.asarray(z0, dtype=complex), np.asarray(z1, dtype=complex))
    return np.stack([z0.real, z0.imag, z1.real, -z1.imag], axis=-1)


def right_complex(q: QuatLike, c: Union[complex, np.ndarray]) -> np.ndarray:
    """Right multiplication q c by complex numbers (componentwise on the split)."""
    z0, z1 = complexify(q)
    c = np.asarray(c, dtype=complex)
    return decomplexify(z0 * c, z1 * c)


def right_j(q: QuatLike) -> np.ndarray:
    """Right multiplication by j: (z0 + j z1) j = -conj(z1) + j conj(z0)."""
    z0, z1 = complexify(q)
    return decomplexify(-np.conj(z1), np.conj(z0))


def left_matrix(q: QuatLike) -> np.ndarray:
    """Complex 2x2 matrix of left multiplication by q on the split (z0, z1)."""
    p0, p1 = complexify(q)
    row0 = np.stack([p0, -np.conj(p1)], axis=-1)
    row1 = np.stack([p1, np.conj(p0)], axis=-1)
    return np.stack([row0, row1], axis=-2)


def to_vector(quats: np.ndarray) -> np.ndarray:
    """Flatten quaternion components (..., m, 4) into C^{2m} vectors (..., 2m)."""
    z0, z1 = complexify(quats)
    stacked = np.stack([z0, z1], axis=-1)
    return stacked.reshape(stacked.shape[:-2] + (2 * stacked.shape[-2],))


def from_vector(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_vector`: (..., 2m) complex to (..., m, 4) quaternions."""
    vec = np.asarray(vec, dtype=complex)
    if vec.shape[-1] % 2:
        raise ValueError("complexified sections have an even number of entries")
    pairs = vec.reshape(vec.shape[:-1] + (vec.shape[-1] // 2, 2))
    return decomplexify(pairs[..., 0], pairs[..., 1])


def exp_i(theta: Union[float, complex, np.ndarray]) -> np.ndarray:
    """e^{i theta} as a quaternion; complex theta is allowed."""
    return from_complex(np.exp(1j * np.asarray(theta, dtype=complex)))


ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class Quaternion:
    """Immutable scalar quaternion w + x i + y j + z k."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Quaternion":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (4,):
            raise ValueError(f"expected shape (4,), got {arr.shape}")
        return cls(*(float(v) for v in arr))

    @classmethod
    def from_complex(cls, c: complex) -> "Quaternion":
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __iter__(self) -> Iterator[float]:
        return iter((self.w, self.x, self.y, self.z))

    def __mul__(self, other: object) -> "Quaternion":
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.to_array(), other.to_array()))
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self.to_array() * float(other))
        if isinstance(other, complex):
            return Quaternion.from_array(right_complex(self.to_array(), other))
        return NotImplemented

    def __rmul__(self, other: object) -> "Quaternion":
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self.to_array() * float(other))
        if isinstance(other, complex):
            return Quaternion.from_complex(other) * self
        return NotImplemented

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.to_array())

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2))

    def inverse(self) -> "Quaternion":
        n2 = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def complexify(self) -> Tuple[complex, complex]:
        z0, z1 = complexify(self.to_array())
        return complex(z0), complex(z1)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"
