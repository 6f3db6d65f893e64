import numpy as np
import pytest
from numpy.testing import assert_allclose

from quatsurf.core.hmatrix import HMatrix2, HVector2, hmat_inv, hmat_inv_array
from quatsurf.core.quaternion import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    complexify,
    decomplexify,
    from_complex,
    from_vector,
    left_matrix,
    qconj,
    qinv,
    qmul,
    qmul_chain,
    qnorm,
    right_complex,
    right_j,
    to_vector,
)
from quatsurf.errors import Singular


def test_hamilton_relations():
    assert_allclose(qmul(I, J), K)
    assert_allclose(qmul(J, I), -K)
    assert_allclose(qmul(J, K), I)
    assert_allclose(qmul(K, K), -ONE)
    assert_allclose(qmul_chain(I, J, K), -ONE)


def test_product_broadcasts(rng):
    p = rng.normal(size=(3, 5, 4))
    q = rng.normal(size=(4,))
    out = qmul(p, q)
    assert out.shape == (3, 5, 4)
    assert_allclose(out[1, 2], qmul(p[1, 2], q))


def test_norm_is_multiplicative(rng):
    p, q = rng.normal(size=(2, 10, 4))
    assert_allclose(qnorm(qmul(p, q)), qnorm(p) * qnorm(q), rtol=1e-12)


def test_inverse_and_conjugate(rng):
    q = rng.normal(size=(6, 4))
    assert_allclose(qmul(q, qinv(q)), np.broadcast_to(ONE, q.shape), atol=1e-12)
    assert_allclose(qmul(q, qconj(q))[..., 0], qnorm(q) ** 2)


def test_inverse_of_zero_is_not_finite():
    assert not np.all(np.isfinite(qinv(np.zeros(4))))


def test_complex_split_round_trip(rng):
    q = rng.normal(size=(7, 4))
    z0, z1 = complexify(q)
    assert_allclose(decomplexify(z0, z1), q)
    # q = z0 + j z1
    assert_allclose(from_complex(z0) + qmul(J, from_complex(z1)), q, atol=1e-12)


def test_right_complex_matches_product(rng):
    q = rng.normal(size=(5, 4))
    c = 0.3 - 1.7j
    assert_allclose(right_complex(q, c), qmul(q, from_complex(c)), atol=1e-12)
    assert_allclose(right_j(q), qmul(q, J), atol=1e-12)


def test_left_matrix_acts_on_split(rng):
    p, q = rng.normal(size=(2, 4))
    z = np.array(complexify(q))
    w = left_matrix(p) @ z
    assert_allclose(w, np.array(complexify(qmul(p, q))), atol=1e-12)


def test_vector_conversion(rng):
    quats = rng.normal(size=(3, 2, 4))
    vec = to_vector(quats)
    assert vec.shape == (3, 4)
    assert_allclose(from_vector(vec), quats)
    with pytest.raises(ValueError):
        from_vector(np.zeros(3, dtype=complex))


def test_scalar_quaternion():
    q = Quaternion(1.0, 2.0, -1.0, 0.5)
    assert_allclose((q * q.inverse()).to_array(), ONE, atol=1e-12)
    assert (Quaternion(0, 1, 0, 0) * Quaternion(0, 0, 1, 0)) == Quaternion(0, 0, 0, 1)
    assert q.conjugate().imag == -q.imag
    assert_allclose((q * 2j).to_array(), right_complex(q.to_array(), 2j))
    with pytest.raises(ZeroDivisionError):
        Quaternion().inverse()


def test_bad_trailing_axis():
    with pytest.raises(ValueError):
        qmul(np.zeros(3), ONE)


def test_hmatrix_inverse(rng):
    m = HMatrix2(rng.normal(size=(2, 2, 4)))
    product = m @ hmat_inv(m)
    assert_allclose(product.data, HMatrix2.identity().data, atol=1e-10)


def test_hmatrix_inverse_array(rng):
    m = rng.normal(size=(4, 2, 2, 4))
    inv = hmat_inv_array(m)
    for k in range(4):
        assert_allclose((HMatrix2(m[k]) @ HMatrix2(inv[k])).data, HMatrix2.identity().data,
                        atol=1e-10)


def test_singular_hmatrix():
    # second column is the first one scaled from the right
    a, b = np.array([1.0, 2.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0, 0.0])
    s = np.array([0.5, 0.0, -1.0, 2.0])
    m = HMatrix2.of(a, qmul(a, s), b, qmul(b, s))
    with pytest.raises(Singular):
        m.inverse()


def test_hvector_affine_coordinate(rng):
    a, b, s = rng.normal(size=(3, 4))
    v = HVector2.of(a, b)
    # the quaternionic line v H does not depend on the representative
    assert_allclose(v.scale(s).affine(), v.affine(), atol=1e-12)
    assert_allclose(HVector2.from_complex(v.complexify()).data, v.data)
