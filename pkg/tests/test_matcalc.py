import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rescluster.matcalc import NotSymmetric, commutation_matrix, duplication_matrix, kron, unvec, unvech, vec, vech


def test_vec_is_column_major():
    np.testing.assert_array_equal(vec([[1, 2], [3, 4]]), [1, 3, 2, 4])
    np.testing.assert_array_equal(unvec([1, 3, 2, 4], 2), [[1, 2], [3, 4]])


def test_vech_example():
    np.testing.assert_array_equal(vech([[1.0, 2.0], [2.0, 3.0]]), [1.0, 2.0, 3.0])
    s = np.array([[1.0, 2, 3], [2, 4, 5], [3, 5, 6]])
    np.testing.assert_array_equal(vech(s), [1, 2, 3, 4, 5, 6])


def test_vech_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        vech([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotSymmetric):
        vech(np.ones((2, 3)))


def test_duplication_r2():
    d = duplication_matrix(2).mat
    expected = np.array([[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    np.testing.assert_array_equal(d, expected)


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_duplication_shape_and_pinv(r):
    dm = duplication_matrix(r)
    p = r * (r + 1) // 2
    assert dm.mat.shape == (r * r, p)
    np.testing.assert_allclose(dm.pinv @ dm.mat, np.eye(p), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda r: arrays(np.float64, (r, r), elements=st.floats(-1e3, 1e3))))
def test_duplication_identity(a):
    s = a + a.T
    d = duplication_matrix(s.shape[0])
    np.testing.assert_allclose(d.mat @ vech(s), vec(s))
    np.testing.assert_allclose(unvech(vech(s)), s)
    np.testing.assert_allclose(d.pinv @ vec(s), vech(s), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_commutation(m, n, data):
    a = data.draw(arrays(np.float64, (m, n), elements=st.floats(-10, 10)))
    np.testing.assert_array_equal(commutation_matrix(m, n) @ vec(a), vec(a.T))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (2, 3), elements=st.floats(-5, 5)), arrays(np.float64, (3, 2), elements=st.floats(-5, 5)),
       arrays(np.float64, (3, 2), elements=st.floats(-5, 5)))
def test_kron_vec_identity(a, x, b):
    # vec(A X B) = (B^T kron A) vec(X), with shapes A 2x3, X 3x2, B 2x?
    b = b.T  # 2x3
    lhs = vec(a @ x @ b)
    rhs = kron(b.T, a) @ vec(x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)
