import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from triangle_linsolve.linalg import (
    as_matrix,
    as_vector,
    matvec,
    operator_norm_estimate,
    random_orthogonal,
    read_matrix_market,
    read_vector,
    transpose_matvec,
    write_matrix_market,
    write_vector,
)


@pytest.mark.parametrize(
    "A, x, expected",
    [
        (np.eye(2), [3.0, -1.0], [3.0, -1.0]),
        ([[1.0, 2.0], [3.0, 4.0]], [1.0, 1.0], [3.0, 7.0]),
        (np.zeros((2, 2)), [5.0, 5.0], [0.0, 0.0]),
    ],
)
def test_matvec_examples(A, x, expected):
    np.testing.assert_array_equal(matvec(as_matrix(A), as_vector(x)), expected)


@pytest.mark.parametrize(
    "A, y, expected",
    [
        (np.eye(2), [1.0, 0.0], [1.0, 0.0]),
        ([[1.0, 2.0], [3.0, 4.0]], [1.0, 0.0], [1.0, 2.0]),
        ([[1.0, 0.0], [0.0, 0.0]], [0.0, 1.0], [0.0, 0.0]),
    ],
)
def test_transpose_matvec_examples(A, y, expected):
    np.testing.assert_array_equal(transpose_matvec(as_matrix(A), as_vector(y)), expected)


def test_dimension_mismatch_raises():
    A = as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        matvec(A, np.ones(2))
    with pytest.raises(ValueError):
        transpose_matvec(A, np.ones(3))


def test_rejects_non_finite_and_empty():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_vector([np.inf])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 3)))


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def conforming(draw):
    m = draw(st.integers(1, 8))
    n = draw(st.integers(1, 8))
    A = draw(arrays(np.float64, (m, n), elements=finite))
    x = draw(arrays(np.float64, n, elements=finite))
    y = draw(arrays(np.float64, m, elements=finite))
    return A, x, y


@given(conforming())
@settings(max_examples=200, deadline=None)
def test_adjoint_identity(case):
    A, x, y = case
    lhs = float(y @ matvec(A, x))
    rhs = float(transpose_matvec(A, y) @ x)
    scale = float(np.abs(y) @ np.abs(A) @ np.abs(x))
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300) + 1e-300


@pytest.mark.parametrize(
    "A, expected",
    [
        (np.eye(3), 1.0),
        (np.diag([3.0, 1.0]), 3.0),
        (np.array([[0.0, 2.0], [0.0, 0.0]]), 2.0),
    ],
)
def test_operator_norm_examples(A, expected):
    tol = 1e-6
    est = operator_norm_estimate(A, tol)
    assert est <= expected * (1 + 1e-12)
    assert expected <= est * (1 + tol)


def test_operator_norm_zero_matrix():
    assert operator_norm_estimate(np.zeros((3, 2))) == 0.0


def test_operator_norm_random_matches_svd():
    rng = np.random.default_rng(3)
    A = rng.uniform(size=(40, 30))
    sigma = np.linalg.svd(A, compute_uv=False)[0]
    est = operator_norm_estimate(A, 1e-6)
    assert est <= sigma * (1 + 1e-12)
    assert sigma <= est * (1 + 1e-6)


def test_random_orthogonal_examples():
    q = random_orthogonal(1, 7)
    assert q.shape == (1, 1) and abs(abs(q[0, 0]) - 1.0) < 1e-15
    Q = random_orthogonal(4, 11)
    assert np.abs(Q.T @ Q - np.eye(4)).max() <= 1e-10
    np.testing.assert_array_equal(Q, random_orthogonal(4, 11))
    assert not np.array_equal(Q, random_orthogonal(4, 12))


def _det_by_expansion(M):
    if M.shape == (1, 1):
        return M[0, 0]
    return sum((-1) ** j * M[0, j] * _det_by_expansion(np.delete(M[1:], j, axis=1)) for j in range(M.shape[0]))


@pytest.mark.parametrize("k", range(1, 7))
def test_random_orthogonal_unit_determinant(k):
    Q = random_orthogonal(k, 100 + k)
    assert abs(abs(_det_by_expansion(Q)) - 1.0) <= 1e-8


def test_matrix_market_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 3))
    path = tmp_path / "A.mtx"
    write_matrix_market(path, A)
    assert path.read_text().startswith("%%MatrixMarket matrix array real general")
    np.testing.assert_array_equal(read_matrix_market(path), A)

    x = rng.standard_normal(5)
    write_vector(tmp_path / "x.mtx", x)
    np.testing.assert_array_equal(read_vector(tmp_path / "x.mtx"), x)


def test_matrix_market_reads_coordinate(tmp_path):
    path = tmp_path / "c.mtx"
    path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n2 2 -2\n")
    np.testing.assert_array_equal(read_matrix_market(path), [[1.5, 0.0], [0.0, -2.0]])
