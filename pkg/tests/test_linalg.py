import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import kron_oracle, vertex_extrema

from intobs.errors import DimensionError, NearSingular, OrderingError, SpectraOverlap
from intobs.linalg import (
    box_image,
    interval_image,
    invert,
    is_hurwitz,
    is_metzler,
    is_nonnegative,
    is_schur,
    kernel_basis,
    numerical_rank,
    pos_neg_split,
    rcond,
    solve_sylvester,
    spectrum,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def matrix_and_box(draw, max_dim=5):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    A = draw(arrays(float, (m, n), elements=finite))
    a = draw(arrays(float, (n,), elements=finite))
    b = draw(arrays(float, (n,), elements=finite))
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    frac = draw(arrays(float, (n,), elements=st.floats(0, 1)))
    return A, lo, hi, lo + frac * (hi - lo)


@given(arrays(float, (3, 4), elements=finite))
def test_split_parts_are_nonnegative_and_recombine(M):
    plus, minus = pos_neg_split(M)
    assert np.all(plus >= 0) and np.all(minus >= 0)
    np.testing.assert_array_equal(plus - minus, M)
    np.testing.assert_array_equal(plus + minus, np.abs(M))


@given(matrix_and_box())
def test_interval_image_contains_interior_points(case):
    A, lo, hi, a = case
    low, high = interval_image(A, lo, hi)
    v = A @ a
    slack = 1e-9 * (1 + np.abs(A) @ np.maximum(np.abs(lo), np.abs(hi)))
    assert np.all(low <= v + slack) and np.all(v <= high + slack)


@given(matrix_and_box())
def test_interval_image_is_tight(case):
    A, lo, hi, _ = case
    low, high = interval_image(A, lo, hi)
    vlo, vhi = vertex_extrema(A, lo, hi)
    scale = 1 + np.abs(A) @ np.maximum(np.abs(lo), np.abs(hi))
    assert np.all(np.abs(low - vlo) <= 1e-12 * scale)
    assert np.all(np.abs(high - vhi) <= 1e-12 * scale)


def test_interval_image_hand_example():
    A = np.array([[1.0, -2.0], [0.5, 0.0]])
    low, high = interval_image(A, [-1.0, 0.0], [1.0, 2.0])
    np.testing.assert_array_equal(low, [-5.0, -0.5])
    np.testing.assert_array_equal(high, [1.0, 0.5])


def test_interval_image_batched_matches_rowwise():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 4))
    lo = rng.standard_normal((5, 4))
    hi = lo + rng.random((5, 4))
    low, high = interval_image(A, lo, hi)
    for k in range(5):
        l1, h1 = interval_image(A, lo[k], hi[k])
        np.testing.assert_allclose(low[k], l1, rtol=0, atol=1e-15)
        np.testing.assert_allclose(high[k], h1, rtol=0, atol=1e-15)


def test_interval_image_rejects_bad_input():
    with pytest.raises(OrderingError):
        interval_image(np.eye(2), [1.0, 0.0], [0.0, 1.0])
    with pytest.raises(DimensionError):
        interval_image(np.eye(2), [0.0], [1.0])


def test_box_image_skips_ordering_check():
    low, high = box_image(np.eye(1), np.array([1.0]), np.array([0.0]))
    assert low[0] == 1.0 and high[0] == 0.0


def test_rank_and_kernel():
    M = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    assert numerical_rank(M) == 1
    K = kernel_basis(M)
    assert K.shape == (3, 2)
    np.testing.assert_allclose(M @ K, 0, atol=1e-12)
    np.testing.assert_allclose(K.T @ K, np.eye(2), atol=1e-12)
    assert numerical_rank(np.zeros((2, 2))) == 0
    with pytest.raises(ValueError):
        kernel_basis(M, rel_tol=0)


def test_structure_predicates():
    assert is_metzler([[-3.0, 1.0], [0.0, -1.0]])
    assert not is_metzler([[-3.0, -1.0], [0.0, -1.0]])
    assert is_nonnegative([[0.0, 1.0]])
    assert not is_nonnegative([[0.0, -1e-300]])
    assert is_hurwitz([[-1.0, 5.0], [0.0, -0.1]])
    assert not is_hurwitz([[0.0]])
    assert is_schur([[0.5, 10.0], [0.0, -0.9]])
    assert not is_schur([[1.0]])


def test_empty_spectrum_is_stable():
    rep = spectrum(np.zeros((0, 0)))
    assert rep.is_hurwitz() and rep.is_schur()


def test_spectrum_values():
    rep = spectrum([[0.0, -2.0], [2.0, 0.0]])
    assert rep.spectral_radius == pytest.approx(2.0)
    assert rep.max_real_part == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("method", ["auto", "kronecker", "schur"])
def test_sylvester_matches_entrywise_oracle(method):
    rng = np.random.default_rng(7)
    for _ in range(20):
        p, q = rng.integers(1, 7, size=2)
        P = rng.standard_normal((p, p))
        Q = rng.standard_normal((q, q))
        R = rng.standard_normal((p, q))
        X = solve_sylvester(P, Q, R, method=method)
        Xo = kron_oracle(P, Q, R)
        np.testing.assert_allclose(X, Xo, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(P @ X + X @ Q, R, atol=1e-9)


def test_sylvester_large_uses_schur_path():
    rng = np.random.default_rng(3)
    P = rng.standard_normal((15, 15)) + 8 * np.eye(15)
    Q = rng.standard_normal((4, 4))
    R = rng.standard_normal((15, 4))
    X = solve_sylvester(P, Q, R)
    np.testing.assert_allclose(P @ X + X @ Q, R, atol=1e-10)


def test_sylvester_overlap_raises():
    with pytest.raises(SpectraOverlap):
        solve_sylvester(np.array([[1.0]]), np.array([[-1.0]]), np.array([[1.0]]))


def test_sylvester_unknown_method():
    with pytest.raises(ValueError):
        solve_sylvester(np.eye(1), np.eye(1), np.eye(1), method="qr")


def test_invert_and_rcond():
    assert rcond(np.diag([1.0, 1e-3])) == pytest.approx(1e-3)
    assert rcond(np.zeros((2, 2))) == 0.0
    np.testing.assert_allclose(invert(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))
    with pytest.raises(NearSingular):
        invert(np.diag([1.0, 1e-14]))
    with pytest.raises(DimensionError):
        invert(np.ones((2, 3)))


@settings(max_examples=50)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_sylvester_residual_property(p, q, seed):
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((p, p)) + 5 * np.eye(p)
    Q = rng.standard_normal((q, q)) + 5 * np.eye(q)
    R = rng.standard_normal((p, q))
    X = solve_sylvester(P, Q, R)
    np.testing.assert_allclose(P @ X + X @ Q, R, atol=1e-10)
