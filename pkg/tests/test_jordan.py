import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_semisimple

from intobs.errors import NearDefective, NotStable
from intobs.jordan import Real1x1, Rot2x2, build_transform, derivative_at, rotation, transform_at
from intobs.linalg import is_hurwitz, is_metzler, is_nonnegative, is_schur


def dt_residual(jt, F, t):
    P, P_inv = transform_at(jt, t)
    return np.linalg.norm(jt.Lam - transform_at(jt, t + 1)[0] @ F @ P_inv, 2)


def ct_residual(jt, F, t):
    P, _ = transform_at(jt, t)
    return np.linalg.norm(jt.Lam @ P - derivative_at(jt, t) - P @ F, 2)


def test_scalar_negative_dt():
    jt = build_transform([[-0.5]], "dt")
    assert jt.Lam[0, 0] == 0.5
    assert jt.blocks == (Real1x1(-0.5),)
    for t in range(101):
        P, P_inv = transform_at(jt, t)
        assert P[0, 0] == (-1.0) ** t and P_inv[0, 0] == (-1.0) ** t
    P7, P7_inv = transform_at(jt, 7)
    assert P7[0, 0] == -1.0 and P7_inv[0, 0] == -1.0


def test_already_nonnegative_dt():
    jt = build_transform([[0.3]], "dt")
    assert jt.short_circuit and jt.constant
    assert jt.Lam[0, 0] == 0.3
    for t in (0, 1, 5):
        np.testing.assert_array_equal(transform_at(jt, t)[0], [[1.0]])


def test_rotation_block_dt():
    F = 0.5 * rotation(np.pi / 4)
    jt = build_transform(F, "dt")
    np.testing.assert_allclose(jt.Lam, 0.5 * np.eye(2), atol=1e-15)
    P0, _ = transform_at(jt, 0)
    for t in range(20):
        P, _ = transform_at(jt, t)
        # rotations compose: P_t inv(P_0) = R(-pi t / 4)
        np.testing.assert_allclose(P @ np.linalg.inv(P0), rotation(-np.pi * t / 4), atol=1e-12)
        assert dt_residual(jt, F, t) <= 1e-12


def test_rotation_block_ct():
    F = np.array([[-1.0, 2.0], [-2.0, -1.0]])
    jt = build_transform(F, "ct")
    np.testing.assert_allclose(jt.Lam, -np.eye(2), atol=1e-15)
    P0, _ = transform_at(jt, 0)
    P, _ = transform_at(jt, np.pi / 4)
    np.testing.assert_allclose(P @ np.linalg.inv(P0), rotation(-np.pi / 2), atol=1e-12)
    for t in np.linspace(0, 5, 11):
        assert ct_residual(jt, F, t) <= 1e-12
        # analytic derivative against a central difference
        h = 1e-6
        fd = (transform_at(jt, t + h)[0] - transform_at(jt, t - h)[0]) / (2 * h)
        np.testing.assert_allclose(derivative_at(jt, t), fd, atol=1e-8)


def test_p0_is_inverse_eigenbasis():
    jt = build_transform([[0.2, -0.9], [0.4, -0.3]], "dt")
    P0, P0_inv = transform_at(jt, 0)
    np.testing.assert_array_equal(P0, jt.V_inv)
    np.testing.assert_array_equal(P0_inv, jt.V)


def test_unstable_and_defective():
    with pytest.raises(NotStable):
        build_transform([[-1.2]], "dt")
    with pytest.raises(NotStable):
        build_transform([[0.1]], "ct")
    with pytest.raises(NearDefective):
        build_transform([[-0.5, 1.0], [0.0, -0.5]], "dt")


def test_empty_block():
    jt = build_transform(np.zeros((0, 0)), "ct")
    assert jt.n == 0 and jt.constant


def test_dt_needs_integer_time():
    jt = build_transform([[-0.5]], "dt")
    with pytest.raises(ValueError):
        transform_at(jt, 0.5)
    with pytest.raises(ValueError):
        derivative_at(jt, 0)


def test_block_descriptor_values():
    b = Rot2x2(2.0, np.pi / 6)
    assert b.alpha == pytest.approx(np.sqrt(3))
    assert b.beta == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_schur_identity(n, seed):
    F = random_semisimple(np.random.default_rng(seed), n, "dt")
    jt = build_transform(F, "dt")
    assert is_nonnegative(jt.Lam) and is_schur(jt.Lam)
    assert max(dt_residual(jt, F, t) for t in range(51)) <= 1e-9
    np.testing.assert_allclose(jt.V @ jt.J @ jt.V_inv, F, atol=1e-9 * np.linalg.norm(F, 2))
    if not jt.short_circuit:
        lam = np.sort(np.diag(jt.Lam))
        np.testing.assert_allclose(lam, np.sort(np.abs(np.linalg.eigvals(F))), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_hurwitz_identity(n, seed):
    F = random_semisimple(np.random.default_rng(seed), n, "ct")
    jt = build_transform(F, "ct")
    assert is_metzler(jt.Lam) and is_hurwitz(jt.Lam)
    assert max(ct_residual(jt, F, t) for t in np.linspace(0, 10, 41)) <= 1e-9
    if not jt.short_circuit:
        lam = np.sort(np.diag(jt.Lam))
        np.testing.assert_allclose(lam, np.sort(np.linalg.eigvals(F).real), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.sampled_from(["ct", "dt"]), st.integers(0, 2**32 - 1))
def test_sigma_bounds_sampled_norms(n, domain, seed):
    rng = np.random.default_rng(seed)
    jt = build_transform(random_semisimple(rng, n, domain), domain)
    times = rng.integers(0, 10**6, 500) if domain == "dt" else rng.uniform(0, 1e3, 500)
    for t in times:
        P, P_inv = transform_at(jt, t)
        assert np.linalg.norm(P, 2) + np.linalg.norm(P_inv, 2) <= jt.sigma * (1 + 1e-12)
