import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gds.models.transforms import (
    Block,
    block_constrained_flat,
    block_from_constrained,
    block_to_constrained,
    chol_from_unconstrained,
    log_chol_jacobian,
    unconstrained_from_chol,
)


def test_log_block_basics():
    block = Block("s2", "log", 1)
    assert block_to_constrained(block, np.array([0.0]))[0] == 1.0
    np.testing.assert_allclose(block_to_constrained(block, np.array([np.log(2.5)])), [2.5])


def test_log_cholesky_zero_vector_is_identity():
    block = Block("omega", "log_cholesky", 3, dim=2)
    omega = block_to_constrained(block, np.zeros(3))
    np.testing.assert_array_equal(omega, np.eye(2))


def test_invalid_kind_and_size():
    with pytest.raises(ValueError):
        Block("b", "banana", 1)
    with pytest.raises(ValueError):
        Block("omega", "log_cholesky", 4, dim=2)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=3, max_size=3))
def test_log_cholesky_round_trip_k2(entries):
    block = Block("omega", "log_cholesky", 3, dim=2)
    x = np.asarray(entries)
    omega = block_to_constrained(block, x)
    back = block_from_constrained(block, omega)
    np.testing.assert_allclose(back, x, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 4, 6])
def test_log_cholesky_round_trip_random(k):
    rng = np.random.default_rng(k)
    block = Block("omega", "log_cholesky", k * (k + 1) // 2, dim=k)
    for _ in range(20):
        x = rng.normal(scale=1.5, size=block.size)
        omega = block_to_constrained(block, x)
        # positive definite by construction
        np.linalg.cholesky(omega)
        np.testing.assert_allclose(block_from_constrained(block, omega), x, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_log_chol_jacobian_matches_numeric_determinant(k):
    # oracle: numeric Jacobian determinant of unconstrained -> packed Omega
    rng = np.random.default_rng(10 + k)
    m = k * (k + 1) // 2
    block = Block("omega", "log_cholesky", m, dim=k)
    rows, cols = np.tril_indices(k)

    def packed_omega(x):
        return block_to_constrained(block, x)[rows, cols]

    for _ in range(5):
        x = rng.normal(scale=0.7, size=m)
        J = np.empty((m, m))
        h = 1e-6
        for j in range(m):
            e = np.zeros(m)
            e[j] = h
            J[:, j] = (packed_omega(x + e) - packed_omega(x - e)) / (2.0 * h)
        sign, logdet = np.linalg.slogdet(J)
        assert sign > 0
        log_diag = x[np.flatnonzero(rows == cols)]
        np.testing.assert_allclose(log_chol_jacobian(log_diag), logdet, rtol=1e-6)


def test_log_chol_jacobian_k1_closed_form():
    # Omega = exp(2 w): d Omega / d w = 2 exp(2 w)
    for w in (-1.0, 0.0, 0.8):
        expected = np.log(2.0) + 2.0 * w
        np.testing.assert_allclose(log_chol_jacobian(np.array([w])), expected, rtol=1e-14)


def test_constrained_flat_matches_lower_triangle():
    block = Block("omega", "log_cholesky", 6, dim=3)
    x = np.random.default_rng(0).normal(size=6)
    omega = block_to_constrained(block, x)
    flat = block_constrained_flat(block, x)
    rows, cols = np.tril_indices(3)
    np.testing.assert_array_equal(flat, omega[rows, cols])


def test_chol_pack_unpack_inverse():
    rng = np.random.default_rng(5)
    for k in (2, 5):
        x = rng.normal(size=k * (k + 1) // 2)
        L = chol_from_unconstrained(x, k)
        assert np.all(np.diag(L) > 0)
        np.testing.assert_allclose(unconstrained_from_chol(L), x, atol=1e-14)
