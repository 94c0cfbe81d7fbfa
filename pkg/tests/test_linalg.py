import numpy as np
import pytest

from voronoicur.linalg import (
    OrthonormalBasis,
    fro_norm,
    numerical_rank,
    orthonormal_residual,
    pinv_apply,
    svd_all,
    tail_norm,
    thin_qr,
    truncated_svd,
)
from voronoicur.misc.errors import DegenerateInputError, ParameterError

from conftest import low_rank


def test_truncated_svd_reconstructs_low_rank(rng):
    A = low_rank(rng, 30, 20, 4)
    svd = truncated_svd(A, 4)
    assert svd.rank == 4
    assert np.allclose(svd.reconstruct(), A, atol=1e-10)
    assert np.allclose(svd.left.T @ svd.left, np.eye(4), atol=1e-12)
    assert np.all(np.diff(svd.singular_values) <= 0)


def eigen_triplets(A, d):
    """Singular triplets from the eigendecomposition of A^T A."""
    values, vectors = np.linalg.eigh(A.T @ A)
    order = np.argsort(values)[::-1][:d]
    sigma = np.sqrt(values[order])
    right = vectors[:, order]
    return A @ right / sigma, sigma, right


def test_truncated_svd_matches_eigen_oracle():
    A = np.random.default_rng(8).standard_normal((8, 5))
    svd = truncated_svd(A, 3)
    left, sigma, right = eigen_triplets(A, 3)

    assert np.allclose(svd.singular_values, sigma, rtol=1e-8, atol=0)
    for j in range(3):
        # Columns agree up to sign.
        sign = np.sign(right[:, j] @ svd.right[:, j])
        assert np.allclose(svd.right[:, j], sign * right[:, j], atol=1e-8)
        assert np.allclose(svd.left[:, j], sign * left[:, j], atol=1e-8)


def test_truncated_svd_returns_numerical_rank_when_smaller(rng):
    A = low_rank(rng, 10, 8, 2)
    assert truncated_svd(A, 5).rank == 2


def test_truncated_svd_rejects_bad_rank(rng):
    A = rng.standard_normal((5, 4))
    with pytest.raises(ParameterError):
        truncated_svd(A, 0)
    with pytest.raises(ParameterError):
        truncated_svd(A, 5)


def test_sign_convention_is_deterministic(rng):
    A = rng.standard_normal((12, 7))
    first = svd_all(A)
    second = svd_all(-A)
    for j in range(first.rank):
        column = first.left[:, j]
        assert column[np.argmax(np.abs(column))] > 0
    assert np.allclose(first.left, second.left)
    assert np.allclose(first.right, -second.right)


def test_svd_all_of_empty_input():
    svd = svd_all(np.zeros((4, 0)))
    assert svd.rank == 0
    assert svd.left.shape == (4, 0)


def test_numerical_rank_scale():
    s = np.array([1.0, 1e-10, 1e-17])
    assert numerical_rank(s, (10, 10)) == 2
    # A larger reference scale turns the middle value into noise.
    assert numerical_rank(s, (10, 10), scale=1e7) == 1
    assert numerical_rank(np.zeros(3), (3, 3)) == 0


def test_thin_qr_basis_spans_range(rng):
    A = low_rank(rng, 15, 6, 3)
    Q = thin_qr(A)
    assert Q.dim == 3
    assert np.allclose(Q.basis.T @ Q.basis, np.eye(3), atol=1e-12)
    assert fro_norm(orthonormal_residual(A, Q)) <= 1e-10 * fro_norm(A)


def test_thin_qr_rejects_zero():
    with pytest.raises(DegenerateInputError):
        thin_qr(np.zeros((3, 2)))


def test_orthonormal_residual_empty_basis_is_identity(rng):
    A = rng.standard_normal((4, 3))
    R = orthonormal_residual(A, OrthonormalBasis.empty(4))
    assert np.array_equal(R, A)
    with pytest.raises(ParameterError):
        orthonormal_residual(A, OrthonormalBasis.empty(5))


def test_orthonormal_residual_is_idempotent(rng):
    A = rng.standard_normal((9, 6))
    Q = thin_qr(rng.standard_normal((9, 3)))
    once = orthonormal_residual(A, Q)
    twice = orthonormal_residual(once, Q)
    assert np.allclose(twice, once, rtol=0, atol=1e-12)


def test_pinv_apply_matches_pseudoinverse(rng):
    C = rng.standard_normal((10, 3))
    B = rng.standard_normal((10, 4))
    assert np.allclose(pinv_apply(C, B), np.linalg.pinv(C) @ B, atol=1e-10)


def test_pinv_apply_rank_deficient_projects(rng):
    C = low_rank(rng, 8, 4, 2)
    B = rng.standard_normal((8, 3))
    projected = C @ pinv_apply(C, B)
    oracle = C @ np.linalg.pinv(C) @ B
    assert np.allclose(projected, oracle, atol=1e-8)


def test_tail_norm(rng):
    A = rng.standard_normal((9, 6))
    s = np.linalg.svd(A, compute_uv=False)
    assert tail_norm(A, 2) == pytest.approx(np.sqrt(np.sum(s[2:] ** 2)))
    assert tail_norm(A, 6) == 0


def test_as_matrix_rejects_non_finite():
    with pytest.raises(ParameterError):
        truncated_svd(np.array([[1.0, np.nan], [0.0, 1.0]]), 1)
