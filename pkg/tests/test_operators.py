"""Unit tests for the dense operator primitives."""

import numpy as np
import pytest

from app.core.errors import DimensionError
from app.quantum.operators import (
    anticommutator,
    commutator,
    dagger,
    eigenvalues,
    expm,
    frobenius_inner,
    hermitian_eigen,
    identity,
    kron,
    matrix_unit,
    null_space,
    stack_commutator_maps,
    trace_norm,
    traceless_orthonormal_basis,
    unvec,
    vec,
)


def test_dagger_of_lowering_is_raising(sigma_minus, sigma_plus):
    """Test that the adjoint of sigma^- is sigma^+."""
    assert np.allclose(dagger(sigma_minus), sigma_plus)


def test_dagger_entrywise():
    """Test the conjugate transpose on an explicit matrix."""
    a = np.array([[0, 1 + 1j], [2, 0]])
    assert np.allclose(dagger(a), [[0, 2], [1 - 1j, 0]])
    assert np.allclose(dagger(identity(3)), identity(3))


def test_dagger_rejects_non_square():
    """Test that operator semantics require square input."""
    with pytest.raises(DimensionError):
        dagger(np.zeros((2, 3)))


def test_non_finite_entries_rejected():
    """Test that NaN entries are refused."""
    with pytest.raises(ValueError, match="non-finite"):
        dagger(np.array([[np.nan, 0], [0, 1]]))


def test_commutator_pauli_algebra(sigma_plus, sigma_minus, sigma_z, rng):
    """Test [sigma+, sigma-] = sigma_z and [A, A] = 0."""
    assert np.allclose(commutator(sigma_plus, sigma_minus), sigma_z)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.allclose(commutator(a, a), 0)


def test_commutator_matrix_units():
    """Test [E_12, E_21] = E_11 - E_22 in d = 3."""
    expected = matrix_unit(1, 1, 3) - matrix_unit(2, 2, 3)
    assert np.allclose(commutator(matrix_unit(1, 2, 3), matrix_unit(2, 1, 3)), expected)


def test_commutator_dimension_mismatch():
    """Test that operands of different dimension are rejected."""
    with pytest.raises(DimensionError, match="mismatch"):
        commutator(identity(2), identity(3))


def test_anticommutator(sigma_plus, sigma_minus, sigma_x, sigma_z):
    """Test the anticommutator on Pauli matrices and the identity."""
    assert np.allclose(anticommutator(sigma_plus, sigma_minus), identity(2))
    assert np.allclose(anticommutator(sigma_z, sigma_x), 0)
    assert np.allclose(anticommutator(sigma_x, identity(2)), 2 * sigma_x)


def test_kron_block_structure(sigma_minus):
    """Test that 1 (x) sigma^- places sigma^- blocks on the diagonal."""
    k = kron(identity(2), sigma_minus)
    assert k.shape == (4, 4)
    assert np.allclose(k[:2, :2], sigma_minus)
    assert np.allclose(k[2:, 2:], sigma_minus)
    assert np.allclose(k[:2, 2:], 0)


def test_matrix_unit_one_based(sigma_plus, sigma_minus):
    """Test that E_12 and E_21 are sigma^+ and sigma^-."""
    assert np.allclose(matrix_unit(1, 2, 2), sigma_plus)
    assert np.allclose(matrix_unit(2, 1, 2), sigma_minus)
    with pytest.raises(DimensionError):
        matrix_unit(0, 1, 2)
    with pytest.raises(DimensionError):
        matrix_unit(1, 3, 2)


def test_basis_d2_is_scaled_paulis(sigma_x, sigma_y, sigma_z):
    """Test that the d = 2 basis is sigma_x, sigma_y, sigma_z over sqrt(2)."""
    basis = traceless_orthonormal_basis(2)
    for got, pauli in zip(basis, (sigma_x, sigma_y, sigma_z)):
        assert np.allclose(got, pauli / np.sqrt(2))


@pytest.mark.parametrize("d", [3, 4, 5])
def test_basis_orthonormal_and_traceless(d):
    """Test that the Gram matrix is the identity and every element is traceless."""
    basis = traceless_orthonormal_basis(d)
    assert len(basis) == d * d - 1
    gram = np.array([[frobenius_inner(a, b) for b in basis] for a in basis])
    assert np.allclose(gram, np.eye(d * d - 1), atol=1e-13)
    assert all(abs(np.trace(g)) < 1e-13 for g in basis)


def test_basis_requires_d_at_least_two():
    """Test that d = 1 has no traceless basis."""
    with pytest.raises(DimensionError):
        traceless_orthonormal_basis(1)


def test_vec_column_stacking():
    """Test the column-stacking convention and vec(AXB) = (B^T (x) A) vec(X)."""
    a = np.array([[1, 2], [3, 4]])
    assert np.allclose(vec(a), [1, 3, 2, 4])
    assert np.allclose(unvec(vec(identity(2)), 2), identity(2))

    rng = np.random.default_rng(5)
    x, left, right = (rng.standard_normal((3, 3)) for _ in range(3))
    assert np.allclose(vec(left @ x @ right), np.kron(right.T, left) @ vec(x))


def test_unvec_wrong_length():
    """Test that unvec refuses a vector of the wrong size."""
    with pytest.raises(DimensionError):
        unvec(np.zeros(5), 2)


def test_null_space_of_raising(sigma_plus):
    """Test that sigma^+ annihilates e_1 only."""
    result = null_space(sigma_plus, 1e-10)
    assert result.nullity == 1
    v = result.basis[0]
    assert abs(abs(v[0]) - 1.0) < 1e-12
    assert abs(v[1]) < 1e-12


def test_null_space_of_identity():
    """Test that the identity has a trivial kernel."""
    result = null_space(identity(3))
    assert result.nullity == 0
    assert result.largest_discarded is None
    assert result.margin > 1e8


def test_null_space_of_zero_matrix():
    """Test that the zero matrix keeps the whole space."""
    assert null_space(np.zeros((3, 3))).nullity == 3


def test_null_space_wide_matrix():
    """Test that columns beyond the row count are kernel directions."""
    result = null_space(np.array([[1.0, 0.0, 0.0]]))
    assert result.nullity == 2


def test_null_space_tolerance_range():
    """Test that tolerances outside (0, 1) are rejected."""
    with pytest.raises(ValueError, match="tolerance"):
        null_space(identity(2), 0.0)


def test_stacked_commutator_map_of_ladder_pair(sigma_minus, sigma_plus):
    """Test that {sigma-, sigma+} has a one-dimensional commutant."""
    stacked = stack_commutator_maps([sigma_minus, sigma_plus])
    assert stacked.shape == (8, 4)
    result = null_space(stacked)
    assert result.nullity == 1
    x = unvec(result.basis[0], 2)
    assert np.allclose(x / x[0, 0], identity(2))


def test_eigenvalues_sigma_z(sigma_z):
    """Test that sigma_z has eigenvalues +1 and -1."""
    assert np.allclose(sorted(eigenvalues(sigma_z).real), [-1, 1])


def test_hermitian_eigen_ascending(sigma_x):
    """Test ascending eigenvalues with orthonormal eigenvectors."""
    values, vectors = hermitian_eigen(sigma_x)
    assert np.allclose(values, [-1, 1])
    assert np.allclose(vectors.conj().T @ vectors, identity(2))

    values, vectors = hermitian_eigen(np.diag([0.0, 1.0]))
    assert np.allclose(values, [0, 1])
    assert np.allclose(np.abs(vectors), identity(2))


def test_hermitian_eigen_rejects_non_hermitian(sigma_plus):
    """Test that a non-Hermitian matrix is refused."""
    with pytest.raises(ValueError, match="not Hermitian"):
        hermitian_eigen(sigma_plus)


def test_expm_diagonal_and_zero():
    """Test expm on the zero matrix and a diagonal matrix."""
    assert np.allclose(expm(np.zeros((3, 3))), identity(3))
    assert np.allclose(expm(np.diag([0.5, -2.0])), np.diag(np.exp([0.5, -2.0])))


def test_expm_rotation(sigma_x):
    """Test exp(i pi sigma_x / 2) = i sigma_x."""
    assert np.allclose(expm(1j * np.pi * sigma_x / 2), 1j * sigma_x)


def test_trace_norm_of_traceless_state_difference():
    """Test the trace norm of diag(1, 0) - diag(0, 1)."""
    assert trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0)


def test_null_space_scale_floor(rng):
    """Test that a map made of rounding noise is zero once its norm bound is supplied."""
    noise = 1e-16 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert null_space(noise, 1e-9).nullity == 0
    result = null_space(noise, 1e-9, scale=1.0)
    assert result.nullity == 3
    assert result.threshold == pytest.approx(1e-9)


def test_null_space_residual_and_left_unitary(rng):
    """Test the kernel residual bound and invariance of the nullity under U M."""
    left = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    right = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    m = left @ right
    tol = 1e-9
    result = null_space(m, tol)
    assert result.nullity == 2
    sigma_max = result.singular_values[0]
    for v in result.basis:
        assert np.linalg.norm(m @ v) <= 10 * tol * sigma_max

    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    assert null_space(q @ m, tol).nullity == result.nullity


def test_kron_mixed_product(rng):
    """Test (A (x) B)(C (x) D) = AC (x) BD on random 3 x 3 matrices."""
    a, b, c, d = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(4))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))


def test_dagger_involution_and_commutator_antisymmetry(rng):
    """Test (A^dagger)^dagger = A and [A, B] = -[B, A]."""
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(dagger(dagger(a)), a)
    assert np.allclose(commutator(a, b), -commutator(b, a))


def test_eigenvalues_trace_determinant_and_similarity(rng):
    """Test sum = Tr, product = det, and recovery after S A S^-1."""
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    values = eigenvalues(a)
    assert np.sum(values) == pytest.approx(np.trace(a))
    assert np.prod(values) == pytest.approx(np.linalg.det(a))

    s = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    similar = eigenvalues(s @ a @ np.linalg.inv(s))
    for value in values:
        assert np.min(np.abs(similar - value)) < 1e-9


def test_expm_inverse_and_derivative(rng):
    """Test expm(A) expm(-A) = 1 and d/dt expm(tA) at t = 0 equals A."""
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(expm(a) @ expm(-a), identity(3), atol=1e-10)
    h = 1e-5
    derivative = (expm(h * a) - expm(-h * a)) / (2 * h)
    assert np.allclose(derivative, a, atol=1e-8)
