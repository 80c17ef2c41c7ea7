"""Dense complex matrix primitives and the linear algebra the criteria build on.

Matrices are plain ``numpy`` complex128 arrays. Indices in `matrix_unit` are
1-based so that E_{i,j} reads as in the text. Vectorization is column-stacking
throughout the package.
"""

import logging
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.config import settings
from app.core.errors import DimensionError, NumericalError
from app.core.models import ComplexMatrix, NullSpaceResult

logger = logging.getLogger(__name__)


def as_matrix(a, name: str = "matrix") -> ComplexMatrix:
    """Convert `a` to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(a, name: str = "matrix") -> ComplexMatrix:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def _same_square(a, b) -> Tuple[ComplexMatrix, ComplexMatrix]:
    a = as_square(a, "left operand")
    b = as_square(b, "right operand")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def dagger(a) -> ComplexMatrix:
    """Conjugate transpose."""
    return np.ascontiguousarray(as_square(a).conj().T)


def commutator(a, b) -> ComplexMatrix:
    """[A, B] = AB - BA."""
    a, b = _same_square(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> ComplexMatrix:
    """{A, B} = AB + BA."""
    a, b = _same_square(a, b)
    return a @ b + b @ a


def kron(a, b) -> ComplexMatrix:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(ops: Iterable) -> ComplexMatrix:
    """Kronecker product of a sequence, left to right."""
    return reduce(kron, ops)


def identity(d: int) -> ComplexMatrix:
    return np.eye(d, dtype=np.complex128)


def frobenius_inner(a, b) -> complex:
    """Tr(A^dagger B)."""
    return complex(np.vdot(np.asarray(a), np.asarray(b)))


def matrix_unit(i: int, j: int, d: int) -> ComplexMatrix:
    """E_{i,j}: one in row i, column j (1-based), zero elsewhere."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    if not (1 <= i <= d and 1 <= j <= d):
        raise DimensionError(f"matrix unit index ({i}, {j}) out of range for d={d}")
    unit = np.zeros((d, d), dtype=np.complex128)
    unit[i - 1, j - 1] = 1.0
    return unit


def traceless_orthonormal_basis(d: int) -> List[ComplexMatrix]:
    """Normalized generalized Gell-Mann matrices.

    Ordered as all symmetric members (E_jk + E_kj, j < k), then all
    antisymmetric members (-i E_jk + i E_kj, j < k), then the diagonal family.
    Each has Tr G = 0 and Tr(G_i^dagger G_j) = delta_ij; for d = 2 the result is
    sigma_x, sigma_y, sigma_z divided by sqrt(2).
    """
    if d < 2:
        raise DimensionError(f"traceless basis needs d >= 2, got {d}")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    norm = 1.0 / np.sqrt(2.0)

    symmetric = []
    antisymmetric = []
    for j, k in pairs:
        s = np.zeros((d, d), dtype=np.complex128)
        s[j, k] = s[k, j] = norm
        symmetric.append(s)
        a = np.zeros((d, d), dtype=np.complex128)
        a[j, k] = -1j * norm
        a[k, j] = 1j * norm
        antisymmetric.append(a)

    diagonal = []
    for l in range(1, d):
        entries = np.zeros(d, dtype=np.complex128)
        entries[:l] = 1.0
        entries[l] = -l
        diagonal.append(np.diag(entries / np.sqrt(l * (l + 1))))

    return symmetric + antisymmetric + diagonal


def vec(a) -> np.ndarray:
    """Column-stacking vectorization."""
    return as_matrix(a).reshape(-1, order="F")


def unvec(v, d: int) -> ComplexMatrix:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != d * d:
        raise DimensionError(f"vector of length {v.size} cannot be unstacked to {d}x{d}")
    return v.reshape((d, d), order="F")


def null_space(m, tol: Optional[float] = None, scale: float = 0.0) -> NullSpaceResult:
    """Kernel of `m` from its singular values.

    A direction is in the kernel when its singular value is at most
    tol * max(sigma_max, scale); columns beyond the number of rows count as
    zero singular values. `scale` is an a-priori bound on the norm of the map,
    so a map made only of rounding noise is recognised as zero. If both are
    zero the whole space is returned.
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol}")
    m = as_matrix(m)
    n_cols = m.shape[1]

    try:
        _, s, vh = scipy.linalg.svd(m, full_matrices=True, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        logger.warning("gesdd failed, retrying with gesvd", extra={"error": str(e)})
        try:
            _, s, vh = scipy.linalg.svd(m, full_matrices=True, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e2:
            logger.error("SVD did not converge", extra={"shape": m.shape}, exc_info=True)
            raise NumericalError(f"SVD did not converge: {e2}") from e2

    singular_values = np.zeros(n_cols)
    singular_values[: s.size] = s
    sigma_max = float(singular_values[0]) if n_cols else 0.0
    threshold = tol * max(sigma_max, float(scale))
    null_mask = singular_values <= threshold
    basis = tuple(np.ascontiguousarray(vh[k].conj()) for k in np.flatnonzero(null_mask))

    result = NullSpaceResult(
        basis=basis,
        nullity=len(basis),
        singular_values=singular_values,
        threshold=threshold,
    )
    logger.debug(
        "Null space computed",
        extra={"shape": m.shape, "nullity": result.nullity, "margin": result.margin},
    )
    return result


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a square matrix, with algebraic multiplicity."""
    a = as_square(a)
    try:
        values = scipy.linalg.eigvals(a)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error("Eigenvalue solver failed", extra={"dim": a.shape[0]}, exc_info=True)
        raise NumericalError(f"eigenvalue computation did not converge: {e}") from e
    if not np.all(np.isfinite(values)):
        raise NumericalError("eigenvalue computation produced non-finite values")
    return values


def hermitian_residual(a) -> float:
    """||A - A^dagger||_F."""
    a = np.asarray(a)
    return float(np.linalg.norm(a - a.conj().T))


def hermitian_eigen(a, tol: float = 1e-10) -> Tuple[np.ndarray, ComplexMatrix]:
    """Ascending real eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    a = as_square(a)
    scale = float(np.linalg.norm(a))
    residual = hermitian_residual(a)
    if residual > tol * scale:
        raise ValueError(f"matrix is not Hermitian: ||A - A^dagger||_F = {residual:.3e}")
    try:
        values, vectors = scipy.linalg.eigh(0.5 * (a + a.conj().T))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error("Hermitian eigensolver failed", extra={"dim": a.shape[0]}, exc_info=True)
        raise NumericalError(f"Hermitian eigen decomposition did not converge: {e}") from e
    return values, vectors


def expm(a) -> ComplexMatrix:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    a = as_square(a)
    with np.errstate(over="ignore", invalid="ignore"):
        result = scipy.linalg.expm(a)
    if not np.all(np.isfinite(result)):
        logger.error("Matrix exponential overflowed", extra={"norm": float(np.linalg.norm(a))})
        raise NumericalError("matrix exponential overflowed")
    return result


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.sum(scipy.linalg.svdvals(as_matrix(a))))


def stack_commutator_maps(ops: Sequence) -> np.ndarray:
    """Matrix of X -> ([X, A_1], ..., [X, A_k]) acting on vec(X)."""
    if not ops:
        raise ValueError("need at least one operator")
    mats = [as_square(op, "operator") for op in ops]
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise DimensionError("all operators must share one dimension")
    eye = identity(d)
    # vec(XA - AX) = (A^T kron 1 - 1 kron A) vec(X)
    blocks = [np.kron(m.T, eye) - np.kron(eye, m) for m in mats]
    return np.vstack(blocks)
