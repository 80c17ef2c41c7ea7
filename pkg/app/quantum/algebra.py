"""Numerical oracles for the matrix-algebra facts behind the ladder criteria."""

import logging
from typing import List, Optional, Sequence

import numpy as np

from app.config import settings
from app.core.errors import DimensionError
from app.core.models import AlgebraCheck, ComplexMatrix, CompositeLayout, LadderSpec
from app.quantum.criteria import BORDERLINE_FACTOR, commutant
from app.quantum.operators import as_square, commutator, dagger, kron, matrix_unit
from app.quantum.zoo import embed_local

logger = logging.getLogger(__name__)


def build_ladder(spec: LadderSpec) -> ComplexMatrix:
    """Matrix with `spec.subdiagonal` on the first subdiagonal and zeros elsewhere."""
    return np.diag(np.asarray(spec.subdiagonal, dtype=np.complex128), k=-1)


def random_ladder_spec(
    d: int, rng: np.random.Generator, low: float = 1e-3, high: float = 1e3
) -> LadderSpec:
    """Ladder with log-uniform moduli in [low, high] and uniform phases."""
    moduli = np.exp(rng.uniform(np.log(low), np.log(high), size=d - 1))
    phases = np.exp(2j * np.pi * rng.uniform(size=d - 1))
    return LadderSpec(d=d, subdiagonal=tuple(moduli * phases))


def _check(ops: Sequence[ComplexMatrix], tol: float, min_ratio: float, subject: str) -> AlgebraCheck:
    result = commutant(ops, tol)
    holds = result.dimension == 1
    borderline = min_ratio <= BORDERLINE_FACTOR * tol or result.null.margin < BORDERLINE_FACTOR
    if not holds:
        logger.warning(
            "Trivial-commutant oracle failed; numerical tolerance defect",
            extra={
                "subject": subject,
                "commutant_dimension": result.dimension,
                "min_entry_ratio": min_ratio,
                "tol": tol,
            },
        )
    return AlgebraCheck(
        holds=holds,
        commutant_dimension=result.dimension,
        borderline=bool(borderline),
        margin=result.null.margin,
    )


def prop1_oracle(spec: LadderSpec, tol: Optional[float] = None) -> AlgebraCheck:
    """Whether {B, B^dagger}' is trivial for the ladder B built from `spec`."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    ladder = build_ladder(spec)
    return _check([ladder, dagger(ladder)], tol, spec.min_entry_ratio, f"ladder d={spec.d}")


def prop2_oracle(
    specs: Sequence[LadderSpec], tol: Optional[float] = None, max_dim: Optional[int] = None
) -> AlgebraCheck:
    """Whether the embedded ladders of every factor and their adjoints have a trivial commutant."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    max_dim = settings.MAX_MODEL_DIM if max_dim is None else max_dim
    if not specs:
        raise ValueError("need at least one ladder spec")
    layout = CompositeLayout(tuple(spec.d for spec in specs))
    if layout.total_dim > max_dim:
        raise DimensionError(f"composite dimension {layout.total_dim} exceeds the cap {max_dim}")

    ops = []
    for site, spec in enumerate(specs, start=1):
        embedded = embed_local(build_ladder(spec), site, layout)
        ops.extend([embedded, dagger(embedded)])
    min_ratio = min(spec.min_entry_ratio for spec in specs)
    return _check(ops, tol, min_ratio, f"composite {list(layout.factor_dims)}")


def block_decompose(x, d_head: int) -> np.ndarray:
    """
    Blocks X_ij with X = sum_ij E_ij kron X_ij.

    Returns an array of shape (d_head, d_head, d_rest, d_rest) where
    blocks[i, j][l, m] = X[i * d_rest + l, j * d_rest + m] (0-based).
    """
    x = as_square(x, "matrix")
    n = x.shape[0]
    if d_head < 1 or n % d_head:
        raise DimensionError(f"dimension {n} is not divisible by {d_head}")
    d_rest = n // d_head
    return x.reshape(d_head, d_rest, d_head, d_rest).transpose(0, 2, 1, 3).copy()


def reassemble(blocks) -> ComplexMatrix:
    """Inverse of `block_decompose`: sum_ij kron(E_ij, blocks[i, j])."""
    blocks = np.asarray(blocks, dtype=np.complex128)
    if blocks.ndim != 4 or blocks.shape[0] != blocks.shape[1] or blocks.shape[2] != blocks.shape[3]:
        raise DimensionError(f"expected a square grid of square blocks, got shape {blocks.shape}")
    d_head, _, d_rest, _ = blocks.shape
    out = np.zeros((d_head * d_rest, d_head * d_rest), dtype=np.complex128)
    for i in range(d_head):
        for j in range(d_head):
            out += kron(matrix_unit(i + 1, j + 1, d_head), blocks[i, j])
    return out


def matrix_unit_commutation_residual(d: int) -> float:
    """Largest ||[E_ij, E_wk] - (delta_jw E_ik - delta_ki E_wj)||_F over all index tuples."""
    units: List[List[ComplexMatrix]] = [
        [matrix_unit(i, j, d) for j in range(1, d + 1)] for i in range(1, d + 1)
    ]
    zero = np.zeros((d, d), dtype=np.complex128)
    worst = 0.0
    for i in range(d):
        for j in range(d):
            for w in range(d):
                for k in range(d):
                    expected = (units[i][k] if j == w else zero) - (units[w][j] if k == i else zero)
                    residual = np.linalg.norm(commutator(units[i][j], units[w][k]) - expected)
                    worst = max(worst, float(residual))
    return worst
