"""Numerical core: operators, models, superoperators, criteria and oracles."""

from app.quantum.operators import (
    commutator,
    anticommutator,
    dagger,
    kron,
    matrix_unit,
    null_space,
    traceless_orthonormal_basis,
)
from app.quantum.validation import validate

# Sampling helpers depend on qiskit and are imported lazily
__all__ = [
    "commutator",
    "anticommutator",
    "dagger",
    "kron",
    "matrix_unit",
    "null_space",
    "traceless_orthonormal_basis",
    "validate",
    "random_unitary",
    "random_density_matrix",
    "random_model",
]


def __getattr__(name):
    """Lazy import for the qiskit-backed sampling helpers."""
    if name in ("random_unitary", "random_density_matrix", "random_model"):
        from app.quantum import sampling

        return getattr(sampling, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
