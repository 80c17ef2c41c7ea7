"""Seeded random quantum objects: states, unitaries and whole models."""

import logging
from typing import Optional

import numpy as np

from app.core.errors import DimensionError
from app.core.models import Channel, ComplexMatrix, LgksModel

logger = logging.getLogger(__name__)

RATE_RANGE = (0.1, 10.0)


def random_unitary(d: int, seed: Optional[int] = None) -> ComplexMatrix:
    """Haar-random d x d unitary."""
    # Lazy import keeps qiskit off the import path of the numerical core
    from qiskit.quantum_info import random_unitary as qiskit_random_unitary

    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    return np.asarray(qiskit_random_unitary(d, seed=seed).data, dtype=np.complex128)


def random_density_matrix(d: int, seed: Optional[int] = None) -> ComplexMatrix:
    """Full-rank Hilbert-Schmidt random density matrix."""
    from qiskit.quantum_info import random_density_matrix as qiskit_random_density_matrix

    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    rho = np.asarray(qiskit_random_density_matrix(d, seed=seed).data, dtype=np.complex128)
    # Remove rounding asymmetry so downstream Hermiticity checks see an exact state
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def gaussian_matrix(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Complex Ginibre matrix with unit-variance entries."""
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)


def random_model(d: int, n_channels: int, seed: Optional[int] = None) -> LgksModel:
    """
    Random LGKS model for soundness sweeps.

    Args:
        d: Hilbert dimension
        n_channels: Number of dissipative channels (>= 1)
        seed: Seed for numpy's default_rng

    Returns:
        Model with Gaussian Hermitian H, Gaussian Lindblad operators and
        rates uniform in [0.1, 10]
    """
    if d < 2:
        raise DimensionError(f"random model needs d >= 2, got {d}")
    if n_channels < 1:
        raise ValueError(f"need at least one channel, got {n_channels}")

    rng = np.random.default_rng(seed)
    g = gaussian_matrix(d, rng)
    hamiltonian = 0.5 * (g + g.conj().T)
    channels = tuple(
        Channel(rng.uniform(*RATE_RANGE), gaussian_matrix(d, rng), f"G{k}")
        for k in range(1, n_channels + 1)
    )
    logger.debug("Random model drawn", extra={"dim": d, "channels": n_channels, "seed": seed})
    return LgksModel(
        hamiltonian=hamiltonian,
        channels=channels,
        name="random",
        description=f"random model d={d}, {n_channels} channels, seed={seed}",
    )
