"""Shared pytest fixtures for testing."""

import numpy as np
import pytest

from app.core.models import Channel, LgksModel
from app.core.schemas import dump_model_file
from app.quantum import zoo


@pytest.fixture
def sigma_minus():
    """Lowering operator E_21."""
    return np.array(zoo.SIGMA_MINUS)


@pytest.fixture
def sigma_plus():
    """Raising operator E_12."""
    return np.array(zoo.SIGMA_PLUS)


@pytest.fixture
def sigma_x():
    return np.array(zoo.SIGMA_X)


@pytest.fixture
def sigma_y():
    return np.array(zoo.SIGMA_Y)


@pytest.fixture
def sigma_z():
    return np.array(zoo.SIGMA_Z)


@pytest.fixture
def rng():
    """Seeded generator so random-matrix tests are reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def two_level(sigma_z):
    """Two-level atom at zero temperature, gamma = 1, H = sigma_z / 2."""
    return zoo.two_level_T0(1.0, sigma_z / 2)


@pytest.fixture
def thermal(sigma_z):
    """Two-level atom in a thermal bath with nbar = 1."""
    return zoo.two_level_finite_T(1.0, 1.0, sigma_z / 2)


@pytest.fixture
def dephasing(sigma_z):
    """Pure dephasing through sigma_z; two steady states."""
    return zoo.dephasing_two_level(1.0, sigma_z / 2)


@pytest.fixture
def lattice(two_level):
    """Two uncoupled decaying atoms."""
    return zoo.atom_lattice(2, two_level)


@pytest.fixture
def lambda_model():
    """Three-level Lambda decay |3> -> |1>, |3> -> |2> with H = 0."""
    from app.quantum.operators import matrix_unit

    return LgksModel(
        hamiltonian=np.zeros((3, 3)),
        channels=(
            Channel(1.0, matrix_unit(1, 3, 3), "E1,3"),
            Channel(1.0, matrix_unit(2, 3, 3), "E2,3"),
        ),
        name="lambda",
    )


@pytest.fixture
def write_model(tmp_path):
    """Write a model to a temporary model file and return its path."""

    def _write(model, name="model.json"):
        path = tmp_path / name
        path.write_text(dump_model_file(model), encoding="utf-8")
        return str(path)

    return _write
