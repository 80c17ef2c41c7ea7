"""Tests for vectorized generators, the steady-state oracle and time evolution."""

import numpy as np
import pytest

from app.core.errors import DimensionError, ModelValidationError
from app.core.models import Channel, LgksModel, LiouvillianKind
from app.quantum import zoo
from app.quantum.operators import identity, matrix_unit, null_space
from app.quantum.superoperator import (
    adjoint_action,
    apply_superoperator,
    build_adjoint_liouvillian,
    build_evans_generator,
    build_liouvillian,
    check_density_matrix,
    evolve,
    evolve_many,
    lindblad_action,
    propagator,
    relaxation_probe,
    spectrum_report,
    steady_states,
)


def assert_density_matrix(rho, d):
    assert rho.shape == (d, d)
    assert np.allclose(rho, rho.conj().T, atol=1e-9)
    assert abs(np.trace(rho) - 1.0) < 1e-9
    assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] > -1e-8


def test_liouvillian_decay_of_excited_population():
    """Test L(E_11) = -E_11 + E_22 for decay without a Hamiltonian."""
    model = zoo.two_level_T0(1.0, np.zeros((2, 2)))
    liouvillian = build_liouvillian(model)
    assert liouvillian.kind is LiouvillianKind.SCHROEDINGER
    expected = -matrix_unit(1, 1, 2) + matrix_unit(2, 2, 2)
    assert np.allclose(apply_superoperator(liouvillian, matrix_unit(1, 1, 2)), expected)


def test_vectorized_matches_direct_action(thermal, rng):
    """Test that the d^2 x d^2 matrix reproduces the generator applied directly."""
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(apply_superoperator(build_liouvillian(thermal), x), lindblad_action(thermal, x))
    assert np.allclose(
        apply_superoperator(build_adjoint_liouvillian(thermal), x), adjoint_action(thermal, x)
    )


def test_generator_is_trace_preserving(lattice, rng):
    """Test Tr L(X) = 0 and L*(1) = 0."""
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert abs(np.trace(lindblad_action(lattice, x))) < 1e-12
    assert np.allclose(apply_superoperator(build_adjoint_liouvillian(lattice), identity(4)), 0)


def test_adjoint_of_excited_projector():
    """Test L*(sigma+ sigma-) = -sigma+ sigma- for decay without a Hamiltonian."""
    model = zoo.two_level_T0(1.0, np.zeros((2, 2)))
    projector = np.array(zoo.SIGMA_PLUS @ zoo.SIGMA_MINUS)
    assert np.allclose(adjoint_action(model, projector), -projector)


def test_adjoint_is_dual(thermal, rng):
    """Test Tr(A L(X)) = Tr(L*(A) X)."""
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    left = np.trace(a @ lindblad_action(thermal, x))
    right = np.trace(adjoint_action(thermal, a) @ x)
    assert left == pytest.approx(right)


def test_evans_form_equals_adjoint_generator(thermal):
    """Test V(X) + K X + X K^dagger against the Heisenberg generator."""
    evans = build_evans_generator(thermal)
    adjoint = build_adjoint_liouvillian(thermal)
    assert np.max(np.abs(evans.matrix - adjoint.matrix)) < 1e-12


def test_dimension_cap(two_level):
    """Test that the dense generator refuses models above the cap."""
    with pytest.raises(DimensionError, match="cap"):
        build_liouvillian(two_level, max_dim=1)


def test_invalid_model_refused(sigma_minus):
    """Test that an invalid model never reaches the generator."""
    model = LgksModel(hamiltonian=np.zeros((2, 2)), channels=(Channel(-1.0, sigma_minus),))
    with pytest.raises(ModelValidationError):
        build_liouvillian(model)


def test_steady_state_of_zero_temperature_decay(two_level):
    """Test the unique steady state diag(0, 1)."""
    result = steady_states(two_level)
    assert result.multiplicity == 1
    assert result.extraction_error is None
    assert np.allclose(result.states[0], np.diag([0, 1]), atol=1e-10)
    assert result.gap == pytest.approx(0.5)


def test_steady_state_thermal(thermal):
    """Test the rate-balance steady state diag(1/3, 2/3)."""
    result = steady_states(thermal)
    assert result.multiplicity == 1
    assert np.allclose(result.states[0], np.diag([1 / 3, 2 / 3]), atol=1e-10)


def test_steady_states_of_dephasing(dephasing):
    """Test that dephasing has two independent stationary states."""
    result = steady_states(dephasing)
    assert result.multiplicity == 2
    assert len(result.states) == 2
    for rho in result.states:
        assert_density_matrix(rho, 2)
        assert np.allclose(lindblad_action(dephasing, rho), 0, atol=1e-10)
        assert np.allclose(rho, np.diag(np.diag(rho)), atol=1e-10)


def test_steady_state_of_lattice(lattice):
    """Test that two decaying atoms relax to the joint ground state."""
    result = steady_states(lattice)
    ground = np.diag([0, 1])
    assert result.multiplicity == 1
    assert np.allclose(result.states[0], np.kron(ground, ground), atol=1e-10)


def test_lambda_decay_has_four_dimensional_kernel(lambda_model):
    """Test that decay into two dark levels leaves a four-dimensional kernel."""
    result = steady_states(lambda_model)
    assert result.multiplicity == 4
    for rho in result.states:
        assert_density_matrix(rho, 3)
        assert abs(rho[2, 2]) < 1e-10


def test_spectrum_of_two_level(two_level):
    """Test the analytic spectrum {0, -1/2 + i, -1/2 - i, -1}."""
    report = spectrum_report(two_level)
    assert np.allclose(report.eigenvalues, [0, -0.5 + 1j, -0.5 - 1j, -1], atol=1e-10)
    assert report.gap == pytest.approx(0.5)
    assert report.kernel_count == 1
    assert report.pure_imaginary_count == 0
    assert report.max_real == pytest.approx(0.0, abs=1e-10)


def test_spectrum_of_dephasing(dephasing):
    """Test that dephasing has two zero eigenvalues."""
    report = spectrum_report(dephasing)
    assert report.kernel_count == 2
    assert report.pure_imaginary_count == 0


def test_pure_imaginary_eigenvalues_detected():
    """Test that undamped coherences show up as pure-imaginary eigenvalues."""
    model = LgksModel(hamiltonian=np.diag([1.0, -1.0]))
    report = spectrum_report(model)
    assert report.kernel_count == 4
    assert report.pure_imaginary_count == 2
    assert report.gap == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: zoo.two_level_T0(1.0, np.array(zoo.SIGMA_Z) / 2),
        lambda: zoo.two_level_finite_T(1.0, 1.0, np.array(zoo.SIGMA_Z) / 2),
        lambda: zoo.dephasing_two_level(1.0, np.array(zoo.SIGMA_Z) / 2),
        lambda: zoo.n_level_atom(4, [1, 1, 1], [0.5, 0.5, 0.5]),
        lambda: zoo.spin_decay(1, 1.0),
        lambda: zoo.boson_decay(3, 1.0),
        lambda: zoo.cavity_emitter(2, 1.0, 1.0, g=0.5),
    ],
)
def test_zoo_models_have_no_pure_imaginary_eigenvalues(factory):
    """Test that dissipation damps every nonzero mode of the zoo models."""
    assert spectrum_report(factory()).pure_imaginary_count == 0


def test_evolve_zero_time_is_identity(thermal):
    """Test that t = 0 returns the initial state."""
    rho = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    assert np.allclose(evolve(thermal, rho, 0.0), rho)


def test_evolve_excited_population_decays():
    """Test that the excited population follows e^{-t}."""
    model = zoo.two_level_T0(1.0, np.zeros((2, 2)))
    times = [0.0, 0.5, 1.0, 2.0]
    states = evolve_many(model, matrix_unit(1, 1, 2), times)
    for t, rho in zip(times, states):
        assert rho[0, 0].real == pytest.approx(np.exp(-t))
        assert_density_matrix(rho, 2)


def test_evolve_rejects_negative_time(two_level):
    """Test that backwards evolution is refused."""
    with pytest.raises(ValueError, match="negative time"):
        evolve(two_level, np.diag([1.0, 0.0]), -1.0)


def test_evolve_rejects_invalid_state(two_level):
    """Test that non-states are refused as initial conditions."""
    with pytest.raises(ValueError, match="invalid initial state"):
        evolve(two_level, np.diag([2.0, 0.0]), 1.0)
    with pytest.raises(ValueError, match="invalid initial state"):
        check_density_matrix(np.diag([1.5, -0.5]), 2)
    with pytest.raises(DimensionError):
        check_density_matrix(np.eye(3) / 3, 2)


def test_propagator_semigroup_property(thermal):
    """Test exp((s + t) L) = exp(s L) exp(t L)."""
    liouvillian = build_liouvillian(thermal)
    assert np.allclose(
        propagator(liouvillian, 1.5), propagator(liouvillian, 0.5) @ propagator(liouvillian, 1.0)
    )


def test_relaxation_probe_two_level(two_level):
    """Test that random states approach diag(0, 1) at the spectral-gap rate."""
    table = relaxation_probe(two_level, n_samples=20, seed=0)
    assert table.applicable
    assert table.monotone
    assert table.consistent_with_gap
    assert table.distances.shape == (20, 6)
    last = list(table.times).index(10.0)
    assert table.distances[:, last].max() <= 7e-3


def test_relaxation_probe_is_order_independent(thermal):
    """Test that the table does not depend on the thread-pool width."""
    serial = relaxation_probe(thermal, n_samples=6, seed=3, workers=1)
    pooled = relaxation_probe(thermal, n_samples=6, seed=3, workers=4)
    assert np.allclose(serial.distances, pooled.distances, rtol=0, atol=1e-14)


def test_relaxation_probe_not_applicable_for_dephasing(dephasing):
    """Test that the probe declines models with several steady states."""
    table = relaxation_probe(dephasing, n_samples=4)
    assert not table.applicable
    assert "multiplicity 2" in table.note


@pytest.mark.parametrize("fixture", ["two_level", "thermal", "dephasing", "lattice", "lambda_model"])
def test_kernels_of_generator_and_adjoint_agree(fixture, request):
    """Test dim ker L = dim ker L* on the zoo models."""
    model = request.getfixturevalue(fixture)
    forward = null_space(build_liouvillian(model).matrix).nullity
    backward = null_space(build_adjoint_liouvillian(model).matrix).nullity
    assert forward == backward == steady_states(model).multiplicity
