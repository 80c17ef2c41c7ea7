"""Vectorized generators, steady states, spectra and time evolution.

Matrices act on column-stacked operators, so for every model
unvec(build_liouvillian(m).matrix @ vec(rho)) is the Lindblad generator
applied to rho.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.errors import DimensionError
from app.core.models import (
    ComplexMatrix,
    LgksModel,
    LiouvillianKind,
    LiouvillianMatrix,
    RelaxationTable,
    SpectrumReport,
    SteadyStateResult,
)
from app.quantum.operators import (
    as_square,
    eigenvalues,
    expm,
    hermitian_eigen,
    hermitian_residual,
    identity,
    null_space,
    trace_norm,
    unvec,
    vec,
)
from app.quantum.validation import ensure_valid

logger = logging.getLogger(__name__)

# Postconditions on every extracted or propagated state
STATE_HERMITICITY_TOL = 1e-9
STATE_TRACE_TOL = 1e-9
STATE_PSD_TOL = 1e-8

DEFAULT_TIME_GRID = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


def checked_model(model: LgksModel, max_dim: Optional[int]) -> LgksModel:
    ensure_valid(model)
    max_dim = settings.MAX_MODEL_DIM if max_dim is None else max_dim
    if model.dim > max_dim:
        raise DimensionError(
            f"model dimension {model.dim} exceeds the dense superoperator cap {max_dim}"
        )
    return model


def build_liouvillian(model: LgksModel, max_dim: Optional[int] = None) -> LiouvillianMatrix:
    """
    Schroedinger-picture generator as a d^2 x d^2 matrix.

    Uses vec(A X B) = (B^T kron A) vec(X) on
    -i[H, rho] + sum_i gamma_i (B_i rho B_i^dagger - 1/2 {B_i^dagger B_i, rho}).
    """
    model = checked_model(model, max_dim)
    d = model.dim
    eye = identity(d)
    h = model.hamiltonian

    matrix = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for channel in model.channels:
        b = channel.operator
        bdb = b.conj().T @ b
        matrix = matrix + channel.rate * (
            np.kron(b.conj(), b) - 0.5 * np.kron(eye, bdb) - 0.5 * np.kron(bdb.T, eye)
        )

    return LiouvillianMatrix(dim=d, matrix=matrix, kind=LiouvillianKind.SCHROEDINGER)


def build_adjoint_liouvillian(
    model: LgksModel, max_dim: Optional[int] = None
) -> LiouvillianMatrix:
    """Heisenberg-picture generator: +i[H, O] + sum_i gamma_i (B_i^dagger O B_i - 1/2 {B_i^dagger B_i, O})."""
    model = checked_model(model, max_dim)
    d = model.dim
    eye = identity(d)
    h = model.hamiltonian

    matrix = 1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for channel in model.channels:
        b = channel.operator
        bdb = b.conj().T @ b
        matrix = matrix + channel.rate * (
            np.kron(b.T, b.conj().T) - 0.5 * np.kron(eye, bdb) - 0.5 * np.kron(bdb.T, eye)
        )

    return LiouvillianMatrix(dim=d, matrix=matrix, kind=LiouvillianKind.HEISENBERG)


def build_evans_generator(model: LgksModel, max_dim: Optional[int] = None) -> LiouvillianMatrix:
    """
    Heisenberg generator written as X -> V(X) + K X + X K^dagger.

    V(X) = sum_i gamma_i B_i^dagger X B_i is completely positive and
    K = iH - V(1)/2. Agrees with `build_adjoint_liouvillian`.
    """
    model = checked_model(model, max_dim)
    d = model.dim
    eye = identity(d)

    v_matrix = np.zeros((d * d, d * d), dtype=np.complex128)
    v_unit = np.zeros((d, d), dtype=np.complex128)
    for channel in model.channels:
        b = channel.operator
        v_matrix += channel.rate * np.kron(b.T, b.conj().T)
        v_unit += channel.rate * (b.conj().T @ b)

    k = 1j * model.hamiltonian - 0.5 * v_unit
    matrix = v_matrix + np.kron(eye, k) + np.kron(k.conj(), eye)
    return LiouvillianMatrix(dim=d, matrix=matrix, kind=LiouvillianKind.HEISENBERG)


def lindblad_action(model: LgksModel, rho) -> ComplexMatrix:
    """Generator applied directly, without vectorization."""
    rho = as_square(rho, "operand")
    h = model.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for channel in model.channels:
        b = channel.operator
        bd = b.conj().T
        out = out + channel.rate * (b @ rho @ bd - 0.5 * (bd @ b @ rho + rho @ bd @ b))
    return out


def adjoint_action(model: LgksModel, o) -> ComplexMatrix:
    """Heisenberg generator applied directly, without vectorization."""
    o = as_square(o, "operand")
    h = model.hamiltonian
    out = 1j * (h @ o - o @ h)
    for channel in model.channels:
        b = channel.operator
        bd = b.conj().T
        out = out + channel.rate * (bd @ o @ b - 0.5 * (bd @ b @ o + o @ bd @ b))
    return out


def apply_superoperator(liouvillian: LiouvillianMatrix, x) -> ComplexMatrix:
    """unvec(matrix @ vec(x))."""
    x = as_square(x, "operand")
    if x.shape[0] != liouvillian.dim:
        raise DimensionError(
            f"operand of dimension {x.shape[0]} for a generator on dimension {liouvillian.dim}"
        )
    return unvec(liouvillian.matrix @ vec(x), liouvillian.dim)


def _zero_threshold(values: np.ndarray, tol: float) -> float:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return tol * max(1.0, scale)


def _spectral_gap(values: np.ndarray, threshold: float) -> Optional[float]:
    nonzero = values[np.abs(values) > threshold]
    if nonzero.size == 0:
        return None
    return float(-np.max(nonzero.real))


def _hermitian_kernel_basis(kernel: Sequence[ComplexMatrix], d: int) -> List[ComplexMatrix]:
    """Real-orthonormal Hermitian basis of the (dagger-closed) kernel."""
    if not kernel:
        return []
    candidates = []
    for k in kernel:
        candidates.append(0.5 * (k + k.conj().T))
        candidates.append(-0.5j * (k - k.conj().T))
    # Hermitian matrices as real vectors; left singular vectors are real combinations
    columns = np.column_stack([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in candidates])
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    rank = int(np.sum(s > 1e-8 * s[0])) if s.size and s[0] > 0.0 else 0
    if rank != len(kernel):
        logger.warning(
            "Hermitian kernel basis rank differs from nullity",
            extra={"rank": rank, "nullity": len(kernel)},
        )
    count = min(rank, len(kernel)) if rank else 0
    basis = []
    for idx in range(count):
        column = u[:, idx]
        h = (column[: d * d] + 1j * column[d * d :]).reshape(d, d)
        basis.append(0.5 * (h + h.conj().T))
    return basis


def _normalized_state(h: ComplexMatrix) -> Optional[ComplexMatrix]:
    """Sign-fixed, trace-normalized Hermitian matrix, or None if it is not a state."""
    h = 0.5 * (h + h.conj().T)
    trace = float(np.trace(h).real)
    if abs(trace) <= 1e-12 * max(1.0, float(np.linalg.norm(h))):
        return None
    rho = h / trace
    values, _ = hermitian_eigen(rho, tol=1e-8)
    if values[0] < -STATE_PSD_TOL:
        return None
    return rho


def _project(matrix: ComplexMatrix, kernel_vectors: Sequence[np.ndarray], d: int) -> ComplexMatrix:
    v = vec(matrix)
    projected = sum(np.vdot(k, v) * k for k in kernel_vectors)
    return unvec(projected, d)


def _extract_states(
    hermitian_basis: List[ComplexMatrix], kernel_vectors: Sequence[np.ndarray], d: int
) -> Tuple[Tuple[ComplexMatrix, ...], Optional[str]]:
    multiplicity = len(kernel_vectors)
    if multiplicity == 0:
        return (), "empty kernel"
    if len(hermitian_basis) < multiplicity:
        return (), (
            f"Hermitian kernel basis has rank {len(hermitian_basis)}, expected {multiplicity}"
        )

    if multiplicity == 1:
        rho = _normalized_state(hermitian_basis[0])
        if rho is None:
            return (), "kernel element is not semidefinite or has zero trace"
        return (rho,), None

    # Positive and negative parts of stationary Hermitian operators are stationary
    candidates = []
    for h in hermitian_basis:
        values, vectors = hermitian_eigen(h, tol=1e-8)
        cutoff = 1e-10 * float(np.max(np.abs(values)))
        for sign in (1.0, -1.0):
            mask = sign * values > cutoff
            if not np.any(mask):
                continue
            part = (vectors[:, mask] * (sign * values[mask])) @ vectors[:, mask].conj().T
            candidates.append(_project(part, kernel_vectors, d))

    states = []
    stacked = np.zeros((0, d * d), dtype=np.complex128)
    for candidate in candidates:
        rho = _normalized_state(candidate)
        if rho is None:
            continue
        trial = np.vstack([stacked, vec(rho)])
        if np.linalg.matrix_rank(trial, tol=1e-8) > len(states):
            states.append(rho)
            stacked = trial
        if len(states) == multiplicity:
            return tuple(states), None

    return tuple(states), f"found {len(states)} of {multiplicity} independent states"


def steady_states(
    model: LgksModel, tol: Optional[float] = None, max_dim: Optional[int] = None
) -> SteadyStateResult:
    """
    Fixed points of the generator and the physical states spanning them.

    The multiplicity is the nullity of the Liouvillian; it is reported even when
    state extraction fails, in which case `extraction_error` says why and the
    raw kernel is still returned.
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    start = time.perf_counter()
    liouvillian = build_liouvillian(model, max_dim)
    d = liouvillian.dim

    null = null_space(liouvillian.matrix, tol)
    kernel = tuple(unvec(v, d) for v in null.basis)
    values = eigenvalues(liouvillian.matrix)
    gap = _spectral_gap(values, _zero_threshold(values, tol))

    hermitian_basis = _hermitian_kernel_basis(kernel, d)
    states, error = _extract_states(hermitian_basis, null.basis, d)
    if error:
        logger.warning(
            "Steady-state extraction failed",
            extra={"model": model.name, "multiplicity": null.nullity, "error": error},
        )

    result = SteadyStateResult(
        multiplicity=null.nullity,
        states=states,
        kernel_basis=kernel,
        gap=gap,
        tol=tol,
        margin=null.margin,
        extraction_error=error,
    )
    logger.info(
        "Steady states extracted",
        extra={
            "model": model.name,
            "dim": d,
            "multiplicity": result.multiplicity,
            "gap": gap,
            "margin": null.margin,
            "elapsed_ms": round((time.perf_counter() - start) * 1000, 2),
        },
    )
    return result


def spectrum_report(
    model: LgksModel, tol: Optional[float] = None, max_dim: Optional[int] = None
) -> SpectrumReport:
    """All d^2 eigenvalues of the generator, sorted by real part descending."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    values = eigenvalues(build_liouvillian(model, max_dim).matrix)
    order = np.lexsort((-values.imag, -values.real))
    values = values[order]

    threshold = _zero_threshold(values, tol)
    near_axis = np.abs(values.real) <= threshold
    pure_imaginary = near_axis & (np.abs(values.imag) > threshold)
    report = SpectrumReport(
        eigenvalues=values,
        kernel_count=int(np.sum(near_axis)),
        pure_imaginary_count=int(np.sum(pure_imaginary)),
        gap=_spectral_gap(values, threshold),
        max_real=float(np.max(values.real)),
        zero_threshold=threshold,
    )
    if report.pure_imaginary_count:
        logger.warning(
            "Generator has pure-imaginary eigenvalues",
            extra={"model": model.name, "count": report.pure_imaginary_count},
        )
    return report


def check_density_matrix(rho, d: int) -> ComplexMatrix:
    """Return `rho` as an array, or raise ValueError if it is not a d x d state."""
    rho = as_square(rho, "initial state")
    if rho.shape[0] != d:
        raise DimensionError(f"initial state has dimension {rho.shape[0]}, model has {d}")
    residual = hermitian_residual(rho)
    if residual > STATE_HERMITICITY_TOL:
        raise ValueError(f"invalid initial state: not Hermitian (residual {residual:.3e})")
    trace = np.trace(rho)
    if abs(trace - 1.0) > STATE_TRACE_TOL:
        raise ValueError(f"invalid initial state: trace {trace.real:.12g} != 1")
    smallest = float(hermitian_eigen(rho, tol=1e-8)[0][0])
    if smallest < -STATE_TRACE_TOL:
        raise ValueError(f"invalid initial state: negative eigenvalue {smallest:.3e}")
    return rho


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    if t < 0.0:
        raise ValueError(f"negative time {t!r}: the dynamical semigroup has no inverse")
    return t


def propagator(liouvillian: LiouvillianMatrix, t: float) -> ComplexMatrix:
    """exp(t L) as a d^2 x d^2 matrix."""
    t = _check_time(t)
    if t == 0.0:
        return identity(liouvillian.dim**2)
    return expm(t * liouvillian.matrix)


def evolve(model: LgksModel, rho0, t: float, max_dim: Optional[int] = None) -> ComplexMatrix:
    """State at time t >= 0 starting from rho0."""
    t = _check_time(t)
    liouvillian = build_liouvillian(model, max_dim)
    rho0 = check_density_matrix(rho0, liouvillian.dim)
    return unvec(propagator(liouvillian, t) @ vec(rho0), liouvillian.dim)


def evolve_many(
    model: LgksModel, rho0, times: Sequence[float], max_dim: Optional[int] = None
) -> List[ComplexMatrix]:
    """States at each of `times`, one propagator per time."""
    times = [_check_time(t) for t in times]
    liouvillian = build_liouvillian(model, max_dim)
    rho0 = check_density_matrix(rho0, liouvillian.dim)
    v0 = vec(rho0)
    return [unvec(propagator(liouvillian, t) @ v0, liouvillian.dim) for t in times]


def _decay_rate(times: np.ndarray, worst: np.ndarray, floor: float = 1e-11) -> Optional[float]:
    """Log-slope of the worst-case distance over the last two grid times above `floor`."""
    usable = [k for k in range(len(times)) if worst[k] > floor and times[k] > 0.0]
    if len(usable) < 2:
        return None
    a, b = usable[-2], usable[-1]
    return float(-(math.log(worst[b]) - math.log(worst[a])) / (times[b] - times[a]))


def relaxation_probe(
    model: LgksModel,
    n_samples: int = 20,
    t_grid: Optional[Sequence[float]] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> RelaxationTable:
    """
    Trace distance to the unique steady state from random initial states.

    Samples are drawn with seeds seed, seed + 1, ... and evaluated on a thread
    pool; the table does not depend on evaluation order. Models without a
    unique extracted steady state yield a non-applicable table.
    """
    from app.quantum.sampling import random_density_matrix

    seed = settings.DEFAULT_SEED if seed is None else seed
    workers = settings.WORKERS if workers is None else workers
    times = np.array([_check_time(t) for t in (t_grid or DEFAULT_TIME_GRID)])

    oracle = steady_states(model, tol)
    if oracle.multiplicity != 1 or not oracle.states:
        note = (
            f"not applicable: steady-state multiplicity {oracle.multiplicity}"
            if oracle.multiplicity != 1
            else f"not applicable: {oracle.extraction_error}"
        )
        return RelaxationTable(
            applicable=False,
            times=times,
            distances=np.zeros((0, times.size)),
            seed=seed,
            gap=oracle.gap,
            note=note,
        )

    liouvillian = build_liouvillian(model)
    d = liouvillian.dim
    rho_ss = oracle.states[0]
    propagators = [propagator(liouvillian, t) for t in times]

    def distances_for(sample: int) -> np.ndarray:
        v0 = vec(random_density_matrix(d, seed=seed + sample))
        return np.array([trace_norm(unvec(p @ v0, d) - rho_ss) for p in propagators])

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(distances_for, range(n_samples)))
    distances = np.vstack(rows) if rows else np.zeros((0, times.size))

    # Trace distance to a fixed point never grows under a CPTP map
    order = np.argsort(times)
    monotone = bool(np.all(np.diff(distances[:, order], axis=1) <= 1e-10))
    worst = distances.max(axis=0) if distances.size else np.zeros(times.size)
    rate = _decay_rate(times[order], worst[order])
    if rate is None or oracle.gap is None:
        consistent = True
        note = "distances reached the numerical floor"
    else:
        consistent = rate >= 0.5 * oracle.gap
        note = f"observed rate {rate:.6g}, spectral gap {oracle.gap:.6g}"

    logger.info(
        "Relaxation probe finished",
        extra={"model": model.name, "samples": n_samples, "monotone": monotone, "rate": rate},
    )
    return RelaxationTable(
        applicable=True,
        times=times,
        distances=distances,
        seed=seed,
        gap=oracle.gap,
        monotone=monotone,
        rate_estimate=rate,
        consistent_with_gap=consistent,
        note=note,
    )
