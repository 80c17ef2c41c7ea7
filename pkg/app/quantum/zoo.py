"""Constructors for the LGKS models used throughout the package.

Basis conventions: computational basis |1>...|d> with the two-level
sigma^- = E_{2,1} taking |1> to |2>; spin bases run from m = +S down to
m = -S so that S^- is lower-ladder; Fock bases run n = 0 ... n_max upwards.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from app.config import settings
from app.core.errors import DimensionError, ModelValidationError
from app.core.models import Channel, ComplexMatrix, CompositeLayout, LgksModel, frozen_matrix
from app.quantum.operators import (
    as_square,
    dagger,
    hermitian_residual,
    identity,
    kron_all,
    matrix_unit,
)
from app.quantum.validation import HERMITICITY_TOL, ensure_valid

logger = logging.getLogger(__name__)

SIGMA_MINUS = frozen_matrix([[0, 0], [1, 0]])
SIGMA_PLUS = frozen_matrix([[0, 1], [0, 0]])
SIGMA_X = frozen_matrix([[0, 1], [1, 0]])
SIGMA_Y = frozen_matrix([[0, -1j], [1j, 0]])
SIGMA_Z = frozen_matrix([[1, 0], [0, -1]])

SpinValue = Union[int, float, Fraction]


def _hamiltonian(h, d: int) -> ComplexMatrix:
    h = as_square(h, "hamiltonian")
    if h.shape != (d, d):
        raise ModelValidationError(f"hamiltonian must be {d}x{d}, got shape {h.shape}")
    residual = hermitian_residual(h)
    if residual > HERMITICITY_TOL * max(1.0, float(np.linalg.norm(h))):
        raise ModelValidationError(
            f"hamiltonian is not Hermitian, ||H - H^dagger||_F = {residual:.6g}"
        )
    return h


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0.0:
        raise ModelValidationError(f"{name} must be positive, got {value!r}")
    return value


def two_level_T0(gamma: float, hamiltonian) -> LgksModel:
    """Two-level system decaying into a zero-temperature bath: channel (gamma, sigma^-)."""
    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, 2),
        channels=(Channel(_positive("gamma", gamma), SIGMA_MINUS, "sigma-"),),
        name="two-level-T0",
        description="two-level system, zero-temperature bath",
    )
    return ensure_valid(model)


def two_level_finite_T(gamma: float, nbar: float, hamiltonian) -> LgksModel:
    """Two-level system in a thermal bath with mean occupation `nbar`.

    Emission at gamma * (1 + nbar) through sigma^-, absorption at gamma * nbar
    through sigma^+; the absorption channel is dropped when nbar == 0.
    """
    gamma = _positive("gamma", gamma)
    nbar = float(nbar)
    if not nbar >= 0.0:
        raise ModelValidationError(f"nbar must be non-negative, got {nbar!r}")
    channels = [Channel(gamma * (1.0 + nbar), SIGMA_MINUS, "sigma-")]
    if nbar > 0.0:
        channels.append(Channel(gamma * nbar, SIGMA_PLUS, "sigma+"))
    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, 2),
        channels=tuple(channels),
        name="two-level-finite-T" if nbar > 0.0 else "two-level-T0",
        description=f"two-level system, thermal bath nbar={nbar!r}",
    )
    return ensure_valid(model)


def n_level_atom(
    d: int,
    down_rates: Sequence[float],
    up_rates: Sequence[float],
    hamiltonian=None,
) -> LgksModel:
    """N-level atom exchanging photons between neighbouring levels.

    Emission channels (down_rates[i], E_{i,i+1}) and absorption channels
    (up_rates[i], E_{i+1,i}); zero absorption rates drop the channel. The
    default Hamiltonian is diag(1, ..., d).
    """
    if d < 2:
        raise DimensionError(f"n-level atom needs d >= 2, got {d}")
    if len(down_rates) != d - 1 or len(up_rates) != d - 1:
        raise DimensionError(
            f"need {d - 1} down and up rates, got {len(down_rates)} and {len(up_rates)}"
        )
    if hamiltonian is None:
        hamiltonian = np.diag(np.arange(1, d + 1)).astype(np.complex128)

    channels = [
        Channel(_positive(f"down rate {i}", rate), matrix_unit(i, i + 1, d), f"E{i},{i + 1}")
        for i, rate in enumerate(down_rates, start=1)
    ]
    for i, rate in enumerate(up_rates, start=1):
        rate = float(rate)
        if rate < 0.0:
            raise ModelValidationError(f"up rate {i} must be non-negative, got {rate!r}")
        if rate > 0.0:
            channels.append(Channel(rate, matrix_unit(i + 1, i, d), f"E{i + 1},{i}"))

    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, d),
        channels=tuple(channels),
        name="n-level",
        description=f"{d}-level atom coupled to the radiation field",
    )
    return ensure_valid(model)


def _spin_twice(spin: SpinValue) -> int:
    twice = Fraction(spin).limit_denominator(1000) * 2
    if twice.denominator != 1 or twice < 1 or abs(float(spin) * 2 - float(twice)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {spin!r}")
    return int(twice)


def spin_lowering(spin: SpinValue) -> ComplexMatrix:
    """S^- in the basis m = S, S-1, ..., -S (lower-ladder)."""
    twice = _spin_twice(spin)
    d = twice + 1
    s = twice / 2.0
    op = np.zeros((d, d), dtype=np.complex128)
    for k in range(d - 1):
        m = s - k
        op[k + 1, k] = np.sqrt((s + m) * (s - m + 1.0))
    return op


def spin_z(spin: SpinValue) -> ComplexMatrix:
    """S_z in the basis m = S, S-1, ..., -S."""
    twice = _spin_twice(spin)
    s = twice / 2.0
    return np.diag(s - np.arange(twice + 1)).astype(np.complex128)


def truncated_annihilation(n_max: int) -> ComplexMatrix:
    """A = sum_n sqrt(n) |n-1><n| on the Fock states n = 0 ... n_max (upper-ladder)."""
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max!r}")
    n_max = int(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(np.complex128)


def _check_site(site: int, layout: CompositeLayout) -> None:
    if not 1 <= site <= layout.n_sites:
        raise DimensionError(f"site {site} out of range for {layout.n_sites} sites")


def embed_local(op, site: int, layout: CompositeLayout) -> ComplexMatrix:
    """1 (x) ... (x) op (x) ... (x) 1 with `op` at the 1-based `site`."""
    _check_site(site, layout)
    op = as_square(op, "local operator")
    expected = layout.factor_dims[site - 1]
    if op.shape[0] != expected:
        raise DimensionError(
            f"operator of dimension {op.shape[0]} cannot sit on site {site} of dimension {expected}"
        )
    factors = [identity(d) for d in layout.factor_dims]
    factors[site - 1] = op
    return kron_all(factors)


def extract_local(op, site: int, layout: CompositeLayout, tol: Optional[float] = None):
    """Local factor of `op` when it acts on `site` only, else None.

    The candidate is the normalized partial trace over the other sites; it is
    accepted when re-embedding reproduces `op` to tol * ||op||_F.
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    _check_site(site, layout)
    op = as_square(op, "operator")
    if op.shape[0] != layout.total_dim:
        raise DimensionError(
            f"operator dimension {op.shape[0]} does not match layout {list(layout.factor_dims)}"
        )
    norm = float(np.linalg.norm(op))
    if norm == 0.0:
        return None

    dims = layout.factor_dims
    n = len(dims)
    j = site - 1
    rows = [chr(ord("a") + k) for k in range(n)]
    cols = list(rows)
    cols[j] = chr(ord("a") + n)
    subscripts = "".join(rows) + "".join(cols) + "->" + rows[j] + cols[j]
    local = np.einsum(subscripts, op.reshape(dims + dims)) / (layout.total_dim // dims[j])

    residual = float(np.linalg.norm(op - embed_local(local, site, layout)))
    return local if residual <= tol * norm else None


def dephasing_two_level(gamma: float, hamiltonian) -> LgksModel:
    """Pure dephasing through sigma_z; reducible whenever H is diagonal."""
    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, 2),
        channels=(Channel(_positive("gamma", gamma), SIGMA_Z, "sigma_z"),),
        name="dephasing",
        description="two-level pure dephasing",
    )
    return ensure_valid(model)


def spin_decay(spin: SpinValue, gamma: float, hamiltonian=None) -> LgksModel:
    """Spin-S decaying through S^-; default Hamiltonian S_z."""
    lowering = spin_lowering(spin)
    d = lowering.shape[0]
    if hamiltonian is None:
        hamiltonian = spin_z(spin)
    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, d),
        channels=(Channel(_positive("gamma", gamma), lowering, "S-"),),
        name="spin-decay",
        description=f"spin {Fraction(spin).limit_denominator(1000)} decaying through S^-",
    )
    return ensure_valid(model)


def boson_decay(n_max: int, gamma: float, hamiltonian=None) -> LgksModel:
    """Bosonic mode truncated at n_max losing quanta through A; default Hamiltonian A^dagger A."""
    annihilation = truncated_annihilation(n_max)
    if hamiltonian is None:
        hamiltonian = dagger(annihilation) @ annihilation
    model = LgksModel(
        hamiltonian=_hamiltonian(hamiltonian, annihilation.shape[0]),
        channels=(Channel(_positive("gamma", gamma), annihilation, "A"),),
        name="boson-decay",
        description=f"truncated bosonic mode, n_max={n_max}",
    )
    return ensure_valid(model)


def atom_lattice(
    n_sites: int,
    local_model: LgksModel,
    coupling: Optional[float] = None,
    max_dim: Optional[int] = None,
) -> LgksModel:
    """N copies of `local_model`, each coupled to its own bath.

    Every local channel is embedded at every site (site-major order); the
    Hamiltonian is the sum of the embedded local Hamiltonians plus, when
    `coupling` is given, the open-chain exchange
    J * sum_j (l_j^dagger l_{j+1} + h.c.) with l the unit lowering ladder.
    """
    max_dim = settings.MAX_LATTICE_DIM if max_dim is None else max_dim
    if n_sites < 1:
        raise DimensionError(f"lattice needs at least one site, got {n_sites}")
    ensure_valid(local_model)
    d_local = local_model.dim
    if d_local ** n_sites > max_dim:
        raise DimensionError(
            f"lattice dimension {d_local}^{n_sites} exceeds the cap {max_dim}"
        )
    layout = CompositeLayout((d_local,) * n_sites)

    hamiltonian = sum(
        embed_local(local_model.hamiltonian, j, layout) for j in range(1, n_sites + 1)
    )
    if coupling:
        ladder = np.eye(d_local, k=-1, dtype=np.complex128)
        for j in range(1, n_sites):
            hop = dagger(embed_local(ladder, j, layout)) @ embed_local(ladder, j + 1, layout)
            hamiltonian = hamiltonian + float(coupling) * (hop + dagger(hop))

    channels = tuple(
        Channel(channel.rate, embed_local(channel.operator, j, layout), f"{channel.label}@{j}")
        for j in range(1, n_sites + 1)
        for channel in local_model.channels
    )
    model = LgksModel(
        hamiltonian=hamiltonian,
        channels=channels,
        layout=layout,
        name="lattice",
        description=f"{n_sites} sites of {local_model.name or 'local model'}",
    )
    logger.debug(
        "Lattice built",
        extra={"sites": n_sites, "dim": model.dim, "channels": len(channels)},
    )
    return ensure_valid(model)


def cavity_emitter(
    n_max: int,
    kappa: float,
    gamma: float,
    g: float = 0.0,
    omega_cavity: float = 1.0,
    omega_emitter: float = 1.0,
) -> LgksModel:
    """Truncated cavity mode (x) two-level emitter, both lossy.

    Channels (kappa, A (x) 1) and (gamma, 1 (x) sigma^-); Jaynes-Cummings
    exchange g (A^dagger (x) sigma^- + h.c.).
    """
    annihilation = truncated_annihilation(n_max)
    layout = CompositeLayout((n_max + 1, 2))
    number = dagger(annihilation) @ annihilation
    excited = SIGMA_PLUS @ SIGMA_MINUS

    exchange = kron_all([dagger(annihilation), SIGMA_MINUS])
    hamiltonian = (
        omega_cavity * embed_local(number, 1, layout)
        + omega_emitter * embed_local(excited, 2, layout)
        + float(g) * (exchange + dagger(exchange))
    )
    model = LgksModel(
        hamiltonian=hamiltonian,
        channels=(
            Channel(_positive("kappa", kappa), embed_local(annihilation, 1, layout), "A@1"),
            Channel(_positive("gamma", gamma), embed_local(SIGMA_MINUS, 2, layout), "sigma-@2"),
        ),
        layout=layout,
        name="cavity-emitter",
        description=f"cavity (n_max={n_max}) coupled to a two-level emitter",
    )
    return ensure_valid(model)


def conjugate_model(model: LgksModel, unitary, tol: float = 1e-10) -> LgksModel:
    """Model with H -> U H U^dagger and B_i -> U B_i U^dagger."""
    u = as_square(unitary, "unitary")
    if u.shape[0] != model.dim:
        raise DimensionError(f"unitary of dimension {u.shape[0]} for model of dimension {model.dim}")
    defect = float(np.linalg.norm(dagger(u) @ u - identity(model.dim)))
    if defect > tol * np.sqrt(model.dim):
        raise ValueError(f"basis change is not unitary, ||U^dagger U - 1||_F = {defect:.3e}")
    u_dag = dagger(u)
    return LgksModel(
        hamiltonian=u @ model.hamiltonian @ u_dag,
        channels=tuple(
            Channel(channel.rate, u @ channel.operator @ u_dag, channel.label)
            for channel in model.channels
        ),
        layout=model.layout,
        name=model.name,
        description=model.description,
    )
