"""In-memory domain records: LGKS models, oracle results and criterion verdicts."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt

from app.core.errors import DimensionError, ModelValidationError

ComplexMatrix = npt.NDArray[np.complex128]


def frozen_matrix(value) -> ComplexMatrix:
    """Copy `value` into a read-only complex128 array."""
    arr = np.array(value, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NullSpaceResult:
    """Kernel of a linear map determined from its singular values."""

    basis: Tuple[np.ndarray, ...]
    nullity: int
    singular_values: np.ndarray
    threshold: float

    @property
    def smallest_retained(self) -> Optional[float]:
        kept = self.singular_values[self.singular_values > self.threshold]
        return float(kept.min()) if kept.size else None

    @property
    def largest_discarded(self) -> Optional[float]:
        dropped = self.singular_values[self.singular_values <= self.threshold]
        return float(dropped.max()) if dropped.size else None

    @property
    def margin(self) -> float:
        """Factor by which the rank decision clears the threshold on either side."""
        if self.threshold <= 0.0:
            return math.inf
        margins = [math.inf]
        if self.smallest_retained is not None:
            margins.append(self.smallest_retained / self.threshold)
        if self.largest_discarded:
            margins.append(self.threshold / self.largest_discarded)
        return min(margins)


class LadderForm(str, Enum):
    """Shape of an operator relative to the ladder structure."""

    LOWER = "lower-ladder"
    UPPER = "upper-ladder"
    NEITHER = "neither"


@dataclass(frozen=True)
class CompositeLayout:
    """Tensor-factor dimensions [d1 ... dN] of a composite Hilbert space."""

    factor_dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims:
            raise DimensionError("layout needs at least one factor")
        if any(d < 2 for d in dims):
            raise DimensionError(f"every factor dimension must be >= 2, got {list(dims)}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def n_sites(self) -> int:
        return len(self.factor_dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.factor_dims)


@dataclass(frozen=True, eq=False)
class Channel:
    """One dissipative channel: decay rate and Lindblad operator."""

    rate: float
    operator: ComplexMatrix
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "operator", frozen_matrix(self.operator))


@dataclass(frozen=True, eq=False)
class LgksModel:
    """Hamiltonian plus dissipative channels, with an optional tensor layout.

    Construction only normalizes storage; `app.quantum.validation.validate`
    reports invariant violations.
    """

    hamiltonian: ComplexMatrix
    channels: Tuple[Channel, ...] = ()
    layout: Optional[CompositeLayout] = None
    name: str = ""
    description: str = ""

    def __post_init__(self):
        hamiltonian = frozen_matrix(self.hamiltonian)
        if hamiltonian.ndim != 2:
            raise DimensionError(f"hamiltonian must be a matrix, got shape {hamiltonian.shape}")
        object.__setattr__(self, "hamiltonian", hamiltonian)
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def dim(self) -> int:
        return int(self.hamiltonian.shape[0])

    @property
    def operators(self) -> Tuple[ComplexMatrix, ...]:
        return tuple(channel.operator for channel in self.channels)

    @property
    def rates(self) -> Tuple[float, ...]:
        return tuple(channel.rate for channel in self.channels)

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "channels": len(self.channels),
            "layout": list(self.layout.factor_dims) if self.layout else None,
        }


@dataclass(frozen=True)
class Violation:
    """A single violated model invariant."""

    code: str
    message: str
    residual: Optional[float] = None


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def messages(self) -> Tuple[str, ...]:
        return tuple(v.message for v in self.violations)

    def raise_if_invalid(self, subject: str = "model") -> None:
        if self.violations:
            raise ModelValidationError(
                f"invalid {subject}: " + "; ".join(self.messages()), report=self
            )


class LiouvillianKind(str, Enum):
    SCHROEDINGER = "schroedinger"
    HEISENBERG = "heisenberg"


@dataclass(frozen=True, eq=False)
class LiouvillianMatrix:
    """d^2 x d^2 matrix of a generator acting on column-stacked operators."""

    dim: int
    matrix: ComplexMatrix
    kind: LiouvillianKind


@dataclass(frozen=True, eq=False)
class SteadyStateResult:
    multiplicity: int
    states: Tuple[ComplexMatrix, ...]
    kernel_basis: Tuple[ComplexMatrix, ...]
    gap: Optional[float]
    tol: float
    margin: float = math.inf
    extraction_error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    kernel_count: int
    pure_imaginary_count: int
    gap: Optional[float]
    max_real: float
    zero_threshold: float


@dataclass(frozen=True, eq=False)
class RelaxationTable:
    applicable: bool
    times: np.ndarray
    distances: np.ndarray
    seed: int
    gap: Optional[float] = None
    monotone: bool = False
    rate_estimate: Optional[float] = None
    consistent_with_gap: bool = False
    note: str = ""


@dataclass(frozen=True, eq=False)
class GksDecomposition:
    """Coefficients of B = identity * 1 + sum_j traceless[j] * G_j."""

    identity: complex
    traceless: np.ndarray


@dataclass(frozen=True, eq=False)
class CMatrix:
    matrix: ComplexMatrix
    basis: Tuple[ComplexMatrix, ...]

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class CommutantResult:
    dimension: int
    basis: Tuple[ComplexMatrix, ...]
    null: NullSpaceResult


@dataclass(frozen=True)
class SpanCheck:
    self_adjoint: bool
    residuals: Tuple[float, ...]

    def __bool__(self) -> bool:
        return self.self_adjoint


@dataclass(frozen=True)
class Combination:
    """Coefficients of M = alpha0 H + sum_i (alphas[i] B_i + betas[i] B_i^dagger)."""

    alpha0: complex = 0.0
    alphas: Tuple[complex, ...] = ()
    betas: Tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        object.__setattr__(self, "alphas", tuple(complex(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(complex(b) for b in self.betas))

    def as_evidence(self) -> Dict[str, Any]:
        return {
            "alpha0": self.alpha0,
            "alphas": list(self.alphas),
            "betas": list(self.betas),
        }


class Criterion(str, Enum):
    """Uniqueness criteria, in the fixed order used by audit reports."""

    SPOHN_RANK = "spohn-rank"
    SPOHN_SPAN = "spohn-span"
    FRIGERIO = "frigerio"
    EVANS = "evans"
    THEOREM1 = "theorem1"
    COROLLARY1 = "corollary1"
    THEOREM2 = "theorem2"
    COROLLARY2 = "corollary2"


@dataclass(frozen=True, eq=False)
class CriterionVerdict:
    criterion: Criterion
    applicable: bool
    passed: bool
    evidence: Dict[str, Any] = field(default_factory=dict)
    notes: str = ""
    borderline: bool = False

    def __post_init__(self):
        if self.passed and not self.applicable:
            raise ValueError(f"{self.criterion.value}: a passing verdict must be applicable")


@dataclass(frozen=True, eq=False)
class AuditReport:
    model_summary: Dict[str, Any]
    verdicts: Tuple[CriterionVerdict, ...]
    oracle: Optional[SteadyStateResult]
    spectrum: Optional[SpectrumReport]
    consistency: bool
    flags: Dict[str, bool]
    tol: float
    seed: int
    search_draws: int
    notes: Tuple[str, ...] = ()

    @property
    def multiplicity(self) -> Optional[int]:
        return self.oracle.multiplicity if self.oracle is not None else None

    def verdict(self, criterion: Criterion) -> CriterionVerdict:
        for verdict in self.verdicts:
            if verdict.criterion == criterion:
                return verdict
        raise KeyError(criterion.value)


@dataclass(frozen=True)
class LadderSpec:
    """Dimension and nonzero subdiagonal of a ladder operator."""

    d: int
    subdiagonal: Tuple[complex, ...]

    def __post_init__(self):
        entries = tuple(complex(e) for e in self.subdiagonal)
        if self.d < 2:
            raise DimensionError(f"ladder dimension must be >= 2, got {self.d}")
        if len(entries) != self.d - 1:
            raise DimensionError(
                f"ladder of dimension {self.d} needs {self.d - 1} subdiagonal entries, got {len(entries)}"
            )
        moduli = [abs(e) for e in entries]
        # entries indistinguishable from zero at working precision violate the hypothesis
        floor = 1e3 * np.finfo(float).eps * max(moduli)
        if min(moduli) == 0.0 or min(moduli) < floor:
            raise ValueError(
                f"ladder subdiagonal entries must be nonzero, smallest modulus {min(moduli):.3e}"
            )
        object.__setattr__(self, "subdiagonal", entries)

    @property
    def min_entry_ratio(self) -> float:
        moduli = [abs(e) for e in self.subdiagonal]
        return min(moduli) / max(moduli)


@dataclass(frozen=True)
class AlgebraCheck:
    """Outcome of an algebra oracle: does the commutant reduce to multiples of 1?"""

    holds: bool
    commutant_dimension: int
    borderline: bool
    margin: float

    def __bool__(self) -> bool:
        return self.holds
