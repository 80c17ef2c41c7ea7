"""Pydantic schemas for the model file and the audit report file.

Complex numbers are [re, im] pairs and matrices are row-major nested lists.
Floats are written with the shortest representation that round-trips.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.config import settings
from app.core.errors import ModelFileError
from app.core.models import (
    AuditReport,
    Channel,
    CompositeLayout,
    LgksModel,
    SpectrumReport,
    SteadyStateResult,
)

ComplexPair = List[float]
MatrixRows = List[List[ComplexPair]]


def to_jsonable(value: Any) -> Any:
    """Convert numpy arrays, complex numbers and enums into JSON-ready values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return to_jsonable(value.tolist())
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value + 0.0 if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def matrix_to_rows(matrix) -> MatrixRows:
    # + 0.0 folds negative zeros left by sign normalisation
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in np.asarray(matrix)]


def _rows_to_matrix(rows: MatrixRows, dim: int, location: str) -> np.ndarray:
    if len(rows) != dim:
        raise ModelFileError(f"expected {dim} rows, got {len(rows)}", location)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        if len(row) != dim:
            raise ModelFileError(f"expected {dim} entries, got {len(row)}", f"{location}.{r}")
        for c, pair in enumerate(row):
            if len(pair) != 2:
                raise ModelFileError("complex entry must be [re, im]", f"{location}.{r}.{c}")
            out[r, c] = complex(pair[0], pair[1])
    return out


class ChannelSpec(BaseModel):
    """One dissipative channel in a model file."""

    model_config = ConfigDict(extra="forbid")

    rate: float
    matrix: MatrixRows
    label: str = ""


class ModelFile(BaseModel):
    """Schema for a serialized LGKS model."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=2)
    hamiltonian: MatrixRows
    channels: List[ChannelSpec] = Field(default_factory=list)
    layout: Optional[List[int]] = None
    name: str = ""
    description: str = ""

    def to_model(self, max_dim: Optional[int] = None) -> LgksModel:
        """Build the in-memory model; shape problems raise ModelFileError with a location."""
        max_dim = settings.MAX_MODEL_DIM if max_dim is None else max_dim
        if self.dim > max_dim:
            raise ModelFileError(f"dimension {self.dim} exceeds the cap {max_dim}", "dim")
        hamiltonian = _rows_to_matrix(self.hamiltonian, self.dim, "hamiltonian")
        channels = tuple(
            Channel(
                spec.rate,
                _rows_to_matrix(spec.matrix, self.dim, f"channels.{i}.matrix"),
                spec.label,
            )
            for i, spec in enumerate(self.channels)
        )
        layout = None
        if self.layout is not None:
            try:
                layout = CompositeLayout(tuple(self.layout))
            except ValueError as e:
                raise ModelFileError(str(e), "layout") from e
        return LgksModel(
            hamiltonian=hamiltonian,
            channels=channels,
            layout=layout,
            name=self.name,
            description=self.description,
        )

    @classmethod
    def from_model(cls, model: LgksModel) -> "ModelFile":
        return cls(
            dim=model.dim,
            hamiltonian=matrix_to_rows(model.hamiltonian),
            channels=[
                ChannelSpec(rate=c.rate, matrix=matrix_to_rows(c.operator), label=c.label)
                for c in model.channels
            ],
            layout=list(model.layout.factor_dims) if model.layout else None,
            name=model.name,
            description=model.description,
        )


def parse_model_file(text: str, max_dim: Optional[int] = None) -> LgksModel:
    """
    Parse model-file JSON into an LgksModel.

    Raises:
        ModelFileError: Malformed document, with the offending location
    """
    try:
        document = ModelFile.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ModelFileError(first["msg"], location) from e
    return document.to_model(max_dim)


def dump_model_file(model: LgksModel) -> str:
    return ModelFile.from_model(model).model_dump_json(indent=2)


class VerdictRecord(BaseModel):
    """Schema for one criterion verdict."""

    criterion: str
    applicable: bool
    passed: bool
    borderline: bool = False
    evidence: Dict[str, Any] = Field(default_factory=dict)
    notes: str = ""


class OracleRecord(BaseModel):
    """Schema for the steady-state oracle."""

    multiplicity: int
    gap: Optional[float] = None
    margin: Optional[float] = None
    states: List[MatrixRows] = Field(default_factory=list)
    extraction_error: Optional[str] = None

    @classmethod
    def from_result(cls, result: SteadyStateResult) -> "OracleRecord":
        return cls(
            multiplicity=result.multiplicity,
            gap=to_jsonable(result.gap),
            margin=to_jsonable(result.margin),
            states=[matrix_to_rows(s) for s in result.states],
            extraction_error=result.extraction_error,
        )


class SpectrumRecord(BaseModel):
    """Schema for the spectral summary."""

    eigenvalues: List[ComplexPair]
    kernel_count: int
    pure_imaginary_count: int
    gap: Optional[float] = None
    max_real: float
    zero_threshold: float

    @classmethod
    def from_report(cls, report: SpectrumReport) -> "SpectrumRecord":
        return cls(
            eigenvalues=to_jsonable(report.eigenvalues),
            kernel_count=report.kernel_count,
            pure_imaginary_count=report.pure_imaginary_count,
            gap=to_jsonable(report.gap),
            max_real=report.max_real,
            zero_threshold=report.zero_threshold,
        )


class EvolveRow(BaseModel):
    """One (sample, time) row of a trajectory table."""

    sample: int
    t: float
    distance: Optional[float] = None
    trace_residual: float
    min_eigenvalue: float
    populations: List[float]


class EvolveFile(BaseModel):
    """Schema for a trajectory table."""

    tool_version: str
    rho0: str
    rows: List[EvolveRow]


class ReportFile(BaseModel):
    """Schema for a machine-readable audit report."""

    tool_version: str
    model: Dict[str, Any]
    tol: float
    seed: int
    search_draws: int
    verdicts: List[VerdictRecord]
    oracle: Optional[OracleRecord] = None
    spectrum: Optional[SpectrumRecord] = None
    consistency: bool
    flags: Dict[str, bool]
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: AuditReport) -> "ReportFile":
        return cls(
            tool_version=settings.TOOL_VERSION,
            model=to_jsonable(report.model_summary),
            tol=report.tol,
            seed=report.seed,
            search_draws=report.search_draws,
            verdicts=[
                VerdictRecord(
                    criterion=v.criterion.value,
                    applicable=v.applicable,
                    passed=v.passed,
                    borderline=v.borderline,
                    evidence=to_jsonable(v.evidence),
                    notes=v.notes,
                )
                for v in report.verdicts
            ],
            oracle=OracleRecord.from_result(report.oracle) if report.oracle is not None else None,
            spectrum=(
                SpectrumRecord.from_report(report.spectrum) if report.spectrum is not None else None
            ),
            consistency=report.consistency,
            flags=report.flags,
            notes=list(report.notes),
        )
