"""Core application components - domain records, errors, file schemas."""

from app.core.errors import (
    LgksError,
    DimensionError,
    ModelValidationError,
    ModelFileError,
    NumericalError,
)
from app.core.models import (
    Channel,
    Combination,
    CompositeLayout,
    Criterion,
    CriterionVerdict,
    AuditReport,
    LgksModel,
)
from app.core.schemas import (
    ModelFile,
    ReportFile,
    parse_model_file,
    dump_model_file,
)

__all__ = [
    "LgksError",
    "DimensionError",
    "ModelValidationError",
    "ModelFileError",
    "NumericalError",
    "Channel",
    "Combination",
    "CompositeLayout",
    "Criterion",
    "CriterionVerdict",
    "AuditReport",
    "LgksModel",
    "ModelFile",
    "ReportFile",
    "parse_model_file",
    "dump_model_file",
]
