"""Invariant checks for LGKS models."""

import logging
import math

import numpy as np

from app.core.models import LgksModel, ValidationReport, Violation

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-10


def validate(model: LgksModel) -> ValidationReport:
    """
    Check an LGKS model against its invariants.

    Never raises for an invalid model: every violated invariant is listed with
    the measured residual, and an empty report means the model is valid.

    Args:
        model: The model to check

    Returns:
        ValidationReport listing the violations
    """
    violations = []
    h = model.hamiltonian
    d = h.shape[0]

    if h.shape[0] != h.shape[1]:
        violations.append(
            Violation("hamiltonian-shape", f"hamiltonian must be square, got shape {h.shape}")
        )
    elif not np.all(np.isfinite(h)):
        violations.append(Violation("hamiltonian-finite", "hamiltonian has non-finite entries"))
    else:
        residual = float(np.linalg.norm(h - h.conj().T))
        bound = HERMITICITY_TOL * max(1.0, float(np.linalg.norm(h)))
        if residual > bound:
            violations.append(
                Violation(
                    "hamiltonian-hermiticity",
                    f"hamiltonian is not Hermitian, ||H - H^dagger||_F = {residual:.6g}",
                    residual,
                )
            )

    for index, channel in enumerate(model.channels, start=1):
        if not math.isfinite(channel.rate) or channel.rate <= 0.0:
            violations.append(
                Violation(
                    "channel-rate",
                    f"non-positive rate, channel {index} (rate {channel.rate!r})",
                    channel.rate,
                )
            )
        if channel.operator.shape != (d, d):
            violations.append(
                Violation(
                    "channel-shape",
                    f"channel {index} operator has shape {channel.operator.shape}, expected {(d, d)}",
                )
            )
        elif not np.all(np.isfinite(channel.operator)):
            violations.append(
                Violation("channel-finite", f"channel {index} operator has non-finite entries")
            )

    if model.layout is not None and model.layout.total_dim != d:
        violations.append(
            Violation(
                "layout-dimension",
                f"layout {list(model.layout.factor_dims)} has product {model.layout.total_dim}, "
                f"model dimension is {d}",
            )
        )

    report = ValidationReport(tuple(violations))
    if not report.is_valid:
        logger.debug(
            "Model validation found violations",
            extra={"model": model.name, "violations": list(report.messages())},
        )
    return report


def ensure_valid(model: LgksModel) -> LgksModel:
    """Return `model` unchanged, or raise ModelValidationError."""
    validate(model).raise_if_invalid(model.name or "model")
    return model
