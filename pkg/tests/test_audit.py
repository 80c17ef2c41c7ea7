"""Tests for the full audit and its consistency flags."""

import numpy as np
import scipy.linalg

from app.core.errors import NumericalError
from app.core.models import Criterion
from app.quantum import zoo
from app.quantum.audit import audit


def test_audit_zero_temperature_decay(two_level):
    """Test that only the commutant-based criteria certify spontaneous decay."""
    report = audit(two_level)
    assert not report.verdict(Criterion.SPOHN_RANK).passed
    assert not report.verdict(Criterion.SPOHN_SPAN).applicable
    assert not report.verdict(Criterion.FRIGERIO).applicable
    assert report.verdict(Criterion.EVANS).passed
    assert report.verdict(Criterion.THEOREM1).passed
    assert report.verdict(Criterion.COROLLARY1).passed
    assert not report.verdict(Criterion.THEOREM2).applicable
    assert report.multiplicity == 1
    assert report.consistency
    assert report.flags["evans_agrees"]
    assert report.flags["no_pure_imaginary"]


def test_audit_thermal(thermal):
    """Test that the span criteria apply once absorption is present."""
    report = audit(thermal)
    assert report.verdict(Criterion.SPOHN_SPAN).passed
    frigerio = report.verdict(Criterion.FRIGERIO)
    assert frigerio.passed
    assert frigerio.evidence["faithful"]
    assert report.verdict(Criterion.EVANS).passed
    assert report.multiplicity == 1
    assert report.consistency


def test_audit_dephasing(dephasing):
    """Test that every criterion fails or is inapplicable and the audit stays consistent."""
    report = audit(dephasing)
    assert not any(v.passed for v in report.verdicts)
    assert report.multiplicity == 2
    assert report.consistency
    assert report.flags["evans_agrees"]


def test_audit_verdict_order(lattice):
    """Test that verdicts follow the fixed criterion order."""
    report = audit(lattice, workers=3)
    assert [v.criterion for v in report.verdicts] == list(Criterion)
    assert report.verdict(Criterion.THEOREM2).passed
    assert report.verdict(Criterion.COROLLARY2).passed
    assert report.multiplicity == 1


def test_audit_flags_lambda_decay(lambda_model):
    """Test that a trivial commutant without a faithful state is reported as inconsistent."""
    report = audit(lambda_model)
    assert report.verdict(Criterion.EVANS).passed
    assert report.multiplicity == 4
    assert not report.consistency
    assert not report.flags["sufficient_sound"]
    assert not report.flags["evans_agrees"]
    assert any("contradicts" in note for note in report.notes)


def test_audit_is_deterministic(thermal):
    """Test that repeated audits with one seed agree."""
    first = audit(thermal, seed=5, draws=8)
    second = audit(thermal, seed=5, draws=8)
    for a, b in zip(first.verdicts, second.verdicts):
        assert a.passed == b.passed
        assert a.evidence.keys() == b.evidence.keys()
    assert first.flags == second.flags


def test_audit_survives_checker_failure(two_level, mocker):
    """Test that a numerical failure in one checker becomes a non-applicable verdict."""
    mocker.patch(
        "app.quantum.criteria.evans_criterion", side_effect=NumericalError("SVD did not converge")
    )
    report = audit(two_level)
    evans = report.verdict(Criterion.EVANS)
    assert not evans.applicable
    assert "SVD did not converge" in evans.notes
    assert report.verdict(Criterion.THEOREM1).passed


def test_audit_records_oracle_failure(two_level, mocker):
    """Test that an oracle failure is recorded in the notes instead of raised."""
    mocker.patch(
        "app.quantum.audit.steady_states", side_effect=NumericalError("eigen solver diverged")
    )
    report = audit(two_level)
    assert report.oracle is None
    assert report.multiplicity is None
    assert not report.consistency
    assert any("oracle failed" in note for note in report.notes)


def test_audit_random_model_is_sound():
    """Test that a generic random model is relaxing and consistent."""
    from app.quantum.sampling import random_model

    model = random_model(3, 2, seed=21)
    report = audit(model, draws=4)
    assert report.multiplicity == 1
    assert report.consistency
    assert report.verdict(Criterion.EVANS).passed
    assert np.isfinite(report.oracle.gap)


def test_audit_spin_decay():
    """Test that a decaying spin is certified by its ladder operator."""
    report = audit(zoo.spin_decay(1, 1.0))
    assert report.verdict(Criterion.COROLLARY1).passed
    assert report.multiplicity == 1


def test_audit_survives_least_squares_failure(thermal, mocker):
    """Test that a LAPACK failure inside the span test does not escape the audit."""
    mocker.patch("scipy.linalg.lstsq", side_effect=scipy.linalg.LinAlgError("no convergence"))
    report = audit(thermal)
    span = report.verdict(Criterion.SPOHN_SPAN)
    assert not span.applicable
    assert "checker failed" in span.notes
    assert report.multiplicity == 1
    assert report.verdict(Criterion.EVANS).passed
