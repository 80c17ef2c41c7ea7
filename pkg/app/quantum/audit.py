"""Run every criterion against one model and cross-check them with the oracle."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional

from app.config import settings
from app.core.errors import LgksError
from app.core.models import AuditReport, Criterion, CriterionVerdict, LgksModel
from app.quantum import criteria
from app.quantum.superoperator import checked_model, spectrum_report, steady_states

logger = logging.getLogger(__name__)


def _guarded(criterion: Criterion, check: Callable[[], CriterionVerdict]) -> Callable[[], CriterionVerdict]:
    def run() -> CriterionVerdict:
        try:
            return check()
        except LgksError as e:
            logger.error(
                "Criterion checker failed",
                extra={"criterion": criterion.value, "error": str(e)},
                exc_info=True,
            )
            return CriterionVerdict(
                criterion=criterion,
                applicable=False,
                passed=False,
                notes=f"checker failed: {e}",
            )

    return run


def audit(
    model: LgksModel,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    draws: Optional[int] = None,
    workers: Optional[int] = None,
    max_dim: Optional[int] = None,
) -> AuditReport:
    """
    Evaluate all criteria plus the steady-state and spectral oracles.

    Checkers run on a thread pool; verdicts are reported in the fixed
    criterion order. Oracle failures leave `oracle`/`spectrum` empty and are
    recorded in `notes`; criterion outcomes never raise.

    Args:
        model: A valid model within the dimension cap
        tol: Relative rank tolerance
        seed: Seed for the random-combination searches
        draws: Random draws per search
        workers: Thread-pool width

    Returns:
        AuditReport with consistency flags
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    seed = settings.DEFAULT_SEED if seed is None else seed
    draws = settings.DEFAULT_SEARCH_DRAWS if draws is None else draws
    workers = settings.WORKERS if workers is None else workers
    checked_model(model, max_dim)
    start = time.perf_counter()
    notes: List[str] = []

    oracle = spectrum = None
    try:
        oracle = steady_states(model, tol, max_dim)
        spectrum = spectrum_report(model, tol, max_dim)
    except LgksError as e:
        logger.error("Oracle failed", extra={"model": model.name, "error": str(e)}, exc_info=True)
        notes.append(f"oracle failed: {e}")

    checks = [
        (Criterion.SPOHN_RANK, lambda: criteria.spohn_rank_criterion(model, tol)),
        (Criterion.SPOHN_SPAN, lambda: criteria.spohn_span_criterion(model, tol)),
        (Criterion.FRIGERIO, lambda: criteria.frigerio_criterion(model, tol, oracle)),
        (Criterion.EVANS, lambda: criteria.evans_criterion(model, tol, seed)),
        (Criterion.THEOREM1, lambda: criteria.theorem1_check(model, draws=draws, seed=seed, tol=tol)),
        (Criterion.COROLLARY1, lambda: criteria.corollary1_check(model, tol=tol)),
        (Criterion.THEOREM2, lambda: criteria.theorem2_check(model, draws=draws, seed=seed, tol=tol)),
        (Criterion.COROLLARY2, lambda: criteria.corollary2_check(model, tol=tol)),
    ]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_guarded(criterion, check)) for criterion, check in checks]
        verdicts = tuple(future.result() for future in futures)

    multiplicity = oracle.multiplicity if oracle is not None else None
    any_passed = any(v.passed for v in verdicts)
    evans = next(v for v in verdicts if v.criterion is Criterion.EVANS)
    flags = {
        "sufficient_sound": multiplicity is not None and (not any_passed or multiplicity == 1),
        "evans_agrees": multiplicity is not None and evans.passed == (multiplicity == 1),
        "no_pure_imaginary": spectrum is not None and spectrum.pure_imaginary_count == 0,
        "borderline": any(v.borderline for v in verdicts)
        or (oracle is not None and oracle.margin < criteria.BORDERLINE_FACTOR),
    }
    consistency = flags["sufficient_sound"]
    if oracle is not None and not consistency:
        notes.append(
            "a passing criterion contradicts the oracle multiplicity; review the tolerance"
        )
        logger.warning(
            "Audit inconsistency",
            extra={
                "model": model.name,
                "multiplicity": multiplicity,
                "passed": [v.criterion.value for v in verdicts if v.passed],
            },
        )

    report = AuditReport(
        model_summary=model.summary(),
        verdicts=verdicts,
        oracle=oracle,
        spectrum=spectrum,
        consistency=consistency,
        flags=flags,
        tol=tol,
        seed=seed,
        search_draws=draws,
        notes=tuple(notes),
    )
    logger.info(
        "Audit finished",
        extra={
            "model": model.name,
            "dim": model.dim,
            "multiplicity": multiplicity,
            "consistency": consistency,
            "elapsed_ms": round((time.perf_counter() - start) * 1000, 2),
        },
    )
    return report
