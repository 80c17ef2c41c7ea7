"""Uniqueness and irreducibility criteria for LGKS models.

Each checker returns a CriterionVerdict and never raises for a negative
outcome. Sufficient criteria that find no witness report passed=False with an
"inconclusive" note; only the Evans commutant test reads failure as a
prediction of non-uniqueness.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.config import settings
from app.core.errors import DimensionError, LgksError, NumericalError
from app.core.models import (
    CMatrix,
    Combination,
    CommutantResult,
    ComplexMatrix,
    CompositeLayout,
    Criterion,
    CriterionVerdict,
    GksDecomposition,
    LadderForm,
    LgksModel,
    SpanCheck,
    SteadyStateResult,
)
from app.quantum.operators import (
    as_square,
    dagger,
    frobenius_inner,
    hermitian_eigen,
    identity,
    null_space,
    stack_commutator_maps,
    traceless_orthonormal_basis,
    unvec,
    vec,
)
from app.quantum.validation import ensure_valid
from app.quantum.zoo import embed_local, extract_local

logger = logging.getLogger(__name__)

# A rank decision closer than this factor to its threshold is flagged borderline
BORDERLINE_FACTOR = 10.0


def _tol(tol: Optional[float]) -> float:
    return settings.DEFAULT_TOL if tol is None else tol


def gks_decompose(b, basis: Optional[Sequence[ComplexMatrix]] = None) -> GksDecomposition:
    """
    Coefficients of B = alpha0 * 1 + sum_j alpha_j G_j.

    alpha0 = Tr(B) / d and alpha_j = Tr(G_j^dagger B), so the expansion
    reconstructs B for any traceless orthonormal basis.
    """
    b = as_square(b, "operator")
    d = b.shape[0]
    basis = traceless_orthonormal_basis(d) if basis is None else list(basis)
    if len(basis) != d * d - 1 or any(np.shape(g) != (d, d) for g in basis):
        raise DimensionError(
            f"basis of {len(basis)} elements does not match operator dimension {d}"
        )
    traceless = np.array([frobenius_inner(g, b) for g in basis], dtype=np.complex128)
    return GksDecomposition(identity=complex(np.trace(b) / d), traceless=traceless)


def build_c_matrix(model: LgksModel, basis: Optional[Sequence[ComplexMatrix]] = None) -> CMatrix:
    """c_ij = sum_k gamma_k alpha_i^(k) conj(alpha_j^(k)) over the traceless coefficients."""
    ensure_valid(model)
    basis = traceless_orthonormal_basis(model.dim) if basis is None else list(basis)
    n = model.dim**2 - 1
    c = np.zeros((n, n), dtype=np.complex128)
    for channel in model.channels:
        alpha = gks_decompose(channel.operator, basis).traceless
        c += channel.rate * np.outer(alpha, alpha.conj())
    return CMatrix(matrix=c, basis=tuple(basis))


def spohn_rank_criterion(model: LgksModel, tol: Optional[float] = None) -> CriterionVerdict:
    """Relaxing if fewer than d/2 eigenvalues of the c-matrix vanish."""
    tol = _tol(tol)
    d = model.dim
    if d < 2:
        return CriterionVerdict(
            criterion=Criterion.SPOHN_RANK,
            applicable=False,
            passed=False,
            evidence={"d": d},
            notes="no traceless basis below dimension 2",
        )
    c = build_c_matrix(model)
    values, _ = hermitian_eigen(c.matrix, tol=1e-10)
    largest = float(values[-1]) if values.size else 0.0
    threshold = tol * largest
    p = int(np.sum(values <= threshold)) if largest > 0.0 else int(values.size)
    borderline = bool(
        largest > 0.0
        and np.any(
            (values > threshold / BORDERLINE_FACTOR) & (values <= threshold * BORDERLINE_FACTOR)
        )
    )
    passed = p < d / 2

    return CriterionVerdict(
        criterion=Criterion.SPOHN_RANK,
        applicable=True,
        passed=passed,
        evidence={
            "p": p,
            "d": d,
            "eigenvalues": [float(v) for v in values],
            "threshold": threshold,
            "strictly_positive": p == 0,
        },
        notes="" if passed else f"inconclusive: p = {p} is not below d/2 = {d / 2:g}",
        borderline=borderline,
    )


def commutant(ops: Sequence, tol: Optional[float] = None) -> CommutantResult:
    """
    All X with [X, A] = 0 for every A in `ops`.

    Tall stacked maps are first reduced to their R factor, which has the
    same singular values and kernel.
    """
    tol = _tol(tol)
    if len(ops) == 0:
        raise ValueError("commutant of an empty operator list is undefined")
    stacked = stack_commutator_maps(ops)
    d = int(round(np.sqrt(stacked.shape[1])))
    # ||[X, A]||_F <= 2 ||A||_F ||X||_F bounds every block of the stacked map
    scale = 2.0 * max(float(np.linalg.norm(op)) for op in ops)
    if stacked.shape[0] > stacked.shape[1]:
        try:
            (r,) = scipy.linalg.qr(stacked, mode="r")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
            logger.error("QR reduction failed", extra={"shape": stacked.shape}, exc_info=True)
            raise NumericalError(f"QR reduction of commutator map failed: {e}") from e
        stacked = r[: stacked.shape[1]]

    null = null_space(stacked, tol, scale=scale)
    if null.nullity < 1:
        raise NumericalError("commutant lost the identity; tolerance too small")
    basis = tuple(unvec(v, d) for v in null.basis)
    if null.margin < BORDERLINE_FACTOR:
        logger.warning(
            "Borderline commutant dimension",
            extra={"dimension": null.nullity, "margin": null.margin, "tol": tol},
        )
    return CommutantResult(dimension=null.nullity, basis=basis, null=null)


def bicommutant(ops: Sequence, tol: Optional[float] = None) -> CommutantResult:
    """Commutant of the commutant; dimension d^2 means `ops` generate all matrices."""
    return commutant(commutant(ops, tol).basis, tol)


def is_self_adjoint_span(ops: Sequence, tol: Optional[float] = None) -> SpanCheck:
    """Whether every B_i^dagger lies in span{B_j}, by least squares."""
    tol = _tol(tol)
    if len(ops) == 0:
        raise ValueError("need at least one operator")
    mats = [as_square(op, "operator") for op in ops]
    span = np.column_stack([vec(m) for m in mats])

    residuals = []
    for m in mats:
        norm = float(np.linalg.norm(m))
        if norm == 0.0:
            residuals.append(0.0)
            continue
        target = vec(dagger(m))
        try:
            coeffs, *_ = scipy.linalg.lstsq(span, target)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
            logger.error("Least-squares span test failed", extra={"shape": span.shape}, exc_info=True)
            raise NumericalError(f"least-squares span test did not converge: {e}") from e
        residuals.append(float(np.linalg.norm(span @ coeffs - target)) / norm)

    return SpanCheck(
        self_adjoint=all(r <= tol for r in residuals),
        residuals=tuple(residuals),
    )


def spohn_span_criterion(model: LgksModel, tol: Optional[float] = None) -> CriterionVerdict:
    """Relaxing if span{B_i} is self-adjoint and {B_i} generates the full matrix algebra."""
    tol = _tol(tol)
    ensure_valid(model)
    if not model.channels:
        return CriterionVerdict(
            criterion=Criterion.SPOHN_SPAN,
            applicable=False,
            passed=False,
            notes="no dissipative channels",
        )

    span = is_self_adjoint_span(model.operators, tol)
    if not span:
        return CriterionVerdict(
            criterion=Criterion.SPOHN_SPAN,
            applicable=False,
            passed=False,
            evidence={"span_residuals": list(span.residuals)},
            notes="span of the Lindblad operators is not self-adjoint",
        )

    bi = bicommutant(model.operators, tol)
    d2 = model.dim**2
    passed = bi.dimension == d2
    return CriterionVerdict(
        criterion=Criterion.SPOHN_SPAN,
        applicable=True,
        passed=passed,
        evidence={
            "span_residuals": list(span.residuals),
            "bicommutant_dimension": bi.dimension,
            "d_squared": d2,
            "margin": bi.null.margin,
        },
        notes="" if passed else f"inconclusive: bicommutant has dimension {bi.dimension} < {d2}",
        borderline=bi.null.margin < BORDERLINE_FACTOR,
    )


def frigerio_criterion(
    model: LgksModel,
    tol: Optional[float] = None,
    oracle: Optional[SteadyStateResult] = None,
) -> CriterionVerdict:
    """
    Unique faithful steady state if span{B_i} is self-adjoint and {B_i}' is trivial.

    A stationary state always exists in finite dimension. When the criterion
    passes the oracle state is checked for faithfulness; `oracle` may be
    passed in to avoid recomputing it.
    """
    tol = _tol(tol)
    ensure_valid(model)
    if not model.channels:
        return CriterionVerdict(
            criterion=Criterion.FRIGERIO,
            applicable=False,
            passed=False,
            notes="no dissipative channels",
        )

    span = is_self_adjoint_span(model.operators, tol)
    evidence: Dict[str, object] = {
        "span_residuals": list(span.residuals),
        "stationary_state_exists": True,
    }
    if not span:
        return CriterionVerdict(
            criterion=Criterion.FRIGERIO,
            applicable=False,
            passed=False,
            evidence=evidence,
            notes="span of the Lindblad operators is not self-adjoint",
        )

    comm = commutant(model.operators, tol)
    passed = comm.dimension == 1
    evidence["commutant_dimension"] = comm.dimension
    evidence["margin"] = comm.null.margin
    notes = "" if passed else f"inconclusive: commutant has dimension {comm.dimension}"

    if passed:
        try:
            if oracle is None:
                from app.quantum.superoperator import steady_states

                oracle = steady_states(model, tol)
            if oracle.states:
                smallest = float(hermitian_eigen(oracle.states[0], tol=1e-8)[0][0])
                evidence["min_eigenvalue"] = smallest
                evidence["faithful"] = smallest > tol
            else:
                notes = f"faithfulness not checked: {oracle.extraction_error}"
        except LgksError as e:
            logger.warning("Faithfulness check failed", extra={"error": str(e)})
            notes = f"faithfulness not checked: {e}"

    return CriterionVerdict(
        criterion=Criterion.FRIGERIO,
        applicable=True,
        passed=passed,
        evidence=evidence,
        notes=notes,
        borderline=comm.null.margin < BORDERLINE_FACTOR,
    )


def _conserved_projector_rank(basis: Sequence[ComplexMatrix], seed: int) -> Tuple[int, ComplexMatrix]:
    """Rank of the lowest spectral projector of a generic Hermitian commutant element."""
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal((len(basis), 2))
    element = sum(
        w[0] * (x + dagger(x)) + w[1] * 1j * (x - dagger(x)) for w, x in zip(weights, basis)
    )
    values, vectors = hermitian_eigen(element, tol=1e-8)
    spread = float(values[-1] - values[0])
    if spread <= 0.0:
        return 0, np.zeros_like(element)
    cluster = values - values[0] <= 1e-6 * spread
    projector = vectors[:, cluster] @ vectors[:, cluster].conj().T
    return int(np.sum(cluster)), projector


def evans_criterion(
    model: LgksModel, tol: Optional[float] = None, seed: Optional[int] = None
) -> CriterionVerdict:
    """Irreducible iff {H, B_i, B_i^dagger}' is trivial."""
    tol = _tol(tol)
    seed = settings.DEFAULT_SEED if seed is None else seed
    ensure_valid(model)
    ops = [model.hamiltonian, *model.operators, *(dagger(b) for b in model.operators)]
    comm = commutant(ops, tol)
    passed = comm.dimension == 1

    evidence: Dict[str, object] = {
        "commutant_dimension": comm.dimension,
        "commutant_basis": list(comm.basis),
        "margin": comm.null.margin,
    }
    notes = ""
    if not passed:
        from app.quantum.superoperator import adjoint_action

        rank, projector = _conserved_projector_rank(comm.basis, seed)
        evidence["conserved_projector_rank"] = rank
        evidence["projector_fixed_residual"] = float(
            np.linalg.norm(adjoint_action(model, projector))
        )
        notes = f"reducible: a rank-{rank} projector is conserved, steady state is not unique"

    return CriterionVerdict(
        criterion=Criterion.EVANS,
        applicable=True,
        passed=passed,
        evidence=evidence,
        notes=notes,
        borderline=comm.null.margin < BORDERLINE_FACTOR,
    )


def is_ladder_form(m, tol: Optional[float] = None) -> LadderForm:
    """Classify M as lower-ladder (nonzero exactly on the first subdiagonal), upper-ladder or neither."""
    tol = _tol(tol)
    m = as_square(m, "operator")
    d = m.shape[0]
    norm = float(np.linalg.norm(m))
    if d < 2 or norm == 0.0:
        return LadderForm.NEITHER
    threshold = tol * norm

    for form, k in ((LadderForm.LOWER, -1), (LadderForm.UPPER, 1)):
        band = np.diag(np.diag(m, k), k)
        off_band = np.max(np.abs(m - band))
        if off_band <= threshold and np.min(np.abs(np.diag(m, k))) > threshold:
            return form
    return LadderForm.NEITHER


def build_combination(model: LgksModel, combo: Combination) -> ComplexMatrix:
    """alpha0 H + sum_i (alpha_i B_i + beta_i B_i^dagger)."""
    n = len(model.channels)
    alphas = combo.alphas or (0.0,) * n
    betas = combo.betas or (0.0,) * n
    if len(alphas) != n or len(betas) != n:
        raise DimensionError(
            f"combination has {len(alphas)} alphas and {len(betas)} betas for {n} channels"
        )
    m = combo.alpha0 * model.hamiltonian
    for a, b, op in zip(alphas, betas, model.operators):
        m = m + a * op + b * dagger(op)
    return m


def _unit_disc(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.sqrt(rng.uniform(size=size)) * np.exp(2j * np.pi * rng.uniform(size=size))


def _search_candidates(
    n: int, draws: int, seed: int, with_hamiltonian: bool = True
) -> List[Tuple[str, Combination]]:
    """Singles, then the plain sum, then seeded random draws from the unit disc."""
    candidates = []
    for i in range(n):
        alphas = [0.0] * n
        alphas[i] = 1.0
        candidates.append((f"channel {i + 1}", Combination(0.0, alphas, [0.0] * n)))
    if n > 1:
        candidates.append(("sum", Combination(0.0, [1.0] * n, [0.0] * n)))
    rng = np.random.default_rng(seed)
    for k in range(draws):
        alpha0 = complex(_unit_disc(rng, 1)[0]) if with_hamiltonian else 0.0
        candidates.append(
            (f"draw {k + 1}", Combination(alpha0, _unit_disc(rng, n), _unit_disc(rng, n)))
        )
    return candidates


def _trivial_pair_commutant(m: ComplexMatrix, tol: float) -> CommutantResult:
    return commutant([m, dagger(m)], tol)


def theorem1_check(
    model: LgksModel,
    combo: Optional[Combination] = None,
    draws: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
) -> CriterionVerdict:
    """
    Irreducible if some combination M of H, B_i and B_i^dagger has {M, M^dagger}' trivial.

    A trivial commutant of {M, M^dagger} is what a ladder operator in some
    basis guarantees, and it does not depend on the basis. Without `combo` the
    search tries each B_i, their sum, then `draws` seeded random combinations.
    """
    tol = _tol(tol)
    draws = settings.DEFAULT_SEARCH_DRAWS if draws is None else draws
    seed = settings.DEFAULT_SEED if seed is None else seed
    ensure_valid(model)

    if combo is not None:
        candidates = [("supplied", combo)]
    else:
        candidates = _search_candidates(len(model.channels), draws, seed)
        if not model.channels:
            candidates = [("hamiltonian", Combination(1.0))]

    smallest = None
    for label, candidate in candidates:
        m = build_combination(model, candidate)
        result = _trivial_pair_commutant(m, tol)
        logger.debug(
            "Theorem 1 candidate",
            extra={"candidate": label, "commutant_dimension": result.dimension},
        )
        smallest = result.dimension if smallest is None else min(smallest, result.dimension)
        if result.dimension == 1:
            return CriterionVerdict(
                criterion=Criterion.THEOREM1,
                applicable=True,
                passed=True,
                evidence={
                    "witness": label,
                    "combination": candidate.as_evidence(),
                    "commutant_dimension": 1,
                    "margin": result.null.margin,
                    "seed": seed,
                    "draws": draws,
                },
                borderline=result.null.margin < BORDERLINE_FACTOR,
            )

    return CriterionVerdict(
        criterion=Criterion.THEOREM1,
        applicable=True,
        passed=False,
        evidence={
            "candidates_tried": len(candidates),
            "min_commutant_dimension": smallest,
            "seed": seed,
            "draws": draws,
        },
        notes="inconclusive: no witnessing combination found",
    )


def _check_unitary(u, d: int, tol: float) -> ComplexMatrix:
    u = as_square(u, "basis change")
    if u.shape[0] != d:
        raise DimensionError(f"basis change of dimension {u.shape[0]} for model of dimension {d}")
    defect = float(np.linalg.norm(dagger(u) @ u - identity(d)))
    if defect > tol:
        raise ValueError(f"basis change is not unitary, ||U^dagger U - 1||_F = {defect:.3e}")
    return u


def corollary1_check(
    model: LgksModel, basis_change=None, tol: Optional[float] = None
) -> CriterionVerdict:
    """Irreducible if some B_i is ladder-form, in the computational basis or after U^dagger B U."""
    tol = _tol(tol)
    ensure_valid(model)
    u = None if basis_change is None else _check_unitary(basis_change, model.dim, 1e-8)

    forms = []
    for index, channel in enumerate(model.channels, start=1):
        op = channel.operator if u is None else dagger(u) @ channel.operator @ u
        form = is_ladder_form(op, tol)
        forms.append(form.value)
        if form is not LadderForm.NEITHER:
            return CriterionVerdict(
                criterion=Criterion.COROLLARY1,
                applicable=True,
                passed=True,
                evidence={
                    "witness_channel": index,
                    "witness_label": channel.label,
                    "form": form.value,
                    "basis_changed": u is not None,
                },
            )

    return CriterionVerdict(
        criterion=Criterion.COROLLARY1,
        applicable=True,
        passed=False,
        evidence={"forms": forms, "basis_changed": u is not None},
        notes="inconclusive: no Lindblad operator is ladder-form in this basis",
    )


def _resolve_layout(model: LgksModel, layout: Optional[CompositeLayout]) -> Optional[CompositeLayout]:
    layout = layout or model.layout
    if layout is not None and layout.total_dim != model.dim:
        raise DimensionError(
            f"layout {list(layout.factor_dims)} does not match model dimension {model.dim}"
        )
    return layout


def site_channels(
    model: LgksModel, layout: CompositeLayout, tol: Optional[float] = None
) -> Dict[int, List[Tuple[int, ComplexMatrix]]]:
    """Channels acting on a single site, as {site: [(channel index, local operator)]}."""
    tol = _tol(tol)
    per_site: Dict[int, List[Tuple[int, ComplexMatrix]]] = {
        j: [] for j in range(1, layout.n_sites + 1)
    }
    for index, op in enumerate(model.operators, start=1):
        for site in range(1, layout.n_sites + 1):
            local = extract_local(op, site, layout, tol)
            if local is None:
                continue
            # Multiples of the identity act on every site and carry no structure
            scalar = np.trace(local) / local.shape[0] * identity(local.shape[0])
            if np.linalg.norm(local - scalar) <= tol * np.linalg.norm(local):
                break
            per_site[site].append((index, local))
            break
    return per_site


def _not_applicable(criterion: Criterion, notes: str) -> CriterionVerdict:
    return CriterionVerdict(criterion=criterion, applicable=False, passed=False, notes=notes)


def _local_witness(
    locals_: List[Tuple[int, ComplexMatrix]], draws: int, seed: int, tol: float
) -> Optional[Tuple[str, ComplexMatrix]]:
    n = len(locals_)
    ops = [local for _, local in locals_]
    for label, candidate in _search_candidates(n, draws, seed, with_hamiltonian=False):
        m = sum(a * op + b * dagger(op) for a, b, op in zip(candidate.alphas, candidate.betas, ops))
        if _trivial_pair_commutant(m, tol).dimension == 1:
            return label, m
    return None


def theorem2_check(
    model: LgksModel,
    layout: Optional[CompositeLayout] = None,
    combos: Optional[Sequence[Combination]] = None,
    draws: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
) -> CriterionVerdict:
    """
    Irreducible if per-site combinations M_j give a trivial commutant of all {M_j, M_j^dagger}.

    Without `combos`, each M_j is built from the channels supported only on
    site j, searched like `theorem1_check` until its local pair commutant is
    trivial. A single-site layout delegates to `theorem1_check`.
    """
    tol = _tol(tol)
    draws = settings.DEFAULT_SEARCH_DRAWS if draws is None else draws
    seed = settings.DEFAULT_SEED if seed is None else seed
    ensure_valid(model)
    layout = _resolve_layout(model, layout)
    if layout is None:
        return _not_applicable(Criterion.THEOREM2, "model has no tensor layout")

    if layout.n_sites == 1:
        single = theorem1_check(
            model, combo=combos[0] if combos else None, draws=draws, seed=seed, tol=tol
        )
        return CriterionVerdict(
            criterion=Criterion.THEOREM2,
            applicable=single.applicable,
            passed=single.passed,
            evidence=dict(single.evidence),
            notes=single.notes,
            borderline=single.borderline,
        )

    evidence: Dict[str, object] = {"seed": seed, "draws": draws}
    if combos is not None:
        if len(combos) != layout.n_sites:
            raise DimensionError(
                f"need one combination per site ({layout.n_sites}), got {len(combos)}"
            )
        site_ops = [build_combination(model, combo) for combo in combos]
        evidence["witnesses"] = {
            str(j): combo.as_evidence() for j, combo in enumerate(combos, start=1)
        }
    else:
        per_site = site_channels(model, layout, tol)
        witnesses = {}
        missing = []
        site_ops = []
        for site, locals_ in per_site.items():
            found = _local_witness(locals_, draws, seed, tol) if locals_ else None
            if found is None:
                missing.append(site)
                continue
            label, local = found
            witnesses[str(site)] = {
                "channels": [index for index, _ in locals_],
                "witness": label,
            }
            site_ops.append(embed_local(local, site, layout))
        evidence["witnesses"] = witnesses
        if missing:
            evidence["missing_sites"] = missing
            return CriterionVerdict(
                criterion=Criterion.THEOREM2,
                applicable=True,
                passed=False,
                evidence=evidence,
                notes=f"inconclusive: no local witness on sites {missing}",
            )

    ops = [op for m in site_ops for op in (m, dagger(m))]
    comm = commutant(ops, tol)
    passed = comm.dimension == 1
    evidence["commutant_dimension"] = comm.dimension
    evidence["margin"] = comm.null.margin
    return CriterionVerdict(
        criterion=Criterion.THEOREM2,
        applicable=True,
        passed=passed,
        evidence=evidence,
        notes="" if passed else f"inconclusive: joint commutant has dimension {comm.dimension}",
        borderline=comm.null.margin < BORDERLINE_FACTOR,
    )


def corollary2_check(
    model: LgksModel, layout: Optional[CompositeLayout] = None, tol: Optional[float] = None
) -> CriterionVerdict:
    """Irreducible if every site carries a channel that is a ladder-form local operator there."""
    tol = _tol(tol)
    ensure_valid(model)
    layout = _resolve_layout(model, layout)
    if layout is None:
        return _not_applicable(Criterion.COROLLARY2, "model has no tensor layout")

    witnesses = {}
    missing = []
    for site, locals_ in site_channels(model, layout, tol).items():
        for index, local in locals_:
            form = is_ladder_form(local, tol)
            if form is not LadderForm.NEITHER:
                witnesses[str(site)] = {"channel": index, "form": form.value}
                break
        else:
            missing.append(site)

    passed = not missing
    evidence: Dict[str, object] = {"witnesses": witnesses}
    if missing:
        evidence["missing_sites"] = missing
    return CriterionVerdict(
        criterion=Criterion.COROLLARY2,
        applicable=True,
        passed=passed,
        evidence=evidence,
        notes="" if passed else f"inconclusive: no ladder-form channel on sites {missing}",
    )
