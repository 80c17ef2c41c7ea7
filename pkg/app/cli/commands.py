"""Command handlers for the lgks-audit command line.

Every handler takes the parsed namespace and returns an exit status:
0 for a unique steady state (or plain success), 1 when the steady state is
not unique. Input and numerical errors propagate to `app.main`.
"""

import argparse
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from app.config import settings
from app.core.models import LgksModel
from app.core.schemas import EvolveFile, EvolveRow, dump_model_file, parse_model_file
from app.cli import render
from app.quantum import zoo
from app.quantum.audit import audit
from app.quantum.operators import hermitian_eigen, trace_norm
from app.quantum.superoperator import evolve_many, spectrum_report, steady_states
from app.quantum.validation import ensure_valid

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _spin(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid spin {text!r}") from e


def load_model(path: str, max_dim: Optional[int]) -> LgksModel:
    """Read, parse and validate a model file."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    model = parse_model_file(text, max_dim)
    return ensure_valid(model)


def _exit_for(multiplicity: Optional[int]) -> int:
    return 0 if multiplicity == 1 else 1


def cmd_audit(args: argparse.Namespace) -> int:
    model = load_model(args.path, args.max_dim)
    report = audit(
        model,
        tol=args.tol,
        seed=args.seed,
        draws=args.search_draws,
        max_dim=args.max_dim,
    )
    render.write_output(render.render_audit(report, args.format), args.out)
    if report.oracle is None:
        logger.error("Audit oracle failed", extra={"notes": list(report.notes)})
        return 3
    return _exit_for(report.multiplicity)


def cmd_steady(args: argparse.Namespace) -> int:
    model = load_model(args.path, args.max_dim)
    result = steady_states(model, args.tol, args.max_dim)
    render.write_output(render.render_steady(result, args.format), args.out)
    return _exit_for(result.multiplicity)


def cmd_spectrum(args: argparse.Namespace) -> int:
    model = load_model(args.path, args.max_dim)
    report = spectrum_report(model, args.tol, args.max_dim)
    render.write_output(render.render_spectrum(report, args.format), args.out)
    return 0


def initial_states(spec: str, model: LgksModel, samples: int) -> List[np.ndarray]:
    """
    Initial density matrices for `evolve`.

    ground/excited are the lowest/highest-energy eigenstates of H (ties go to
    the lowest basis index for diagonal H); random:SEED draws `samples`
    states with seeds SEED, SEED + 1, ...
    """
    d = model.dim
    h = model.hamiltonian
    if spec == "maximally-mixed":
        return [np.eye(d, dtype=np.complex128) / d] * samples
    if spec in ("ground", "excited"):
        if np.count_nonzero(h - np.diag(np.diag(h))) == 0:
            energies = np.diag(h).real
            index = int(np.argmin(energies) if spec == "ground" else np.argmax(energies))
            psi = np.zeros(d, dtype=np.complex128)
            psi[index] = 1.0
        else:
            _, vectors = hermitian_eigen(h)
            psi = vectors[:, 0] if spec == "ground" else vectors[:, -1]
        return [np.outer(psi, psi.conj())] * samples
    if spec.startswith("random:"):
        from app.quantum.sampling import random_density_matrix

        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError as e:
            raise ValueError(f"invalid random seed in {spec!r}") from e
        return [random_density_matrix(d, seed=seed + k) for k in range(samples)]
    raise ValueError(
        f"unknown initial state {spec!r}; use ground, excited, maximally-mixed or random:SEED"
    )


def cmd_evolve(args: argparse.Namespace) -> int:
    model = load_model(args.path, args.max_dim)
    times = args.t
    if any(t < 0 for t in times):
        raise ValueError("negative times are not allowed: the dynamical semigroup has no inverse")
    if args.samples < 1:
        raise ValueError(f"--samples must be at least 1, got {args.samples}")

    oracle = steady_states(model, args.tol, args.max_dim)
    rho_ss = oracle.states[0] if oracle.multiplicity == 1 and oracle.states else None

    rows = []
    for sample, rho0 in enumerate(initial_states(args.rho0, model, args.samples)):
        for t, rho in zip(times, evolve_many(model, rho0, times, args.max_dim)):
            rows.append(
                EvolveRow(
                    sample=sample,
                    t=t,
                    distance=None if rho_ss is None else trace_norm(rho - rho_ss),
                    trace_residual=abs(complex(np.trace(rho)) - 1.0),
                    min_eigenvalue=float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]),
                    populations=[float(p) for p in np.diag(rho).real],
                )
            )

    table = EvolveFile(tool_version=settings.TOOL_VERSION, rho0=args.rho0, rows=rows)
    render.write_output(render.render_evolve(table, args.format), args.out)
    return 0


def _hamiltonian_two_level(args: argparse.Namespace) -> np.ndarray:
    return args.omega * np.asarray(zoo.SIGMA_Z) / 2.0


def _build_local(name: str, args: argparse.Namespace) -> LgksModel:
    builder = ZOO.get(name)
    if builder is None or name in ("lattice", "random"):
        raise ValueError(f"unknown local model {name!r}")
    return builder(args)


def _n_level(args: argparse.Namespace) -> LgksModel:
    down = args.down if args.down is not None else [args.gamma] * (args.d - 1)
    up = args.up if args.up is not None else [0.0] * (args.d - 1)
    return zoo.n_level_atom(args.d, down, up)


def _random(args: argparse.Namespace) -> LgksModel:
    from app.quantum.sampling import random_model

    return random_model(args.d, args.channels, seed=args.seed)


ZOO: Dict[str, Callable[[argparse.Namespace], LgksModel]] = {
    "two-level-T0": lambda a: zoo.two_level_T0(a.gamma, _hamiltonian_two_level(a)),
    "two-level-finite-T": lambda a: zoo.two_level_finite_T(
        a.gamma, a.nbar, _hamiltonian_two_level(a)
    ),
    "n-level": _n_level,
    "dephasing": lambda a: zoo.dephasing_two_level(a.gamma, _hamiltonian_two_level(a)),
    "spin-decay": lambda a: zoo.spin_decay(a.spin, a.gamma),
    "boson-decay": lambda a: zoo.boson_decay(a.n_max, a.gamma),
    "cavity-emitter": lambda a: zoo.cavity_emitter(a.n_max, a.kappa, a.gamma, a.g),
    "lattice": lambda a: zoo.atom_lattice(a.sites, _build_local(a.local, a), a.coupling),
    "random": _random,
}


def cmd_zoo(args: argparse.Namespace) -> int:
    builder = ZOO.get(args.name)
    if builder is None:
        raise ValueError(f"unknown zoo model {args.name!r}; choose from {', '.join(ZOO)}")
    model = builder(args)
    render.write_output(dump_model_file(model) + "\n", args.out)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=settings.DEFAULT_TOL, help="Relative rank tolerance")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Search/probe seed")
    parser.add_argument(
        "--search-draws",
        type=int,
        default=settings.DEFAULT_SEARCH_DRAWS,
        help="Random combinations tried by the Theorem 1/2 checkers",
    )
    parser.add_argument("--format", choices=[render.TEXT, render.MACHINE], default=render.TEXT)
    parser.add_argument("--out", default=None, help="Write output to this file instead of stdout")
    parser.add_argument(
        "--max-dim", type=int, default=settings.MAX_MODEL_DIM, help="Hilbert-dimension cap"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgks-audit",
        description="Audit steady-state uniqueness of finite-dimensional Lindblad models.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", required=True)

    audit_parser = subparsers.add_parser("audit", help="Run every criterion and the oracle")
    audit_parser.add_argument("path", help="Model file")
    _add_common(audit_parser)
    audit_parser.set_defaults(handler=cmd_audit)

    steady_parser = subparsers.add_parser("steady", help="Steady-state multiplicity and states")
    steady_parser.add_argument("path", help="Model file")
    _add_common(steady_parser)
    steady_parser.set_defaults(handler=cmd_steady)

    spectrum_parser = subparsers.add_parser("spectrum", help="Generator eigenvalues and gap")
    spectrum_parser.add_argument("path", help="Model file")
    _add_common(spectrum_parser)
    spectrum_parser.set_defaults(handler=cmd_spectrum)

    evolve_parser = subparsers.add_parser("evolve", help="Propagate initial states in time")
    evolve_parser.add_argument("path", help="Model file")
    evolve_parser.add_argument("--t", type=_floats, default=[0.0, 1.0, 2.0], help="Times, e.g. 0,1,2")
    evolve_parser.add_argument(
        "--rho0", default="maximally-mixed", help="ground, excited, maximally-mixed or random:SEED"
    )
    evolve_parser.add_argument("--samples", type=int, default=1)
    _add_common(evolve_parser)
    evolve_parser.set_defaults(handler=cmd_evolve)

    zoo_parser = subparsers.add_parser("zoo", help="Emit a built-in model as a model file")
    zoo_parser.add_argument("name", help=", ".join(ZOO))
    zoo_parser.add_argument("--gamma", type=float, default=1.0)
    zoo_parser.add_argument("--nbar", type=float, default=1.0)
    zoo_parser.add_argument("--omega", type=float, default=1.0, help="Two-level H = omega sigma_z / 2")
    zoo_parser.add_argument("--d", type=int, default=3)
    zoo_parser.add_argument("--down", type=_floats, default=None)
    zoo_parser.add_argument("--up", type=_floats, default=None)
    zoo_parser.add_argument("--spin", type=_spin, default=Fraction(1))
    zoo_parser.add_argument("--n-max", type=int, default=3)
    zoo_parser.add_argument("--kappa", type=float, default=1.0)
    zoo_parser.add_argument("--g", type=float, default=0.0)
    zoo_parser.add_argument("--sites", type=int, default=2)
    zoo_parser.add_argument("--local", default="two-level-T0")
    zoo_parser.add_argument("--coupling", type=float, default=None)
    zoo_parser.add_argument("--channels", type=int, default=2)
    zoo_parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    zoo_parser.add_argument("--out", default=None)
    zoo_parser.set_defaults(handler=cmd_zoo)

    return parser
