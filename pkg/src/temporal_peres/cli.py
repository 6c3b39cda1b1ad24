"""Command-line front end.

Every subcommand prints a JSON report to stdout (and optionally to ``--json``)
and exits 0 when all checks pass, 1 when a check fails and 2 on usage errors or
rejected angles.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence

from . import contexts as ctxmod
from .contexts import ContextRejected, ContextSet
from .dynamics import PrecessionAngle
from .nchv import (
    CapacityError,
    ConsistencyError,
    ConstraintSystem,
    constraints_from_contexts,
    cross_check,
    enumerate_assignments,
)
from .report import Report, dumps
from .simulator import RunSummary, run_spatial_context, run_temporal_context, write_trials_csv
from .states import StateError, StateVector, make_state, random_state

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

STATE_INDEPENDENCE_SAMPLES = 100
MAX_LISTED_ASSIGNMENTS = 64


def _exit_code(report: Report) -> int:
    if report.error is not None:
        return EXIT_USAGE
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


def _angle_json(theta: PrecessionAngle) -> dict:
    return {"label": theta.label(), "radians": theta.value, "exact": theta.exact}


def _nchv_section(report: Report, system: ConstraintSystem) -> None:
    """Add the hidden-variable results and checks shared by both verify commands."""
    check = cross_check(system)
    report.results["constraints"] = system.to_json()
    report.results["assignments_found"] = check.satisfying_count
    report.results["certificate"] = check.certificate.labels if check.certificate else None
    report.results["certificate_sign_product"] = check.certificate.sign_product if check.certificate else None
    report.check("no_noncontextual_assignment", check.satisfying_count == 0)
    report.check("parity_certificate_found", check.certificate is not None)
    report.check("deciders_agree", True)  # cross_check raises otherwise


def verify_temporal(theta1: PrecessionAngle, theta2: PrecessionAngle) -> Report:
    report = Report("verify-temporal", {"theta1": _angle_json(theta1), "theta2": _angle_json(theta2)})
    try:
        cs = ctxmod.build_temporal_contexts(theta1, theta2)
    except ContextRejected as exc:
        report.error = str(exc)
        report.results["rejected_pair"] = list(exc.pair) if exc.pair else None
        report.results["commutator_norm"] = exc.commutator_norm
        report.check("contexts_accepted", False)
        return report
    report.check("contexts_accepted", True)
    report.results["commutator_norm"] = ctxmod.assess(cs.contexts).commutator_norm
    report.results["contexts"] = [c.label for c in cs]
    report.results["joint_operators"] = [str(c.joint_operator) for c in cs]

    scalars = [ctxmod.scalar_identity_eigenvalue(c.joint_operator) for c in cs]
    report.results["eigenvalues"] = scalars
    report.check("joint_operators_scalar", all(s is not None for s in scalars))
    # closed form at accepted separations: (-sin d, +sin d, +1)
    s = round((theta2 - theta1).sin())
    report.results["predicted_eigenvalues"] = [-s, s, 1]
    report.check("eigenvalues_match_prediction", scalars == [-s, s, 1])
    report.check("eigenvalue_product_minus_one", math.prod(x or 0 for x in scalars) == -1)

    up = make_state("up")
    report.results["eigenvalues_on_up"] = [ctxmod.eigen_action(c.joint_operator, up) for c in cs]
    report.check("eigen_action_on_up", report.results["eigenvalues_on_up"] == scalars)
    independent = all(
        [ctxmod.eigen_action(c.joint_operator, random_state(1, seed)) for c in cs] == scalars
        for seed in range(STATE_INDEPENDENCE_SAMPLES)
    )
    report.results["state_independence_samples"] = STATE_INDEPENDENCE_SAMPLES
    report.check("state_independent", independent)
    report.check("four_factor_identity", ctxmod.third_context_factorization_check(theta1, theta2))

    _nchv_section(report, constraints_from_contexts(cs))
    return report


def verify_spatial() -> Report:
    report = Report("verify-spatial", {"state": "singlet"})
    cs = ctxmod.build_spatial_contexts()
    report.check("contexts_accepted", True)
    report.results["contexts"] = [c.label for c in cs]
    report.results["joint_operators"] = [str(c.joint_operator) for c in cs]
    report.results["eigenvalues"] = list(cs.eigenvalues)
    report.check("singlet_common_eigenstate", list(cs.eigenvalues) == [-1, -1, -1])
    report.check("eigenvalue_product_minus_one", math.prod(x or 0 for x in cs.eigenvalues) == -1)
    report.results["scalar_eigenvalues"] = [ctxmod.scalar_identity_eigenvalue(c.joint_operator) for c in cs]
    report.notes.append("spatial joint operators are not multiples of the identity; the eigenvalues are those of the singlet")
    report.check("four_factor_identity", ctxmod.spatial_factorization_check())
    _nchv_section(report, constraints_from_contexts(cs))
    return report


def _resolve_state(name: str, n_sites: int) -> StateVector:
    state = make_state(name, n_sites=n_sites)
    if state.n_sites != n_sites:
        raise StateError(f"state {name!r} has {state.n_sites} sites, this variant needs {n_sites}")
    return state


def simulate(
    variant: str,
    n_trials: int,
    seed: int,
    state_name: str | None,
    theta1: PrecessionAngle,
    theta2: PrecessionAngle,
) -> tuple[Report, list[RunSummary]]:
    state_name = state_name or ("up" if variant == "temporal" else "singlet")
    params = {"variant": variant, "trials": n_trials, "seed": seed, "state": state_name}
    if variant == "temporal":
        params.update(theta1=_angle_json(theta1), theta2=_angle_json(theta2))
    report = Report("simulate", params)
    if n_trials < 1:
        report.error = f"--trials must be at least 1, got {n_trials}"
        return report, []
    try:
        state = _resolve_state(state_name, 1 if variant == "temporal" else 2)
        cs: ContextSet
        if variant == "temporal":
            cs = ctxmod.build_temporal_contexts(theta1, theta2)
            runs = [run_temporal_context(c, theta1, theta2, state, n_trials, seed) for c in cs]
        else:
            cs = ctxmod.build_spatial_contexts()
            runs = [run_spatial_context(c, state, n_trials, seed) for c in cs]
    except (StateError, ContextRejected) as exc:
        report.error = str(exc)
        return report, []

    report.results["contexts"] = [c.label for c in cs]
    report.results["runs"] = [r.to_json() for r in runs]
    for ctx, run in zip(cs, runs):
        if run.expected_product is None:
            report.notes.append(
                f"context {ctx.index} ({ctx.label}): initial state is not an eigenstate, "
                f"products are {'deterministic' if run.deterministic else 'not deterministic'} "
                f"(informational)"
            )
        else:
            report.check(f"context_{ctx.index}_products", run.mismatches == 0)
        report.check(f"context_{ctx.index}_born", run.born_consistent(3.0))
    return report, runs


def _expected_scan_hits(grid: int) -> set[int]:
    # separations of exactly pi/2 or 3pi/2: 4k/grid must be an odd integer
    return {k for k in range(grid) if (4 * k) % grid == 0 and (4 * k // grid) % 2 == 1}


def scan(grid: int, theta1: PrecessionAngle) -> Report:
    report = Report("scan", {"grid": grid, "theta1": _angle_json(theta1)})
    if grid < ctxmod.MIN_GRID_POINTS:
        report.error = f"--grid must be at least {ctxmod.MIN_GRID_POINTS}, got {grid}"
        return report
    rows = ctxmod.scan_commuting_angles(grid, theta1)
    report.results["table"] = [
        {
            "index": r.index,
            "delta": r.delta.value,
            "exact": r.delta.label() if r.delta.exact else None,
            "commutator_norm": r.commutator_norm,
            "hermitian": r.hermitian,
            "commuting": r.commuting,
            "accepted": r.accepted,
        }
        for r in rows
    ]
    accepted = [r.index for r in rows if r.accepted]
    expected = sorted(_expected_scan_hits(grid))
    report.results["accepted_indices"] = accepted
    report.results["expected_indices"] = expected
    if not expected:
        report.notes.append(f"grid of {grid} points does not contain pi/2 or 3pi/2; resolution miss")
    report.check("accepted_exactly_at_quarter_turns", accepted == expected)
    return report


def run_nchv(system: ConstraintSystem, source: str) -> Report:
    report = Report("nchv", {"source": source})
    try:
        check = cross_check(system)
    except CapacityError as exc:
        report.error = str(exc)
        return report
    except ConsistencyError as exc:
        report.results["constraints"] = system.to_json()
        report.notes.append(str(exc))
        report.check("deciders_agree", False)
        return report
    report.results["constraints"] = system.to_json()
    report.results["satisfiable"] = check.satisfiable
    report.results["assignments_found"] = check.satisfying_count
    if check.satisfying_count <= MAX_LISTED_ASSIGNMENTS:
        report.results["assignments"] = enumerate_assignments(system)
    report.results["certificate"] = check.certificate.labels if check.certificate else None
    report.check("deciders_agree", True)
    return report


def _builtin_system(name: str) -> ConstraintSystem:
    cs = ctxmod.build_temporal_contexts() if name == "temporal" else ctxmod.build_spatial_contexts()
    return constraints_from_contexts(cs)


def _angle_arg(text: str) -> PrecessionAngle:
    try:
        return PrecessionAngle.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", type=Path, metavar="PATH", help="also write the report to PATH")


def _add_angles(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta1", type=_angle_arg, default=PrecessionAngle.quarter(0), help="omega*t1, e.g. 0 or pi/2")
    p.add_argument("--theta2", type=_angle_arg, default=PrecessionAngle.quarter(1), help="omega*t2 (default pi/2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="temporal-peres",
        description="Check the temporal and spatial Peres contextuality arguments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-temporal", help="exact checks for single-spin contexts at two times")
    _add_angles(p)
    _add_output(p)

    p = sub.add_parser("verify-spatial", help="exact checks for the two-spin singlet contexts")
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo of sequential projective measurements")
    p.add_argument("variant", choices=("temporal", "spatial"))
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--state", default=None, help="up, down, plus, singlet or random:SEED")
    _add_angles(p)
    _add_output(p)
    p.add_argument("--csv", type=Path, metavar="PATH", help="write the per-trial log to PATH")

    p = sub.add_parser("scan", help="sweep the time separation for commuting contexts")
    p.add_argument("--grid", type=int, default=360)
    p.add_argument("--theta1", type=_angle_arg, default=PrecessionAngle.quarter(0))
    _add_output(p)

    p = sub.add_parser("nchv", help="decide a +-1 constraint system from a JSON file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", type=Path)
    src.add_argument("--builtin", choices=("temporal", "spatial"))
    p.add_argument("--emit", type=Path, metavar="PATH", help="write the constraint system to PATH")
    _add_output(p)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    runs: list[RunSummary] = []
    if args.command == "verify-temporal":
        report = verify_temporal(args.theta1, args.theta2)
    elif args.command == "verify-spatial":
        report = verify_spatial()
    elif args.command == "simulate":
        report, runs = simulate(args.variant, args.trials, args.seed, args.state, args.theta1, args.theta2)
    elif args.command == "scan":
        report = scan(args.grid, args.theta1)
    else:
        try:
            system = _builtin_system(args.builtin) if args.builtin else ConstraintSystem.load(args.file)
        except (OSError, ValueError) as exc:
            report = Report("nchv", {"source": str(args.file)}, error=f"cannot read constraint system: {exc}")
        else:
            report = run_nchv(system, args.builtin or str(args.file))
            if args.emit:
                system.dump(args.emit)

    text = dumps(report.to_json())
    print(text)
    if getattr(args, "json", None):
        args.json.write_text(text + "\n", encoding="utf-8")
    if getattr(args, "csv", None) and runs:
        write_trials_csv(runs, args.csv)
    if report.error is not None:
        print(f"error: {report.error}", file=sys.stderr)
    return _exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
