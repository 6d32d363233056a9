"""Command-line entry point: ``temporal-games {simulate,verify,optimize,sweep}``.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, montecarlo
from .correlators import InterventionSchedule, Target
from .games import GameKind, analytic_payoff, make_game, simulate_game
from .optimizer import (
    DEFAULT_TOL,
    SWEEP_EXPRESSIONS,
    SWEEP_PARAMETERIZATIONS,
    maximize_lgi,
    maximize_payoff,
    maximize_temporal_chsh,
    sweep,
)
from .scenario import ScenarioError, direction_from_spec, load_scenario, parse_direction
from .verification import format_table, run_checks

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fail_usage(message: str) -> int:
    print(f"temporal-games: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _metadata(seed: int | None = None) -> dict:
    meta = {"version": __version__}
    if seed is not None:
        meta.update(seed=seed, seed_mixing=montecarlo.SEED_MIXING, block_size=montecarlo.BLOCK_SIZE)
    return meta


def _write_json(record: dict, out: str | None) -> None:
    text = json.dumps(record, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _parse_cli_direction(text: str) -> tuple[float, ...]:
    try:
        raw = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse direction {text!r}; use THETA,PHI or X,Y,Z") from None
    try:
        return parse_direction(raw, "--intervened")
    except ScenarioError as exc:
        raise UsageError(str(exc)) from None


def _schedule(args, default_target: Target) -> InterventionSchedule | None:
    if not args.intervened:
        return None
    dirs = tuple(direction_from_spec(_parse_cli_direction(t)) for t in args.intervened)
    target = Target(args.target) if args.target else default_target
    return InterventionSchedule(dirs, target)


# simulate -------------------------------------------------------------------

def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        return _fail_usage(str(exc))
    game = make_game(scenario.kind)
    try:
        strategy = scenario.quantum_strategy()
        sched = scenario.schedule()
        state = scenario.state()
        analytic = analytic_payoff(game, strategy, sched, None if game.kind.is_temporal else state)
        result = simulate_game(game, strategy, sched, scenario.rounds, scenario.seed, state, args.workers)
    except (ValueError, TypeError, ArithmeticError) as exc:
        print(f"temporal-games: simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    record = {
        **_metadata(scenario.seed),
        "scenario": scenario.to_dict(),
        "analytic_payoff": analytic,
        "empirical_payoff": result.empirical_payoff,
        "std_error": result.std_error,
        "mu_cl": float(game.mu_cl),
        "zeta": result.zeta,
        "verdict": result.verdict,
        "per_pair_counts": {
            f"{k},{l}": {"wins": w, "losses": lo} for (k, l), (w, lo) in result.per_pair_counts.items()
        },
    }
    out = args.out or scenario.output
    try:
        _write_json(record, out)
    except OSError as exc:
        print(f"temporal-games: cannot write {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"{scenario.game}: empirical {result.empirical_payoff:.6f} +/- {result.std_error:.6f}, "
          f"analytic {analytic:.6f}, verdict {result.verdict} -> {out}")
    return EXIT_OK


# verify ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    results = run_checks(seed=args.seed, only=args.only)
    if not results:
        return _fail_usage("no checks selected")
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


# optimize -------------------------------------------------------------------

def cmd_optimize(args) -> int:
    if args.tol <= 0:
        return _fail_usage("--tol must be positive")
    try:
        if args.expression == "payoff":
            kind = GameKind(args.game)
            default = Target.SHARED if kind.is_temporal else Target.BOB
            report = maximize_payoff(kind, _schedule(args, default), args.tol)
        elif args.expression == "lgi":
            sched = _schedule(args, Target.SHARED)
            if args.joint and sched is not None:
                raise UsageError("--joint optimizes the intervention; do not pass --intervened")
            report = maximize_lgi(sched, args.tol, joint=args.joint)
        else:
            report = maximize_temporal_chsh(_schedule(args, Target.SHARED), args.tol)
    except (UsageError, ValueError) as exc:
        return _fail_usage(str(exc))

    record = {
        **_metadata(),
        "expression": args.expression,
        "game": args.game if args.expression == "payoff" else None,
        "intervened": list(args.intervened or []),
        "joint": bool(args.joint),
        "tol": args.tol,
        **report.to_dict(),
    }
    try:
        _write_json(record, args.out)
    except OSError as exc:
        print(f"temporal-games: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_FAILURE
    if args.out:
        print(f"{args.expression}: best {report.best_value:.12f} "
              f"({'converged' if report.converged else 'NOT converged'}) -> {args.out}")
    if not report.converged:
        print("temporal-games: optimizer did not converge; report is partial", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


# sweep ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".9g")


def cmd_sweep(args) -> int:
    if args.steps < 1:
        return _fail_usage(f"--steps must be at least 1, got {args.steps}")
    if args.mc_rounds is not None and args.mc_rounds < 1:
        return _fail_usage(f"--mc-rounds must be at least 1, got {args.mc_rounds}")
    try:
        montecarlo.check_seed(args.seed)
        sched = _schedule(args, Target.SHARED)
        rows = sweep(args.expression, args.parameterization, args.steps, sched, args.game,
                     args.mc_rounds, args.seed, args.workers)
    except (UsageError, ValueError) as exc:
        return _fail_usage(str(exc))

    mc = args.mc_rounds is not None
    lines = ["angle_deg,value,analytic,empirical,std_error" if mc else "angle_deg,value"]
    for r in rows:
        cells = [r.angle_deg, r.value] + ([r.value, r.empirical, r.std_error] if mc else [])
        lines.append(",".join(_fmt(c) for c in cells))
    try:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"temporal-games: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_FAILURE
    best = max(rows, key=lambda r: r.value)
    print(f"{args.expression} sweep: {len(rows)} rows, max {best.value:.9g} at {best.angle_deg:g} deg -> {args.out}")
    return EXIT_OK


# parser ---------------------------------------------------------------------

def _add_intervention_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--intervened", action="append", metavar="DIR",
                   help="intervening measurement direction, THETA,PHI in degrees or X,Y,Z; "
                        "repeat for a schedule (use --intervened=-30,0 for negative angles)")
    p.add_argument("--target", choices=[t.value for t in Target],
                   help="system the intervener measures (default: shared-qubit, or bob-qubit "
                        "for nonlocal-temporal)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="temporal-games",
                                     description="Temporal and spatio-temporal quantum game simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a JSON scenario and write a JSON result record")
    p.add_argument("scenario", help="scenario file")
    p.add_argument("--out", help="result path (overrides the scenario's output field)")
    p.add_argument("--workers", type=int, help=f"worker threads (default: ${montecarlo.WORKERS_ENV} or all CPUs)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--only", action="append", metavar="KEY", help="run only the named check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="maximize an expression over measurement directions")
    p.add_argument("expression", choices=("lgi", "tchsh", "payoff"))
    _add_intervention_args(p)
    p.add_argument("--joint", action="store_true", help="lgi: also optimize one intervening direction")
    p.add_argument("--game", default="lgi", choices=[k.value for k in GameKind], help="game for payoff")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="tabulate an expression along a one-angle family as CSV")
    p.add_argument("expression", choices=SWEEP_EXPRESSIONS)
    p.add_argument("--steps", type=int, required=True, help="number of intervals over 0..180 degrees")
    p.add_argument("--out", required=True)
    p.add_argument("--parameterization", default="equal-angle", choices=SWEEP_PARAMETERIZATIONS)
    _add_intervention_args(p)
    p.add_argument("--game", default="lgi", choices=[k.value for k in GameKind if k.is_temporal],
                   help="game for payoff sweeps")
    p.add_argument("--mc-rounds", type=int, help="also estimate each row by simulation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        return _fail_usage("--workers must be at least 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
