"""Command-line entry point: ``jamassoc <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 solver node limit hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .bilp import SolverOptions
from .dynamics import fictitious_play
from .game import CoefficientError, KnowledgeMode
from .model import GenerationConfig, InvalidInputError, LAYOUTS, Scenario, generate_scenario
from .plot import PlotSpec, emit_plot
from .stackelberg import SolverLimitError, game_for, solve_equilibrium, verify_equilibrium

EXIT_OK, EXIT_INPUT, EXIT_LIMIT = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--trials", type=int, help="trials per configuration")
    p.add_argument("--lambda-grid", dest="lambda_grid", metavar="A:B:N",
                   help="N evenly spaced lambda values on [A, B] (default 0:1:21)")
    p.add_argument("--mode", choices=[m.value for m in KnowledgeMode], default="learned",
                   help="jammer knowledge model")
    p.add_argument("--profile", choices=("full", "quick"), default="full")
    p.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    p.add_argument("--node-limit", type=int, default=10_000_000, dest="node_limit")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="jamassoc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="draw a random scenario")
    g.add_argument("--layout", choices=[*LAYOUTS], default="two-gn")
    g.add_argument("--sensors", type=int, default=20)
    g.add_argument("--lambda", dest="lam", type=float, default=0.0)
    g.add_argument("--budget", type=float, default=2.0)

    s = sub.add_parser("solve", parents=[common], help="Stackelberg equilibrium of a scenario")
    s.add_argument("--scenario", type=Path, required=True)
    s.add_argument("--no-clamp", action="store_true",
                   help="keep raw jammed success probabilities (may be rejected)")
    s.add_argument("--no-ack-detection", action="store_true",
                   help="assume the jammer hears every ACK (p_ack = 1)")

    for name, text in (("sweep", "equilibrium payoff over a lambda grid"),
                       ("scaling", "relative payoff drop per sensor count"),
                       ("gateways", "compare gateway layouts")):
        e = sub.add_parser(name, parents=[common], help=text)
        e.add_argument("--sensors", type=int, nargs="+", help="sensor counts")
        e.add_argument("--timing", action="store_true",
                       help="record wall-clock milliseconds (makes output non-reproducible)")
        if name == "gateways":
            e.add_argument("--layout", nargs="+", choices=[*LAYOUTS], dest="layouts")

    f = sub.add_parser("fictitious", parents=[common], help="alternating best responses")
    f.add_argument("--scenario", type=Path,
                   help="scenario file (default: two-gn, 20 sensors, lambda 0.75 from --seed)")
    f.add_argument("--rounds", type=int, default=20)
    f.add_argument("--init", help="initial victim flags, e.g. 0,1,0,...")
    f.add_argument("--no-clamp", action="store_true")

    pl = sub.add_parser("plot", parents=[common], help="SVG line chart from a result CSV")
    pl.add_argument("csv", type=Path)
    pl.add_argument("--kind", choices=("auto", "sweep", "gateways", "trace"), default="auto")
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _spec(args, experiment: str) -> bench.ExperimentSpec:
    over = {"master_seed": args.seed, "mode": args.mode}
    if args.trials is not None:
        over["trials"] = args.trials
    if args.lambda_grid:
        over["lambda_grid"] = bench.parse_lambda_grid(args.lambda_grid)
    if getattr(args, "sensors", None):
        over["sensor_counts"] = tuple(args.sensors)
    if getattr(args, "layouts", None):
        over["layouts"] = tuple(args.layouts)
    if getattr(args, "timing", False):
        over["record_time"] = True
    return bench.ExperimentSpec.profile(experiment, args.profile, **over)


def _cmd_gen(args, opts):
    cfg = GenerationConfig(layout=args.layout, n_sensors=args.sensors, lam=args.lam,
                           budget=args.budget)
    s = generate_scenario(cfg, args.seed)
    _emit(json.dumps(s.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_solve(args, opts):
    s = Scenario.load(args.scenario)
    ack = not args.no_ack_detection
    eq = solve_equilibrium(s, args.mode, clamp=not args.no_clamp, ack_detection=ack,
                           options=opts)
    report = verify_equilibrium(eq, game_for(s, args.mode, not args.no_clamp, ack), s)
    doc = eq.to_dict()
    doc["verification"] = report.to_dict()
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if report.passed else 1


def _cmd_experiment(args, opts):
    spec = _spec(args, args.command)
    if args.command == "sweep":
        rows, summary = bench.run_sweep(spec, opts), None
    elif args.command == "scaling":
        rows, summary = bench.run_sensor_scaling(spec, opts)
    else:
        rows, summary = bench.run_gateway_comparison(spec, opts)
    bench.write_rows(rows, sys.stdout if args.out is None else args.out)
    if summary is not None:
        label = "relative_drop_by_N" if args.command == "scaling" else "max_gain_vs_M1_by_M"
        print(json.dumps({label: {str(k): v for k, v in summary.items()}}),
              file=sys.stderr if args.out is None else sys.stdout)
    return EXIT_LIMIT if any(r.failed for r in rows) else EXIT_OK


def _cmd_fictitious(args, opts):
    if args.scenario is not None:
        s = Scenario.load(args.scenario)
    else:
        s = generate_scenario(GenerationConfig(lam=0.75), args.seed)
    init = None
    if args.init:
        try:
            init = np.array([int(t) for t in args.init.split(",")])
        except ValueError as exc:
            raise InvalidInputError(f"bad --init {args.init!r}") from exc
    gc = game_for(s, args.mode, clamp=not args.no_clamp)
    trace = fictitious_play(s, args.mode, args.rounds, init, gc=gc, options=opts)
    bench.write_trace(trace, sys.stdout if args.out is None else args.out)
    return EXIT_OK


def _cmd_plot(args, opts):
    kind = args.kind
    if kind == "auto":
        with open(args.csv) as fh:
            header = fh.readline().strip().split(",")
        if header[:1] == ["round"]:
            kind = "trace"
        elif header[:1] == ["experiment"]:
            with open(args.csv) as fh:
                fh.readline()
                first = fh.readline().split(",")[0]
            kind = "gateways" if first == "gateways" else "sweep"
        else:
            raise InvalidInputError(f"{args.csv}: cannot tell what kind of CSV this is")
    spec = {"sweep": PlotSpec.for_sweep, "gateways": PlotSpec.for_gateways,
            "trace": PlotSpec.for_trace}[kind]()
    out = args.out or args.csv.with_suffix(".svg")
    emit_plot(args.csv, spec, out)
    return EXIT_OK


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "sweep": _cmd_experiment,
    "scaling": _cmd_experiment,
    "gateways": _cmd_experiment,
    "fictitious": _cmd_fictitious,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    opts = SolverOptions(node_limit=args.node_limit)
    try:
        return COMMANDS[args.command](args, opts)
    except SolverLimitError as exc:
        print(f"jamassoc: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (InvalidInputError, CoefficientError, ValueError, OSError, json.JSONDecodeError,
            KeyError) as exc:
        print(f"jamassoc: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
