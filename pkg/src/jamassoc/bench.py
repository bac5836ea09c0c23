"""Experiment harness: lambda sweeps, sensor scaling, gateway layouts, fictitious play.

Every trial draws one scenario from a seed derived from ``(master_seed, trial)``
and reuses it across the whole lambda grid (and across sensor counts and
layouts), so curves compare like with like. Rows are plain records that
round-trip through CSV; every aggregate is recomputed from rows alone.
"""

from __future__ import annotations

import csv
import math
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import bilp
from .dynamics import PlayTrace, fictitious_play
from .game import KnowledgeMode
from .model import GenerationConfig, InvalidInputError, Scenario, generate_scenario
from .stackelberg import SolverLimitError, jam_free_optimum, solve_equilibrium

EXPERIMENTS = ("sweep", "scaling", "gateways", "fictitious")
GATEWAY_LAYOUTS = ("single-center", "two-gn", "three-gn", "four-gn")
CSV_HEADER = ("experiment", "trial", "seed", "lambda", "M", "N", "leader_payoff",
              "jamfree_payoff", "n_victims", "solver_nodes", "wall_ms")
TRACE_HEADER = ("round", "leader_payoff", "n_victims", "converged", "cycle_length")


def lambda_grid(lo: float = 0.0, hi: float = 1.0, n: int = 21) -> tuple[float, ...]:
    if n < 1 or lo < 0 or hi < lo:
        raise InvalidInputError("lambda grid needs n >= 1 and 0 <= lo <= hi")
    if n == 1:
        return (float(lo),)
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def parse_lambda_grid(text: str) -> tuple[float, ...]:
    """Parse ``a:b:n`` into ``n`` evenly spaced values on ``[a, b]``."""
    try:
        a, b, n = text.split(":")
        return lambda_grid(float(a), float(b), int(n))
    except ValueError as exc:
        raise InvalidInputError(f"bad lambda grid {text!r}, expected a:b:n") from exc


def trial_seed(master_seed: int, trial: int) -> int:
    """One independent stream per trial, spawned from the master seed."""
    ss = np.random.SeedSequence([int(master_seed), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str = "sweep"
    sensor_counts: tuple[int, ...] = (20, 40, 60)
    layouts: tuple[str, ...] = ("two-gn",)
    lambda_grid: tuple[float, ...] = field(default_factory=lambda_grid)
    trials: int = 100
    master_seed: int = 0
    mode: KnowledgeMode = KnowledgeMode.LEARNED
    budget: float = 2.0
    rounds: int = 20
    fictitious_lambda: float = 0.75
    record_time: bool = False
    out: Path | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidInputError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise InvalidInputError("trials must be at least 1")
        if not self.lambda_grid or min(self.lambda_grid) < 0:
            raise InvalidInputError("lambda grid must be non-empty and non-negative")
        if not self.sensor_counts or min(self.sensor_counts) < 1:
            raise InvalidInputError("sensor counts must be positive")
        if not self.layouts:
            raise InvalidInputError("at least one layout is needed")
        object.__setattr__(self, "mode", KnowledgeMode(self.mode))

    @classmethod
    def profile(cls, experiment: str, name: str = "full", **overrides) -> ExperimentSpec:
        """Defaults for an experiment; ``quick`` trims trials and sensor counts."""
        if name not in ("full", "quick"):
            raise InvalidInputError(f"unknown profile {name!r}")
        quick = name == "quick"
        base = {"experiment": experiment, "trials": 25 if quick else 100}
        if experiment in ("sweep", "scaling"):
            base["sensor_counts"] = (10, 20, 30) if quick else (20, 40, 60)
        elif experiment == "gateways":
            base.update(sensor_counts=(20,), layouts=GATEWAY_LAYOUTS)
        elif experiment == "fictitious":
            base.update(sensor_counts=(20,), trials=1)
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    trial: int
    seed: int
    lam: float
    M: int
    N: int
    leader_payoff: float
    jamfree_payoff: float
    n_victims: int
    solver_nodes: int
    wall_ms: float

    @property
    def failed(self) -> bool:
        return math.isnan(self.leader_payoff)

    def as_csv(self) -> list[str]:
        return [str(getattr(self, f.name)) if not isinstance(getattr(self, f.name), float)
                else repr(getattr(self, f.name)) for f in fields(self)]


def _scenario(layout: str, n: int, seed: int, spec: ExperimentSpec) -> Scenario:
    return generate_scenario(GenerationConfig(layout=layout, n_sensors=n, budget=spec.budget), seed)


def _trial_rows(spec: ExperimentSpec, trial: int, layout: str, n: int,
                options: bilp.SolverOptions | None) -> list[ResultRow]:
    seed = trial_seed(spec.master_seed, trial)
    base = _scenario(layout, n, seed, spec)
    M = base.n_gateways
    try:
        jam_free = jam_free_optimum(base, options)
    except SolverLimitError:
        jam_free = math.nan
    rows = []
    for lam in spec.lambda_grid:
        t0 = time.perf_counter()
        try:
            eq = solve_equilibrium(base.with_lambda(lam), spec.mode, options=options)
        except SolverLimitError:
            rows.append(ResultRow(spec.experiment, trial, seed, lam, M, n, math.nan,
                                  jam_free, -1, -1, 0.0))
            continue
        wall = (time.perf_counter() - t0) * 1e3 if spec.record_time else 0.0
        rows.append(ResultRow(spec.experiment, trial, seed, lam, M, n, eq.leader_payoff,
                              jam_free, eq.v_star.n_victims, eq.solver_stats["nodes"], wall))
    return rows


def _run(spec: ExperimentSpec, layouts, counts, options, progress) -> list[ResultRow]:
    rows = []
    for layout in layouts:
        for n in counts:
            for trial in range(spec.trials):
                rows.extend(_trial_rows(spec, trial, layout, n, options))
                if progress is not None:
                    progress(layout, n, trial)
    return rows


def run_sweep(spec: ExperimentSpec, options: bilp.SolverOptions | None = None,
              progress=None) -> list[ResultRow]:
    """Equilibrium payoff for every (N, lambda, trial) on the two-gateway layout."""
    return _run(spec, spec.layouts, spec.sensor_counts, options, progress)


def mean_payoff(rows) -> dict[tuple[int, int, float], float]:
    """Mean leader payoff keyed by ``(M, N, lambda)``; failed rows are skipped."""
    acc = defaultdict(list)
    for r in rows:
        if not r.failed:
            acc[(r.M, r.N, r.lam)].append(r.leader_payoff)
    return {k: float(np.mean(v)) for k, v in sorted(acc.items())}


def _curves(rows, key_index):
    out = defaultdict(dict)
    for (M, N, lam), val in mean_payoff(rows).items():
        out[(M, N)[key_index]][lam] = val
    return {k: dict(sorted(v.items())) for k, v in out.items()}


def relative_drop(curve: dict[float, float]) -> float:
    """``(max - min) / max`` of a mean-payoff curve."""
    vals = np.array(list(curve.values()))
    top = vals.max()
    return float((top - vals.min()) / top) if top > 0 else 0.0


def run_sensor_scaling(spec: ExperimentSpec, options: bilp.SolverOptions | None = None,
                       progress=None) -> tuple[list[ResultRow], dict[int, float]]:
    """Sweep rows plus the relative payoff drop across the lambda grid for each N."""
    rows = run_sweep(spec, options, progress)
    return rows, scaling_summary(rows)


def scaling_summary(rows) -> dict[int, float]:
    return {n: relative_drop(c) for n, c in sorted(_curves(rows, 1).items())}


def run_gateway_comparison(spec: ExperimentSpec, options: bilp.SolverOptions | None = None,
                           progress=None) -> tuple[list[ResultRow], dict[int, float]]:
    """Rows for every layout plus each layout's best relative gain over one central gateway."""
    rows = _run(spec, spec.layouts, spec.sensor_counts, options, progress)
    return rows, gateway_summary(rows)


def gateway_summary(rows, reference_m: int = 1) -> dict[int, float]:
    """Max over lambda of ``(mean_M - mean_ref) / mean_ref``, keyed by gateway count."""
    curves = _curves(rows, 0)
    if reference_m not in curves:
        raise InvalidInputError(f"no rows for the M={reference_m} reference layout")
    ref = curves[reference_m]
    gains = {}
    for m, curve in curves.items():
        rel = [(curve[lam] - ref[lam]) / ref[lam] for lam in curve if lam in ref and ref[lam] > 0]
        gains[m] = float(max(rel)) if rel else math.nan
    return dict(sorted(gains.items()))


def run_fictitious(spec: ExperimentSpec, scenario: Scenario | None = None,
                   init_v=None, options: bilp.SolverOptions | None = None) -> list[PlayTrace]:
    """One trace per trial (or a single trace for a given scenario)."""
    if scenario is not None:
        scenarios = [scenario]
    else:
        scenarios = [
            _scenario(spec.layouts[0], spec.sensor_counts[0],
                      trial_seed(spec.master_seed, t), spec).with_lambda(spec.fictitious_lambda)
            for t in range(spec.trials)
        ]
    return [fictitious_play(s, spec.mode, spec.rounds, init_v, options=options)
            for s in scenarios]


@contextmanager
def _sink(dest):
    if hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", newline="") as fh:
            yield fh


def write_rows(rows, dest) -> None:
    """Write rows as CSV to a path or an open text stream."""
    with _sink(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r.as_csv())


def read_rows(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CSV_HEADER:
            raise InvalidInputError(f"{path}: unexpected header {header!r}")
        types = [f.type for f in fields(ResultRow)]
        conv = {"str": str, "int": int, "float": float}
        return [ResultRow(*(conv[t](v) for t, v in zip(types, line))) for line in reader]


def write_trace(trace: PlayTrace, dest) -> None:
    with _sink(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        cyc = "" if trace.cycle_length is None else trace.cycle_length
        for k, r in enumerate(trace.rounds):
            w.writerow([k, repr(r.leader_payoff), r.v.n_victims, int(trace.converged), cyc])


__all__ = [
    "CSV_HEADER",
    "ExperimentSpec",
    "GATEWAY_LAYOUTS",
    "ResultRow",
    "TRACE_HEADER",
    "gateway_summary",
    "lambda_grid",
    "mean_payoff",
    "parse_lambda_grid",
    "read_rows",
    "relative_drop",
    "run_fictitious",
    "run_gateway_comparison",
    "run_sensor_scaling",
    "run_sweep",
    "scaling_summary",
    "trial_seed",
    "write_rows",
    "write_trace",
]
