import io
import math

import numpy as np
import pytest

from jamassoc import bench
from jamassoc.bench import ExperimentSpec, ResultRow
from jamassoc.model import InvalidInputError


def small_spec(**kw):
    base = dict(experiment="sweep", sensor_counts=(4, 6), lambda_grid=(0.0, 0.5, 1.0),
                trials=2, master_seed=3)
    base.update(kw)
    return ExperimentSpec(**base)


def test_grid_helpers():
    g = bench.lambda_grid()
    assert len(g) == 21 and g[0] == 0.0 and g[-1] == 1.0
    assert bench.parse_lambda_grid("0:1:5") == (0.0, 0.25, 0.5, 0.75, 1.0)
    for bad in ("1:0:3", "0:1", "a:b:c", "-1:1:3", "0:1:0"):
        with pytest.raises(InvalidInputError):
            bench.parse_lambda_grid(bad)


def test_trial_seeds_distinct_and_stable():
    seeds = [bench.trial_seed(7, t) for t in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [bench.trial_seed(7, t) for t in range(100)]
    assert bench.trial_seed(8, 0) != seeds[0]


def test_profiles():
    q = ExperimentSpec.profile("sweep", "quick")
    assert q.trials == 25 and q.sensor_counts == (10, 20, 30) and len(q.lambda_grid) == 21
    f = ExperimentSpec.profile("scaling")
    assert f.trials == 100 and f.sensor_counts == (20, 40, 60)
    g = ExperimentSpec.profile("gateways")
    assert g.layouts == bench.GATEWAY_LAYOUTS and g.sensor_counts == (20,)
    with pytest.raises(InvalidInputError):
        ExperimentSpec.profile("sweep", "medium")


@pytest.mark.parametrize("kw", [{"trials": 0}, {"lambda_grid": ()}, {"lambda_grid": (-1.0,)},
                                {"experiment": "nope"}, {"sensor_counts": (0,)}])
def test_spec_validation(kw):
    with pytest.raises(InvalidInputError):
        small_spec(**kw)


def test_sweep_rows_and_invariants():
    rows = bench.run_sweep(small_spec())
    assert len(rows) == 2 * 2 * 3
    for r in rows:
        assert r.leader_payoff <= r.jamfree_payoff + 1e-9
        assert r.M == 2 and r.wall_ms == 0.0
    # common scenario across lambda: payoff curve of each trial is monotone
    for n in (4, 6):
        for t in range(2):
            pays = [r.leader_payoff for r in rows if r.N == n and r.trial == t]
            assert np.all(np.diff(pays) >= -1e-9)
    means = bench.mean_payoff(rows)
    assert set(means) == {(2, n, lam) for n in (4, 6) for lam in (0.0, 0.5, 1.0)}


def test_rerun_identical_csv():
    a, b = io.StringIO(), io.StringIO()
    bench.write_rows(bench.run_sweep(small_spec(trials=1)), a)
    bench.write_rows(bench.run_sweep(small_spec(trials=1)), b)
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().splitlines()[0] == (
        "experiment,trial,seed,lambda,M,N,leader_payoff,jamfree_payoff,n_victims,"
        "solver_nodes,wall_ms")


def test_csv_round_trip_and_aggregates_from_csv(tmp_path):
    rows = bench.run_sweep(small_spec())
    path = tmp_path / "r.csv"
    bench.write_rows(rows, path)
    back = bench.read_rows(path)
    assert back == rows
    assert bench.mean_payoff(back) == bench.mean_payoff(rows)
    assert bench.scaling_summary(back) == bench.scaling_summary(rows)


def test_read_rows_rejects_wrong_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError):
        bench.read_rows(path)


def test_relative_drop():
    assert bench.relative_drop({0.0: 8.0, 0.5: 9.0, 1.0: 10.0}) == pytest.approx(0.2)
    assert bench.relative_drop({0.0: 0.0}) == 0.0


def _row(M, lam, pay, trial=0):
    return ResultRow("gateways", trial, 0, lam, M, 20, pay, 20.0, 0, 1, 0.0)


def test_gateway_summary_hand():
    rows = [_row(1, 0.0, 10.0), _row(1, 1.0, 16.0), _row(2, 0.0, 12.5), _row(2, 1.0, 16.0),
            _row(4, 0.0, 16.0), _row(4, 1.0, 16.0)]
    gains = bench.gateway_summary(rows)
    assert gains == {1: 0.0, 2: pytest.approx(0.25), 4: pytest.approx(0.6)}
    with pytest.raises(InvalidInputError):
        bench.gateway_summary([_row(2, 0.0, 1.0)])


def test_failed_rows_are_skipped():
    rows = [_row(1, 0.0, 10.0), _row(1, 0.0, math.nan, trial=1)]
    assert rows[1].failed
    assert bench.mean_payoff(rows) == {(1, 20, 0.0): 10.0}


def test_solver_limit_recorded_not_raised():
    from jamassoc.bilp import SolverOptions
    rows = bench.run_sweep(small_spec(trials=1, sensor_counts=(4,)), SolverOptions(node_limit=0))
    assert rows and all(r.failed and r.solver_nodes == -1 for r in rows)


def test_gateway_comparison_small():
    spec = ExperimentSpec.profile("gateways", trials=2, sensor_counts=(6,),
                                  lambda_grid=(0.0, 1.0))
    rows, gains = bench.run_gateway_comparison(spec)
    assert sorted({r.M for r in rows}) == [1, 2, 3, 4]
    assert gains[1] == 0.0


def test_fictitious_traces(tmp_path):
    spec = ExperimentSpec.profile("fictitious", trials=3, sensor_counts=(8,), master_seed=1)
    traces = bench.run_fictitious(spec)
    assert len(traces) == 3
    again = bench.run_fictitious(spec)
    assert [t.payoffs.tolist() for t in traces] == [t.payoffs.tolist() for t in again]
    path = tmp_path / "t.csv"
    bench.write_trace(traces[0], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "round,leader_payoff,n_victims,converged,cycle_length"
    assert len(lines) == traces[0].rounds_run + 1
