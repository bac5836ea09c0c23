import numpy as np
import pytest

from jamassoc.bilp import LPStatus, solve_lp

linprog = pytest.importorskip("scipy.optimize").linprog


def _random_lp(rng):
    n = int(rng.integers(1, 12))
    m_ub = int(rng.integers(0, 10))
    m_eq = int(rng.integers(0, 3))
    c = rng.normal(size=n)
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = rng.normal(size=m_ub) + 1.0
    A_eq = rng.normal(size=(m_eq, n))
    b_eq = A_eq @ rng.random(n) if rng.random() < 0.7 else rng.normal(size=m_eq)
    upper = np.where(rng.random(n) < 0.8, 1.0, rng.uniform(0.5, 3.0, n))
    return c, A_ub, b_ub, A_eq, b_eq, upper


def test_matches_scipy_on_random_lps():
    rng = np.random.default_rng(7)
    for _ in range(400):
        c, A_ub, b_ub, A_eq, b_eq, upper = _random_lp(rng)
        ref = linprog(-c, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                      A_eq=A_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
                      bounds=list(zip(np.zeros_like(upper), upper)), method="highs")
        res = solve_lp(c, A_ub, b_ub, A_eq, b_eq, upper)
        if ref.status == 2:
            assert res.status is LPStatus.INFEASIBLE
            continue
        assert res.status is LPStatus.OPTIMAL
        assert res.objective == pytest.approx(-ref.fun, abs=1e-7)
        assert np.all(A_ub @ res.x <= b_ub + 1e-7)
        assert np.allclose(A_eq @ res.x, b_eq, atol=1e-7)
        assert np.all(res.x >= -1e-9) and np.all(res.x <= upper + 1e-9)


def test_hand_lp():
    res = solve_lp(np.array([1.0]), np.array([[2.0]]), np.array([1.0]))
    assert res.status is LPStatus.OPTIMAL
    assert res.objective == pytest.approx(0.5)


def test_unbounded_with_infinite_upper():
    res = solve_lp(np.array([1.0, 0.0]), np.array([[-1.0, 1.0]]), np.array([0.0]),
                   upper=np.array([np.inf, np.inf]))
    assert res.status is LPStatus.UNBOUNDED


def test_negative_rhs_needs_phase_one():
    # x0 + x1 >= 1.5 written as -x0 - x1 <= -1.5
    res = solve_lp(np.array([-1.0, -2.0]), np.array([[-1.0, -1.0]]), np.array([-1.5]))
    assert res.status is LPStatus.OPTIMAL
    assert res.x == pytest.approx([1.0, 0.5])


def test_degenerate_problem_terminates():
    # many redundant rows through the same vertex
    n = 6
    A = np.vstack([np.eye(n), np.ones((1, n)), np.ones((1, n)), -np.eye(n)])
    b = np.concatenate([np.zeros(n), [0.0, 0.0], np.zeros(n)])
    res = solve_lp(np.ones(n), A, b)
    assert res.status is LPStatus.OPTIMAL
    assert res.objective == pytest.approx(0.0)
