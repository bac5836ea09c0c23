import numpy as np
import pytest
from hypothesis import settings

from jamassoc import bilp
from jamassoc.model import GenerationConfig, generate_scenario

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SMALL_LAYOUTS = {1: "single-center", 2: "two-gn"}


def random_program(rng, n_max=15, m_max=10, integer=True):
    """Random 0-1 program; coarse coefficients make ties (and the tie-break) common."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    scale = (lambda v: np.round(v * 2) / 2) if integer else (lambda v: v)
    p = bilp.BinaryProgram(n, scale(rng.normal(size=n) * 2))
    for _ in range(m):
        k = int(rng.integers(1, n + 1))
        idx = rng.choice(n, k, replace=False)
        coeffs = {int(i): float(scale(rng.normal() * 2)) for i in idx}
        sense = str(rng.choice(["<=", ">=", "="], p=[0.6, 0.3, 0.1]))
        p.add(coeffs, sense, float(scale(rng.normal() * 2)))
    return p


def small_scenario(seed, n, m, lam=None, **cfg):
    """Scenario with N sensors and M in {1, 2} gateways; tight capacity/budget for variety."""
    rng = np.random.default_rng([seed, 99])
    if lam is None:
        lam = float(rng.choice([0.0, 0.05, 0.1, 0.2, 0.4, 1.0]))
    cfg.setdefault("capacity", int(rng.integers(1, n + 1)))
    cfg.setdefault("budget", float(rng.integers(1, m + 1)))
    return generate_scenario(
        GenerationConfig(layout=SMALL_LAYOUTS[m], n_sensors=n, lam=lam, **cfg), seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
