"""Payoffs of the association game and the jammer's best response.

The WSN (leader) picks an association ``x`` (N x M, binary) and gateway
on/off vector ``y``; the jammer (follower) picks victims ``v`` (N, binary).
Link ``(n, m)`` succeeds with probability ``a[n, m] * v[n] + b[n, m]``, and the
jammer weighs sensor ``n`` by ``w[n] = sum_m delta_tilde[n, m] * x[n, m]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import LinkProbabilities


class KnowledgeMode(str, enum.Enum):
    """How the jammer estimates the link probabilities it is attacking.

    NAIVE assumes clear links always succeed and jammed links always fail.
    LEARNED has measured link outcomes through detection and ACK sniffing.
    """

    NAIVE = "naive"
    LEARNED = "learned"


class CoefficientError(ValueError):
    """Raised when link data would make jamming raise a link's success rate."""


@dataclass(frozen=True, eq=False)
class GameCoefficients:
    a: np.ndarray
    b: np.ndarray
    delta_tilde: np.ndarray
    rho: np.ndarray
    lam: float
    mode: KnowledgeMode

    @property
    def shape(self):
        return self.a.shape


@dataclass(frozen=True, eq=False)
class AssociationStrategy:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x).astype(np.int8)
        y = np.asarray(self.y).astype(np.int8).ravel()
        if x.ndim != 2 or y.shape != (x.shape[1],):
            raise ValueError("x must be N x M and y length M")
        if not (np.isin(x, (0, 1)).all() and np.isin(y, (0, 1)).all()):
            raise ValueError("association entries must be 0 or 1")
        if np.any(x.sum(axis=1) > 1):
            raise ValueError("a sensor may associate with at most one gateway")
        if np.any(x > y[None, :]):
            raise ValueError("association with a gateway that is switched off")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def idle(cls, n_sensors: int, n_gateways: int) -> AssociationStrategy:
        return cls(np.zeros((n_sensors, n_gateways)), np.zeros(n_gateways))

    def same_as(self, other: AssociationStrategy) -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)


@dataclass(frozen=True, eq=False)
class JammerStrategy:
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v).astype(np.int8).ravel()
        if not np.isin(v, (0, 1)).all():
            raise ValueError("victim flags must be 0 or 1")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @classmethod
    def silent(cls, n_sensors: int) -> JammerStrategy:
        return cls(np.zeros(n_sensors))

    @property
    def n_victims(self) -> int:
        return int(self.v.sum())


def _x(x):
    return x.x if isinstance(x, AssociationStrategy) else np.asarray(x)


def _v(v):
    return v.v if isinstance(v, JammerStrategy) else np.asarray(v)


def coefficients(lp: LinkProbabilities, mode=KnowledgeMode.LEARNED, lam: float = 0.0,
                 omega: float = 1.0) -> GameCoefficients:
    """Coupling coefficients of both players' objectives.

    ``a = p_n (p_jam - p_clear)`` and ``b = p_clear``, so a jammed link succeeds
    with ``p_n p_jam + (1 - p_n) p_clear``: the jammer only hurts packets it
    actually detected. ``rho = p_n * omega`` is the expected jamming power.
    """
    mode = KnowledgeMode(mode)
    gap = lp.p_jam - lp.p_clear
    if np.any(gap > 0):
        n, m = np.argwhere(gap > 0)[0]
        raise CoefficientError(
            f"jammed success exceeds clear success on link ({n}, {m}); "
            "use clamped link probabilities")
    if lam < 0 or omega < 0:
        raise ValueError("lambda and omega must be non-negative")
    p_n = lp.p_detect[:, None]
    a = p_n * gap
    b = np.array(lp.p_clear, dtype=float)
    if mode is KnowledgeMode.NAIVE:
        delta = -np.ones_like(a)
    else:
        delta = p_n * lp.p_ack[None, :] * gap
    rho = np.array(lp.p_detect, dtype=float) * omega
    for arr in (a, b, delta, rho):
        arr.setflags(write=False)
    return GameCoefficients(a, b, delta, rho, float(lam), mode)


def jammer_weight(x, gc: GameCoefficients) -> np.ndarray:
    """Per-sensor importance ``w`` as the jammer perceives it (always <= 0)."""
    return (gc.delta_tilde * _x(x)).sum(axis=1)


def jammer_best_response(x, gc: GameCoefficients) -> JammerStrategy:
    """Jam sensor n exactly when ``w[n] + lam * rho[n] <= 0`` (ties jam)."""
    score = jammer_weight(x, gc) + gc.lam * gc.rho
    return JammerStrategy((score <= 0).astype(np.int8))


def leader_payoff(x, v, gc: GameCoefficients) -> float:
    """Expected number of packets delivered per round."""
    xv = _x(x)
    vv = _v(v).astype(float)
    return float(((gc.a * vv[:, None] + gc.b) * xv).sum())


def jammer_objective(v, x, gc: GameCoefficients) -> float:
    """Jammer's cost (it minimizes): perceived delivery impact plus weighted power."""
    vv = _v(v).astype(float)
    return float(jammer_weight(x, gc) @ vv + gc.lam * (gc.rho @ vv))
