"""Network geometry and the distance-based link probability model.

Every probability here has the form ``p_ref ** ((dist / dist_ref) ** alpha)``:
a reference success (or detection) probability measured at a reference
distance, stretched by the path-loss exponent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np


class InvalidInputError(ValueError):
    """Raised for malformed scenarios, distances or generation settings."""


@dataclass(frozen=True)
class ChannelParams:
    alpha: float = 4.0
    p0_clear: float = 0.7
    d0: float = 0.5
    p0_jam: float = 0.1
    r0: float = 1.0
    p0_detect: float = 0.5
    D0: float = 0.5

    def __post_init__(self):
        for name in ("p0_clear", "p0_jam", "p0_detect"):
            p = getattr(self, name)
            if not (0.0 < p <= 1.0):
                raise InvalidInputError(f"{name} must lie in (0, 1], got {p}")
        for name in ("alpha", "d0", "r0", "D0"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be positive and finite, got {v}")


def _ref_power(dist, p_ref, dist_ref, alpha, what):
    dist = np.asarray(dist, dtype=float)
    if np.any(np.isnan(dist)) or np.any(dist < 0):
        raise InvalidInputError(f"{what} must be non-negative, got {dist}")
    with np.errstate(over="ignore"):
        out = np.power(p_ref, np.power(dist / dist_ref, alpha))
    return float(out) if out.ndim == 0 else out


def unjammed_success(d, cp: ChannelParams = ChannelParams()):
    """Success probability of an SN-to-GN link at distance ``d`` with no jamming."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(d_arr)):
        raise InvalidInputError(f"distance must be finite, got {d}")
    return _ref_power(d_arr, cp.p0_clear, cp.d0, cp.alpha, "distance")


def jammed_success(r, cp: ChannelParams = ChannelParams()):
    """Success probability of a jammed link.

    ``r`` is the SN-GN distance divided by the SN-jammer distance. An infinite
    ratio (sensor sitting on the jammer) yields 0. The result is not clamped
    against the unjammed probability; :func:`compute_link_probabilities` does
    that.
    """
    return _ref_power(r, cp.p0_jam, cp.r0, cp.alpha, "distance ratio")


def detection_prob(D, cp: ChannelParams = ChannelParams()):
    """Probability that the jammer hears a transmitter at distance ``D``."""
    D_arr = np.asarray(D, dtype=float)
    if np.any(~np.isfinite(D_arr)):
        raise InvalidInputError(f"distance must be finite, got {D}")
    return _ref_power(D_arr, cp.p0_detect, cp.D0, cp.alpha, "distance")


def _points(value, name):
    arr = np.array(value, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError(f"{name} must be a list of 2-D points")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite coordinates")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Scenario:
    """Positions plus every physical and economic parameter of one instance.

    Set ``unit_square=False`` to allow positions outside ``[0, 1]^2`` (useful
    for limit cases such as a far-away jammer).
    """

    sn_pos: np.ndarray
    gn_pos: np.ndarray
    jam_pos: np.ndarray
    channel: ChannelParams = ChannelParams()
    gn_cost: np.ndarray | None = None
    gn_capacity: np.ndarray | None = None
    budget: float = 2.0
    jam_power: float = 1.0
    lam: float = 0.0
    unit_square: bool = field(default=True, compare=False)

    def __post_init__(self):
        sn = _points(self.sn_pos, "sn_pos")
        gn = _points(self.gn_pos, "gn_pos")
        jam = np.array(self.jam_pos, dtype=float).reshape(-1)
        if jam.shape != (2,) or not np.all(np.isfinite(jam)):
            raise InvalidInputError("jam_pos must be one finite 2-D point")
        jam.setflags(write=False)
        if sn.ndim != 2 or sn.shape[0] < 1:
            raise InvalidInputError("need at least one sensor")
        if gn.ndim != 2 or gn.shape[0] < 1:
            raise InvalidInputError("need at least one gateway")
        M = gn.shape[0]
        cost = np.ones(M) if self.gn_cost is None else np.array(self.gn_cost, dtype=float).ravel()
        cap = (np.full(M, 10) if self.gn_capacity is None
               else np.array(self.gn_capacity, dtype=float).ravel())
        if cost.shape != (M,) or np.any(cost < 0) or not np.all(np.isfinite(cost)):
            raise InvalidInputError("gn_cost needs one finite non-negative entry per gateway")
        if cap.shape != (M,) or np.any(cap < 0) or np.any(cap != np.round(cap)):
            raise InvalidInputError("gn_capacity needs one non-negative integer per gateway")
        cap = cap.astype(np.int64)
        for arr in (cost, cap):
            arr.setflags(write=False)
        for name in ("budget", "jam_power", "lam"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise InvalidInputError(f"{name} must be finite and non-negative, got {v}")
        if self.unit_square:
            for name, arr in (("sn_pos", sn), ("gn_pos", gn), ("jam_pos", jam)):
                if np.any(arr < 0) or np.any(arr > 1):
                    raise InvalidInputError(f"{name} must lie in the unit square")
        object.__setattr__(self, "sn_pos", sn)
        object.__setattr__(self, "gn_pos", gn)
        object.__setattr__(self, "jam_pos", jam)
        object.__setattr__(self, "gn_cost", cost)
        object.__setattr__(self, "gn_capacity", cap)
        object.__setattr__(self, "budget", float(self.budget))
        object.__setattr__(self, "jam_power", float(self.jam_power))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n_sensors(self) -> int:
        return self.sn_pos.shape[0]

    @property
    def n_gateways(self) -> int:
        return self.gn_pos.shape[0]

    def with_lambda(self, lam: float) -> Scenario:
        return replace(self, lam=lam)

    def with_budget(self, budget: float) -> Scenario:
        return replace(self, budget=budget)

    def to_dict(self) -> dict:
        ch = self.channel
        return {
            "sn_pos": self.sn_pos.tolist(),
            "gn_pos": self.gn_pos.tolist(),
            "jam_pos": self.jam_pos.tolist(),
            "channel": {k: getattr(ch, k) for k in
                        ("alpha", "p0_clear", "d0", "p0_jam", "r0", "p0_detect", "D0")},
            "gn_cost": self.gn_cost.tolist(),
            "gn_capacity": self.gn_capacity.tolist(),
            "budget": self.budget,
            "jam_power": self.jam_power,
            "lambda": self.lam,
        }

    @classmethod
    def from_dict(cls, data: dict, unit_square: bool = True) -> Scenario:
        required = ("sn_pos", "gn_pos", "jam_pos", "channel", "gn_cost", "gn_capacity",
                    "budget", "jam_power", "lambda")
        missing = [k for k in required if k not in data]
        if missing:
            raise InvalidInputError(f"scenario is missing keys: {', '.join(missing)}")
        try:
            channel = ChannelParams(**data["channel"])
        except TypeError as exc:
            raise InvalidInputError(f"bad channel block: {exc}") from None
        return cls(
            sn_pos=data["sn_pos"], gn_pos=data["gn_pos"], jam_pos=data["jam_pos"],
            channel=channel, gn_cost=data["gn_cost"], gn_capacity=data["gn_capacity"],
            budget=data["budget"], jam_power=data["jam_power"], lam=data["lambda"],
            unit_square=unit_square,
        )

    def save(self, path) -> None:
        # json writes floats with repr, which round-trips doubles exactly
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> Scenario:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(data)


@dataclass(frozen=True, eq=False)
class LinkProbabilities:
    p_clear: np.ndarray
    p_jam: np.ndarray
    p_detect: np.ndarray
    p_ack: np.ndarray
    clamped: bool = True


def _dist(a, b):
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))


def compute_link_probabilities(s: Scenario, clamp: bool = True,
                               ack_detection: bool = True) -> LinkProbabilities:
    """Evaluate all link, detection and ACK-detection probabilities of a scenario.

    Parameters
    ----------
    s : Scenario
    clamp : bool
        Cap the jammed success probability by the unjammed one entrywise.
    ack_detection : bool
        Compute the jammer's ACK-detection probability per gateway from the
        gateway-jammer distance; with False every gateway's ACKs are heard.
    """
    cp = s.channel
    d = _dist(s.sn_pos, s.gn_pos)
    D = _dist(s.sn_pos, s.jam_pos[None, :])[:, 0]
    p_clear = unjammed_success(d, cp)

    on_jammer = D == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d / D[:, None]
    ratio[on_jammer, :] = np.inf
    p_jam = jammed_success(ratio, cp)
    if clamp:
        p_jam = np.minimum(p_jam, p_clear)

    p_detect = detection_prob(D, cp)
    if ack_detection:
        p_ack = detection_prob(_dist(s.gn_pos, s.jam_pos[None, :])[:, 0], cp)
    else:
        p_ack = np.ones(s.n_gateways)
    for arr in (p_clear, p_jam, p_detect, p_ack):
        arr.setflags(write=False)
    return LinkProbabilities(p_clear, p_jam, p_detect, p_ack, clamp)


LAYOUTS = {
    "single-center": ([(0.5, 0.5)], 20),
    "two-gn": ([(0.25, 0.5), (0.75, 0.5)], 10),
    "three-gn": ([(0.25, 0.25), (0.25, 0.75), (0.75, 0.5)], 10),
    "four-gn": ([(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)], 10),
}


@dataclass(frozen=True)
class GenerationConfig:
    """Settings for :func:`generate_scenario`.

    ``layout`` names an entry of :data:`LAYOUTS`; ``gn_pos`` (with
    ``layout="explicit"``) places gateways by hand. ``capacity`` and ``cost``
    default to the layout's values (capacity 20 for the single centre gateway,
    10 otherwise; unit cost).
    """

    layout: str = "two-gn"
    n_sensors: int = 20
    gn_pos: tuple | None = None
    capacity: int | None = None
    cost: float = 1.0
    budget: float = 2.0
    jam_power: float = 1.0
    lam: float = 0.0
    channel: ChannelParams = ChannelParams()


def generate_scenario(cfg: GenerationConfig, seed) -> Scenario:
    """Draw a random scenario: jammer first, then sensors, i.i.d. uniform on the unit square.

    Gateway positions come from the layout, so two configs differing only in
    layout (or in ``n_sensors``) share the jammer position for a given seed.
    """
    if cfg.layout == "explicit":
        if cfg.gn_pos is None:
            raise InvalidInputError("layout 'explicit' needs gn_pos")
        gn, cap = [tuple(p) for p in cfg.gn_pos], 10
    elif cfg.layout in LAYOUTS:
        gn, cap = LAYOUTS[cfg.layout]
    else:
        raise InvalidInputError(
            f"unknown layout {cfg.layout!r}; choose from {', '.join(LAYOUTS)} or explicit")
    if cfg.n_sensors < 1:
        raise InvalidInputError("n_sensors must be at least 1")
    if cfg.capacity is not None:
        cap = cfg.capacity
    rng = np.random.default_rng(seed)
    jam = rng.random(2)
    sn = rng.random((cfg.n_sensors, 2))
    M = len(gn)
    return Scenario(sn_pos=sn, gn_pos=gn, jam_pos=jam, channel=cfg.channel,
                    gn_cost=np.full(M, cfg.cost), gn_capacity=np.full(M, cap),
                    budget=cfg.budget, jam_power=cfg.jam_power, lam=cfg.lam)
