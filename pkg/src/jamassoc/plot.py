"""Deterministic SVG line charts from result CSVs."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import InvalidInputError


class PlotFormatError(InvalidInputError):
    """The CSV lacks rows or a column the plot needs."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: ``y`` averaged per ``x``, one line per value of ``series``.

    ``flip_x`` plots ``1 - x`` (the lambda axis is shown as jammer strength).
    """

    x: str
    y: str
    series: str | None = None
    flip_x: bool = False
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    series_label: str = "{}"

    @classmethod
    def for_sweep(cls) -> PlotSpec:
        return cls("lambda", "leader_payoff", "N", flip_x=True, xlabel="1 - lambda",
                   ylabel="mean delivered packets per round", series_label="N = {}")

    @classmethod
    def for_gateways(cls) -> PlotSpec:
        return cls("lambda", "leader_payoff", "M", flip_x=True, xlabel="1 - lambda",
                   ylabel="mean delivered packets per round", series_label="M = {}")

    @classmethod
    def for_trace(cls) -> PlotSpec:
        return cls("round", "leader_payoff", xlabel="round",
                   ylabel="delivered packets per round")


def _read(path, spec: PlotSpec):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [c for c in (spec.x, spec.y, spec.series) if c is not None]
        missing = [c for c in needed if c not in header]
        if missing:
            raise PlotFormatError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise PlotFormatError(f"{path}: no data rows")
    groups = defaultdict(lambda: defaultdict(list))
    for r in rows:
        try:
            x, y = float(r[spec.x]), float(r[spec.y])
        except ValueError as exc:
            raise PlotFormatError(f"{path}: non-numeric value in {spec.x}/{spec.y}") from exc
        if np.isnan(y):
            continue
        key = r[spec.series] if spec.series else ""
        groups[key][1.0 - x if spec.flip_x else x].append(y)
    return groups


def _series_order(keys):
    try:
        return sorted(keys, key=float)
    except ValueError:
        return sorted(keys)


def emit_plot(csv_path, spec: PlotSpec, out) -> Path:
    """Render ``csv_path`` as an SVG line chart at ``out``.

    The same CSV and spec always give a byte-identical file. Nothing is written
    if the CSV is empty or lacks a needed column.
    """
    groups = _read(csv_path, spec)

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "jamassoc", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for key in _series_order(groups):
            pts = groups[key]
            xs = sorted(pts)
            ys = [float(np.mean(pts[x])) for x in xs]
            label = spec.series_label.format(key) if spec.series else None
            ax.plot(xs, ys, marker="o", markersize=3, label=label)
        ax.set_xlabel(spec.xlabel or spec.x)
        ax.set_ylabel(spec.ylabel or spec.y)
        if spec.title:
            ax.set_title(spec.title)
        if spec.series:
            ax.legend()
        ax.grid(alpha=0.3)
        fig.tight_layout()
        out = Path(out)
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out
