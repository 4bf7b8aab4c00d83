"""CSV / JSON / SVG writers for paths, quadrature results and ambient curves."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .engine import (
    GeodesicPath,
    GeodesicState,
    QuadratureResult,
    _angle,
    clairaut_slant,
    path_residuals,
    speed_residual,
)
from .surface import MetricProfile

PATH_COLUMNS = ("s", "u", "v", "du", "dv", "omega", "theta", "slant_residual", "speed_residual")


def path_table(p: MetricProfile, path: GeodesicPath) -> list[tuple[float, ...]]:
    slant, speed = path_residuals(p, path)
    rows = []
    for st, rs, rv in zip(path.states, slant, speed):
        rows.append((st.s, st.u, st.v, st.du, st.dv, p.omega(st.u), _angle(p, st)[0], float(rs), float(rv)))
    return rows


def _write_rows(header: Sequence[str], rows: Iterable[Sequence[float]], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        # repr round-trips doubles exactly
        w.writerow([repr(float(x)) for x in r])


def path_csv(p: MetricProfile, path: GeodesicPath) -> str:
    buf = io.StringIO()
    _write_rows(PATH_COLUMNS, path_table(p, path), buf)
    return buf.getvalue()


def read_path_csv(text: str) -> tuple[list[GeodesicState], dict[str, np.ndarray]]:
    """Parse an exported path; returns the states and every column by name."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != PATH_COLUMNS:
        raise ValueError(f"unexpected header {header}")
    data = np.array([[float(x) for x in row] for row in reader if row])
    cols = {name: data[:, i] for i, name in enumerate(header)}
    states = [GeodesicState(*row[:5]) for row in data]
    return states, cols


def recompute_residuals(p: MetricProfile, text: str) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Re-derive the slant and speed residual columns of an exported path.

    The reference slant is recovered from the first row as ``slant - residual``.
    """
    states, cols = read_path_csv(text)
    c = clairaut_slant(p, states[0]).c - cols["slant_residual"][0]
    slant = np.array([clairaut_slant(p, st).c - c for st in states])
    speed = np.array([speed_residual(p, st) for st in states])
    return slant, speed, cols


def path_json(p: MetricProfile, path: GeodesicPath) -> dict:
    d = path.diagnostics
    return {
        "slant": path.slant.c,
        "diagnostics": {
            "max_speed_drift": d.max_speed_drift,
            "max_slant_drift": d.max_slant_drift,
            "turning_points": list(d.turning_points),
            "status": d.status,
            "max_clamp_excess": d.max_clamp_excess,
        },
        "columns": list(PATH_COLUMNS),
        "rows": [list(r) for r in path_table(p, path)],
    }


def quadrature_rows(results: Sequence[QuadratureResult]) -> list[tuple[float, float]]:
    rows = []
    for k, q in enumerate(results):
        pairs = list(zip(q.u_grid, q.v_values))
        rows.extend(pairs if k == 0 else pairs[1:])  # segments share their junction
    return [(float(u), float(v)) for u, v in rows]


def quadrature_csv(results: Sequence[QuadratureResult]) -> str:
    buf = io.StringIO()
    _write_rows(("u", "v"), quadrature_rows(results), buf)
    return buf.getvalue()


def quadrature_json(results: Sequence[QuadratureResult]) -> dict:
    return {"segments": [
        {"branch_sign": q.branch_sign, "estimated_error": q.estimated_error,
         "u": q.u_grid.tolist(), "v": q.v_values.tolist()}
        for q in results
    ]}


def curve_csv(s: Sequence[float], points: np.ndarray) -> str:
    buf = io.StringIO()
    _write_rows(("s", "x", "y", "z"), ((si, *pt) for si, pt in zip(s, points)), buf)
    return buf.getvalue()


def write_svg(path: Path, curves: Sequence[tuple[np.ndarray, np.ndarray, str]],
              xlabel: str, ylabel: str, title: str = "",
              ambient: Optional[Sequence[tuple[np.ndarray, np.ndarray, str]]] = None) -> None:
    """Static polyline plot; a second panel shows the ambient (x, y) projection when given."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ncols = 2 if ambient else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5 * ncols, 4), squeeze=False)
    ax = axes[0, 0]
    for x, y, label in curves:
        ax.plot(x, y, lw=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    if ambient:
        ax2 = axes[0, 1]
        for x, y, label in ambient:
            ax2.plot(x, y, lw=1.2, label=label)
        ax2.set_xlabel("x")
        ax2.set_ylabel("y")
        ax2.set_title("ambient projection")
        ax2.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def dumps(obj) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, np.generic):
            return clean(x.item())
        return x

    return json.dumps(clean(obj), indent=2)
