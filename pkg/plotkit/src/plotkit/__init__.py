"""Render benchmark results CSVs into paper-style figures.

Three figure kinds:

- ``regret_vs_w``: median dynamic regret over seeds vs. lookahead window W,
  one labeled curve per algorithm, log-scale y.
- ``trajectory2d``: a 2-d reference curve with tracker paths overlaid.
- ``runtime_table``: median wall time per algorithm as a horizontal bar table.

All values are taken verbatim from the CSV; nothing is re-computed.
Rendering is deterministic: fixed figure geometry, fixed fonts, fixed
``svg.hashsalt``, and all date/creator metadata stripped, so the same CSV
always produces byte-identical PNG and SVG files.
"""

import csv
import os
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__version__ = "1.0.0"

KINDS = ("regret_vs_w", "trajectory2d", "runtime_table")

REQUIRED_COLUMNS = {
    "regret_vs_w": ("experiment", "algorithm", "W", "seed", "regret"),
    "trajectory2d": ("algorithm", "t", "x1", "x2"),
    "runtime_table": ("algorithm", "W", "seed", "wall_us"),
}

# Stable display order and styling for the known algorithms; anything else
# is appended alphabetically with cycled fallback styles.
DEFAULT_STYLE = {
    "rhapd":   {"color": "#1f77b4", "marker": "o", "label": "RHAPD"},
    "rhapd_s": {"color": "#9467bd", "marker": "D", "label": "RHAPD-S"},
    "rham":    {"color": "#17becf", "marker": "v", "label": "RHAM"},
    "pgd":     {"color": "#ff7f0e", "marker": "s", "label": "PGD"},
    "fista":   {"color": "#2ca02c", "marker": "^", "label": "FISTA"},
    "rhgd":    {"color": "#d62728", "marker": "x", "label": "RHGD"},
    "rhag":    {"color": "#8c564b", "marker": "+", "label": "RHAG"},
    "mpc":     {"color": "#7f7f7f", "marker": "*", "label": "MPC"},
    "reference": {"color": "#000000", "marker": "", "label": "reference"},
}
_FALLBACK_COLORS = ("#e377c2", "#bcbd22", "#aec7e8", "#ffbb78")

_DETERMINISTIC_RC = {
    "svg.hashsalt": "plotkit",
    "font.family": "DejaVu Sans",
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "path.simplify": False,
}


class PlotkitError(Exception):
    """Input or schema problem; the message names the offending piece."""


@dataclass
class FigureSpec:
    inputs: list
    kind: str
    out: str
    style: dict = field(default_factory=dict)
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotkitError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise PlotkitError("no input CSV given")


def read_rows(path, kind):
    """Read one CSV, validating that every column the kind needs exists."""
    required = REQUIRED_COLUMNS[kind]
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise PlotkitError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotkitError(f"{path}: empty CSV (no header)")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise PlotkitError(
                f"{path}: missing column(s) {', '.join(repr(m) for m in missing)} "
                f"required for kind {kind!r}")
        rows = list(reader)
    if not rows:
        raise PlotkitError(f"{path}: CSV has a header but no data rows")
    return rows


def _styles(algorithms, overrides):
    known = [a for a in DEFAULT_STYLE if a in algorithms]
    extra = sorted(a for a in algorithms if a not in DEFAULT_STYLE)
    ordered = known + extra
    styles = {}
    for i, a in enumerate(ordered):
        base = dict(DEFAULT_STYLE.get(a, {
            "color": _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)],
            "marker": ".", "label": a}))
        base.update(overrides.get(a, {}))
        styles[a] = base
    return ordered, styles


def _median_by(rows, key_fields, value_field):
    groups = {}
    for row in rows:
        try:
            key = tuple(row[k] for k in key_fields)
            value = float(row[value_field])
        except (KeyError, ValueError) as exc:
            raise PlotkitError(f"bad row {row!r}: {exc}") from None
        if np.isfinite(value):
            groups.setdefault(key, []).append(value)
    return {k: float(np.median(v)) for k, v in groups.items()}


def _new_figure():
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    return fig, ax


def _render_regret_vs_w(rows, spec, ax):
    med = _median_by(rows, ("algorithm", "W"), "regret")
    algorithms = sorted({a for a, _ in med})
    ordered, styles = _styles(algorithms, spec.style)
    for a in ordered:
        ws = sorted(int(w) for aa, w in med if aa == a)
        ys = [med[(a, str(w))] for w in ws]
        st = styles[a]
        ax.plot(ws, ys, color=st["color"], marker=st["marker"],
                label=st["label"], linewidth=1.5, markersize=5)
    ax.set_yscale("log")
    ax.set_xlabel("lookahead window W")
    ax.set_ylabel("dynamic regret (median over seeds)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    return len(ordered)


def _render_trajectory2d(rows, spec, ax):
    paths = {}
    for row in rows:
        try:
            paths.setdefault(row["algorithm"], []).append(
                (float(row["t"]), float(row["x1"]), float(row["x2"])))
        except (KeyError, ValueError) as exc:
            raise PlotkitError(f"bad row {row!r}: {exc}") from None
    algorithms = sorted(paths)
    ordered, styles = _styles(algorithms, spec.style)
    for a in ordered:
        pts = sorted(paths[a])
        xs = [p[1] for p in pts]
        ys = [p[2] for p in pts]
        st = styles[a]
        if a == "reference":
            ax.plot(xs, ys, color=st["color"], linewidth=2.0, label=st["label"])
        else:
            ax.plot(xs, ys, color=st["color"], linewidth=1.0, alpha=0.8,
                    label=st["label"])
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    return len(ordered)


def _render_runtime_table(rows, spec, ax):
    med = {k[0]: v for k, v in _median_by(rows, ("algorithm",), "wall_us").items()}
    ordered, styles = _styles(sorted(med), spec.style)
    ordered = ordered[::-1]  # fastest-reading order: first algorithm on top
    ys = np.arange(len(ordered))
    vals = [med[a] for a in ordered]
    ax.barh(ys, vals, color=[styles[a]["color"] for a in ordered])
    ax.set_yticks(ys, [styles[a]["label"] for a in ordered])
    ax.set_xscale("log")
    ax.set_xlabel("median wall time per run (microseconds)")
    for y, v in zip(ys, vals):
        ax.text(v, y, f" {v:,.0f}", va="center", fontsize=8)
    ax.grid(True, axis="x", alpha=0.3)
    return len(ordered)


_RENDERERS = {
    "regret_vs_w": _render_regret_vs_w,
    "trajectory2d": _render_trajectory2d,
    "runtime_table": _render_runtime_table,
}


def _out_paths(out):
    base, ext = os.path.splitext(out)
    if ext.lower() in (".png", ".svg"):
        out = base
    return out + ".png", out + ".svg"


def render(spec):
    """Render the figure and write PNG + SVG; returns the two paths.

    Raises :class:`PlotkitError` before writing anything if an input is
    missing, empty, or lacks a required column.
    """
    rows = []
    for path in spec.inputs:
        rows.extend(read_rows(path, spec.kind))
    png_path, svg_path = _out_paths(spec.out)
    with matplotlib.rc_context(_DETERMINISTIC_RC):
        fig, ax = _new_figure()
        try:
            _RENDERERS[spec.kind](rows, spec, ax)
            if spec.title:
                ax.set_title(spec.title)
            fig.tight_layout()
            fig.savefig(png_path, format="png",
                        metadata={"Software": f"plotkit {__version__}"})
            fig.savefig(svg_path, format="svg",
                        metadata={"Date": None,
                                  "Creator": f"plotkit {__version__}"})
        finally:
            plt.close(fig)
    return png_path, svg_path
