"""Render the standard figures from gmmstab CSV outputs.

Every figure reads one documented CSV schema and draws from it verbatim; the
only numeric work done here is axis transforms (log K, optional log epsilon).
Rows whose value cells are empty (infeasible or vacuous points) become gaps
in the curves rather than interpolated segments.

Figure ids and their CSV schemas (header rows, comma-separated, ``#``
comment lines ignored):

    sepVSK            d,K,eta_pi,c0,eta0,c0_eta0,status
    iterativeUB       K,c,epsilon,c_star,eta_star_minus_1,pi_bound_over_pi_min
    contamination     sweep_value,lambda,epsilon_hat,...,max_mean_bound,...
    example1-density  x,density_p,density_q
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("sepVSK", "iterativeUB", "contamination", "example1-density")


class FigureError(Exception):
    """Unknown figure id, missing file, or CSV schema mismatch."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str | Path
    figure_id: str
    output_image: str | Path

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise FigureError(f"unknown figure id {self.figure_id!r}; know {FIGURE_IDS}")


def read_table(path: str | Path, required: tuple[str, ...]) -> list[dict[str, str]]:
    """Read a gmmstab CSV into row dicts, skipping ``#`` comment lines.

    Raises FigureError if the file is missing/empty, the header lacks a
    required column, or there are no data rows.
    """
    path = Path(path)
    if not path.exists():
        raise FigureError(f"input CSV does not exist: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise FigureError(f"input CSV is empty: {path}")
    rows = list(csv.DictReader(lines))
    if not rows:
        raise FigureError(f"no data rows in {path}")
    missing = [col for col in required if col not in rows[0]]
    if missing:
        raise FigureError(f"{path} lacks required columns {missing}")
    return rows


def _value(cell: str | None) -> float:
    # Empty cells become NaN so matplotlib leaves a gap.
    return float(cell) if cell not in (None, "") else math.nan


def _series(rows: list[dict[str, str]], x_col: str, y_col: str) -> tuple[np.ndarray, np.ndarray]:
    pts = sorted((float(r[x_col]), _value(r[y_col])) for r in rows)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return xs, ys


def _fig_sep_vs_k(rows: list[dict[str, str]]) -> plt.Figure:
    dims = sorted({int(r["d"]) for r in rows})
    etas = sorted({float(r["eta_pi"]) for r in rows})
    fig, axes = plt.subplots(2, 2, figsize=(9.5, 7.5), sharex=True)
    flat = axes.ravel()
    for ax, d in zip(flat[:3], dims[:3]):
        sub = [r for r in rows if int(r["d"]) == d]
        for eta_pi in etas:
            xs, ys = _series(
                [r for r in sub if float(r["eta_pi"]) == eta_pi], "K", "c0_eta0"
            )
            ax.plot(xs, ys, marker=".", label=f"$\\pi_{{max}}/\\pi_{{min}}$={eta_pi:g}")
        ax.set_title(f"d = {d}")
        ax.set_xlabel("K")
        ax.set_ylabel(r"minimum separation $c_0\eta_0$")
        ax.grid(alpha=0.3)
    flat[0].legend(fontsize=8)
    # Fourth panel: the ratio to sqrt(log K) flattens as K grows.
    ax = flat[3]
    eta_ref = etas[0]
    for d in dims[:3]:
        sub = [
            r for r in rows
            if int(r["d"]) == d and float(r["eta_pi"]) == eta_ref and float(r["K"]) > 1
        ]
        xs, ys = _series(sub, "K", "c0_eta0")
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = ys / np.sqrt(np.log(xs))
        ax.plot(xs, ratio, marker=".", label=f"d={d}")
    ax.set_xlabel("K")
    ax.set_ylabel(r"$c_0\eta_0 / \sqrt{\log K}$")
    ax.set_title(f"scaling at $\\pi_{{max}}/\\pi_{{min}}$={eta_ref:g}")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _fig_iterative_ub(rows: list[dict[str, str]], log_x: bool = False) -> plt.Figure:
    ks = sorted({int(r["K"]) for r in rows})
    cs = sorted({float(r["c"]) for r in rows})
    quantities = (
        ("c_star", r"mean bound $c^*$"),
        ("eta_star_minus_1", r"scale-ratio bound $\eta^* - 1$"),
        ("pi_bound_over_pi_min", r"proportion bound / $\pi_{min}$"),
    )
    fig, axes = plt.subplots(3, len(ks), figsize=(3.2 * len(ks), 8.0),
                             sharex=True, squeeze=False)
    for col, k in enumerate(ks):
        sub_k = [r for r in rows if int(r["K"]) == k]
        for row_idx, (column, label) in enumerate(quantities):
            ax = axes[row_idx][col]
            for c in cs:
                xs, ys = _series(
                    [r for r in sub_k if float(r["c"]) == c], "epsilon", column
                )
                ax.plot(xs, ys, marker=".", label=f"c={c:g}")
            if log_x:
                ax.set_xscale("log")
            if row_idx == 0:
                ax.set_title(f"K = {k}")
            if row_idx == 2:
                ax.set_xlabel(r"$\epsilon$")
            if col == 0:
                ax.set_ylabel(label)
            ax.grid(alpha=0.3)
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def _fig_contamination(rows: list[dict[str, str]]) -> plt.Figure:
    lams = sorted({float(r["lambda"]) for r in rows})
    fig, (ax_eps, ax_bound) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for lam in lams:
        sub = [r for r in rows if float(r["lambda"]) == lam]
        xs, ys = _series(sub, "sweep_value", "epsilon_hat")
        ax_eps.plot(xs, ys, marker=".", label=f"$\\lambda$={lam:g}")
        xs, ys = _series(sub, "sweep_value", "max_mean_bound")
        ax_bound.plot(xs, ys, marker=".", label=f"$\\lambda$={lam:g}")
    ax_eps.set_xlabel("sweep value")
    ax_eps.set_ylabel(r"estimated fit level $\hat\epsilon$")
    ax_bound.set_xlabel("sweep value")
    ax_bound.set_ylabel("max certified mean bound")
    for ax in (ax_eps, ax_bound):
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _fig_example1_density(rows: list[dict[str, str]]) -> plt.Figure:
    xs, p = _series(rows, "x", "density_p")
    _, q = _series(rows, "x", "density_q")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(xs, p, label="P", linewidth=1.6)
    ax.plot(xs, q, label="Q", linestyle="--", linewidth=1.6)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


_REQUIRED = {
    "sepVSK": ("d", "K", "eta_pi", "c0_eta0"),
    "iterativeUB": ("K", "c", "epsilon", "c_star", "eta_star_minus_1",
                    "pi_bound_over_pi_min"),
    "contamination": ("sweep_value", "lambda", "epsilon_hat", "max_mean_bound"),
    "example1-density": ("x", "density_p", "density_q"),
}


def render(spec: FigureSpec, log_x: bool = False) -> plt.Figure:
    """Render the figure and write it to spec.output_image.

    Raises FigureError (and writes nothing) on schema problems.
    """
    rows = read_table(spec.input_csv, _REQUIRED[spec.figure_id])
    if spec.figure_id == "sepVSK":
        fig = _fig_sep_vs_k(rows)
    elif spec.figure_id == "iterativeUB":
        fig = _fig_iterative_ub(rows, log_x=log_x)
    elif spec.figure_id == "contamination":
        fig = _fig_contamination(rows)
    else:
        fig = _fig_example1_density(rows)
    fig.savefig(spec.output_image, dpi=130)
    plt.close(fig)
    return fig
