"""Render the six figure kinds from serialized simulation outputs.

Every figure is drawn on an explicit Agg canvas with pinned fonts and
sizes, so re-rendering identical inputs yields byte-identical PNGs. The
renderer is read-only over its inputs and computes no physics — reference
overlays (the identity diagonal on parity plots, the Haar mean from the
``haar`` output file, gap-ratio reference means from the spectral file,
and the textbook gap-ratio surmise densities) are presentation elements.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from . import io
from .errors import SpecError
from .spec import FigureSpec

DPI = 150

_STYLE = {
    "font.family": "DejaVu Sans",
    "mathtext.fontset": "dejavusans",
    "font.size": 11.0,
    "axes.titlesize": 12.0,
    "axes.labelsize": 11.0,
    "legend.fontsize": 9.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.6,
    "lines.linewidth": 1.6,
    "figure.dpi": float(DPI),
    "savefig.dpi": float(DPI),
    "svg.hashsalt": "tomofig",
}


def goe_ratio_density(r: np.ndarray) -> np.ndarray:
    """Wigner-like surmise for the folded gap ratio min/max under GOE."""
    r = np.asarray(r, dtype=float)
    return 2.0 * (27.0 / 4.0) * (r + r * r) / (1.0 + r + r * r) ** 2.5


def poisson_ratio_density(r: np.ndarray) -> np.ndarray:
    """Folded gap-ratio density for an uncorrelated (Poisson) spectrum."""
    r = np.asarray(r, dtype=float)
    return 2.0 / (1.0 + r) ** 2


def _new_figure(width: float, height: float) -> tuple[Figure, "matplotlib.axes.Axes"]:
    fig = Figure(figsize=(width, height), layout="constrained")
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot()


def _select_time(spec: FigureSpec, times: np.ndarray, path: Path) -> float:
    unique = np.unique(times)
    if spec.time is None:
        return float(unique[-1])
    close = unique[np.isclose(unique, spec.time, rtol=1e-9, atol=1e-12)]
    if close.size == 0:
        raise SpecError(f"{path}: time {spec.time:g} not present; available: "
                        f"{', '.join(f'{t:g}' for t in unique)}")
    return float(close[0])


def _fig_omega_profile(spec: FigureSpec) -> Figure:
    path = spec.input_path("fits")
    records = io.load_fits(path)
    if spec.time is not None:
        times = np.array([rec["time"] for rec in records])
        wanted = _select_time(spec, times, path)
        records = [rec for rec in records if np.isclose(rec["time"], wanted)]
    fig, ax = _new_figure(6.0, 4.0)
    for rec in records:
        orders = np.arange(1, len(rec["omega"]) + 1)
        ax.plot(orders, rec["omega"], marker="o", markersize=5,
                label=f"{rec['protocol']}, n0={rec['n0']}, t={rec['time']:g}")
    ax.set_xlabel("bond distance $j$")
    ax.set_ylabel(r"tension $\omega_j$ (bits)")
    ax.set_xticks(np.arange(1, max(len(rec["omega"]) for rec in records) + 1))
    ax.axhline(0.0, color="0.4", linewidth=0.8)
    ax.legend()
    ax.set_title(spec.title or "Bond tension profile")
    return fig


def _fig_scatter_s_vs_n1(spec: FigureSpec) -> Figure:
    path = spec.input_path("results")
    table = io.load_results(path)
    t = _select_time(spec, table["time"], path)
    rows = np.isclose(table["time"], t)
    fig, ax = _new_figure(6.0, 4.0)
    ax.errorbar(table["n"][rows, 0], table["mean_S"][rows], yerr=table["stderr"][rows],
                fmt="o", markersize=4.5, alpha=0.85, elinewidth=0.9, capsize=2,
                label=f"representatives, t={t:g}")
    if "haar" in spec.inputs:
        haar = io.load_haar(spec.input_path("haar"))
        mean, err = haar["mean_entropy_bits"], haar["stderr"]
        ax.axhspan(mean - err, mean + err, color="crimson", alpha=0.15)
        ax.axhline(mean, color="crimson", linestyle="--", linewidth=1.2,
                   label="Haar reference")
    ax.set_xlabel("crossed nearest-neighbour bonds $n_1$")
    ax.set_ylabel("entanglement entropy $S$ (bits)")
    ax.legend()
    ax.set_title(spec.title or "Entropy vs boundary size")
    return fig


def _fig_parity_s_vs_fit(spec: FigureSpec) -> Figure:
    path = spec.input_path("points")
    table = io.load_fit_points(path)
    rows = np.ones(len(table["time"]), dtype=bool)
    if spec.time is not None:
        rows = np.isclose(table["time"], _select_time(spec, table["time"], path))
    fitted, measured = table["fitted_S"][rows], table["mean_S"][rows]
    fig, ax = _new_figure(4.8, 4.8)
    ax.plot(fitted, measured, "o", markersize=4.5, alpha=0.85, zorder=3)
    ax.axline((float(fitted[0]), float(fitted[0])), slope=1.0, color="red",
              linestyle="--", linewidth=1.2, label=r"$S = S_\mathrm{fitted}$", zorder=2)
    ax.set_xlabel(r"$S_\mathrm{fitted}$ (bits)")
    ax.set_ylabel("$S$ (bits)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    ax.set_title(spec.title or "Measured vs fitted entropy")
    return fig


def _fig_ratio_histogram(spec: FigureSpec) -> Figure:
    data = io.load_spectral(spec.input_path("spectral"))
    edges, densities = data["bin_edges"], data["densities"]
    fig, ax = _new_figure(6.0, 4.0)
    ax.bar(edges[:-1], densities, width=np.diff(edges), align="edge",
           color="#9ecae1", edgecolor="#4292c6", linewidth=0.5,
           label=f"{data['protocol']}, L={data['L']}")
    grid = np.linspace(0.0, 1.0, 400)
    ax.plot(grid, goe_ratio_density(grid), color="#d62728", label="GOE surmise")
    ax.plot(grid, poisson_ratio_density(grid), color="#2ca02c", label="Poisson")
    styles = {"goe": ("#d62728", "GOE"), "coe": ("#9467bd", "COE"),
              "poisson": ("#2ca02c", "Poisson")}
    for name, value in data["references"].items():
        color, label = styles[name]
        ax.axvline(value, color=color, linestyle=":", linewidth=1.1,
                   label=rf"$\langle r\rangle$ {label} = {value:.3f}")
    ax.axvline(data["mean_r"], color="black", linewidth=1.3,
               label=rf"measured $\langle r\rangle$ = {data['mean_r']:.3f}")
    ax.set_xlabel("gap ratio $r$")
    ax.set_ylabel("density")
    ax.set_xlim(0.0, 1.0)
    ax.legend()
    ax.set_title(spec.title or "Level-spacing ratio distribution")
    return fig


def _fig_hcee_evolution(spec: FigureSpec) -> Figure:
    fig, ax = _new_figure(6.0, 4.0)
    all_positive, max_spread = True, 0.0
    for path in spec.inputs["hcee"]:
        table = io.load_half_chain(path)
        order = np.argsort(table["time"], kind="stable")
        times = table["time"][order]
        stem = path.stem
        label = stem[len("hcee_"):] if stem.startswith("hcee_") else stem
        ax.errorbar(times, table["mean_S"][order], yerr=table["stderr"][order],
                    marker="o", markersize=3.5, elinewidth=0.9, capsize=2, label=label)
        all_positive &= bool(times[0] > 0.0)
        max_spread = max(max_spread, float(times[-1] / times[0]) if times[0] > 0 else 0.0)
    if spec.xscale is not None:
        ax.set_xscale(spec.xscale)
    elif all_positive and max_spread >= 100.0:
        ax.set_xscale("log")
    ax.set_xlabel("time")
    ax.set_ylabel("half-chain entropy (bits)")
    ax.legend()
    ax.set_title(spec.title or "Half-chain entropy growth")
    return fig


def _fig_mutual_info_profile(spec: FigureSpec) -> Figure:
    path = spec.input_path("mi")
    table = io.load_mutual_information(path)
    t = _select_time(spec, table["time"], path)
    rows = np.isclose(table["time"], t)
    order = np.argsort(table["j"][rows], kind="stable")
    fig, ax = _new_figure(6.0, 4.0)
    ax.errorbar(table["j"][rows][order], table["mean_I"][rows][order],
                yerr=table["stderr"][rows][order], marker="s", markersize=4.5,
                elinewidth=0.9, capsize=2, label=f"t={t:g}")
    if spec.yscale is not None:
        ax.set_yscale(spec.yscale)
    ax.set_xticks(table["j"][rows][order])
    ax.set_xlabel("separation $j$")
    ax.set_ylabel("mutual information $I(s_0; s_j)$ (bits)")
    ax.legend()
    ax.set_title(spec.title or "Two-point mutual information")
    return fig


_BUILDERS = {
    "omega_profile": _fig_omega_profile,
    "scatter_S_vs_n1": _fig_scatter_s_vs_n1,
    "parity_S_vs_fit": _fig_parity_s_vs_fit,
    "ratio_histogram": _fig_ratio_histogram,
    "hcee_evolution": _fig_hcee_evolution,
    "mutual_info_profile": _fig_mutual_info_profile,
}


def build_figure(spec: FigureSpec) -> Figure:
    """Build (but do not save) the figure for one spec."""
    with matplotlib.rc_context(_STYLE):
        return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Render one spec to its output PNG and return the written path."""
    with matplotlib.rc_context(_STYLE):
        fig = _BUILDERS[spec.kind](spec)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, format="png", dpi=DPI,
                    metadata={"Software": "tomofig"})
    return spec.output
