"""Figure renderers for the simulation toolkit's exported CSV files.

Five figure kinds are supported, each reading only the documented delimited
outputs (never calling the simulation engine):

- ``vector_field``: pseudospin arrows on the plaquette lattice with marked
  vortices/antivortices and zero-magnitude plaquettes.
- ``m_vs_s``: order-parameter magnitude versus annealing parameter with
  confidence bands, one series per source.
- ``psi_histogram``: 2D histogram of the complex order parameter.
- ``correlation_panel``: log-log correlation decay with power-law fit lines.
- ``collapse_phase``: universal-collapse scatter plus the phase-diagram dome.

Rendering is deterministic: the SVG backend is pinned with a fixed hash salt
and date-free metadata, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "ktsim-figures"

SQRT3 = math.sqrt(3.0)


class FigureInputError(ValueError):
    """Raised when an input CSV does not match its documented schema."""


def read_table(path, required: list[str]) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise FigureInputError(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    for col in required:
        if col not in header:
            raise FigureInputError(f"{path}: missing column {col!r}")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    if data.size == 0:
        raise FigureInputError(f"{path}: no data rows")
    return {name: data[:, k] for k, name in enumerate(header)}


def _new_axes(figsize=(5.0, 4.0)):
    fig, ax = plt.subplots(figsize=figsize)
    return fig, ax


def _save(fig, output):
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, format="svg", metadata={"Date": None})
    plt.close(fig)


def cell_position(row, col):
    """Planar position of lattice cell (row, col) in the triangular frame."""
    return col + 0.5 * row, 0.5 * SQRT3 * row


def plaquette_position(row, col, orientation):
    """Centroid of the plaquette at (row, col, orientation)."""
    x0, y0 = cell_position(row, col)
    if orientation == 0:  # up triangle {(r,c), (r,c+1), (r+1,c)}
        return x0 + 0.5, y0 + SQRT3 / 6.0
    return x0 + 1.0, y0 + SQRT3 / 3.0  # down triangle


def render_vector_field(inputs, output, options=None):
    """Pseudospin arrows with defects marked at dual vertices."""
    options = options or {}
    field = read_table(inputs["field"], ["row", "col", "orientation", "re", "im"])
    xs, ys = zip(
        *[
            plaquette_position(r, c, o)
            for r, c, o in zip(field["row"], field["col"], field["orientation"])
        ]
    )
    xs, ys = np.array(xs), np.array(ys)
    re, im = field["re"], field["im"]
    mag = np.hypot(re, im)

    fig, ax = _new_axes((7.0, 5.0))
    nonzero = mag > 1e-12
    scale = options.get("arrow_scale", 0.45) / max(mag.max(), 1e-12)
    ax.quiver(
        xs[nonzero], ys[nonzero], re[nonzero] * scale, im[nonzero] * scale,
        np.angle(re[nonzero] + 1j * im[nonzero]),
        cmap="hsv", angles="xy", scale_units="xy", scale=1.0,
        width=0.004, pivot="mid", clim=(-np.pi, np.pi),
    )
    ax.plot(xs[~nonzero], ys[~nonzero], "k*", ms=9, label="zero plaquette")

    n_defects = 0
    if "winding" in inputs:
        chart = read_table(inputs["winding"], ["row", "col", "winding", "defined"])
        keep = (chart["defined"] > 0) & (np.abs(chart["winding"]) == 1)
        n_defects = int(keep.sum())
        for r, c, w in zip(
            chart["row"][keep], chart["col"][keep], chart["winding"][keep]
        ):
            x, y = cell_position(r, c)
            marker = "o" if w > 0 else "s"
            ax.plot(x, y, marker, mfc="white", mec="black", ms=12, mew=1.5)
    ax.set_aspect("equal")
    ax.set_xlabel("ring direction")
    ax.set_ylabel("open direction")
    ax.set_title(options.get("title", "pseudospin field"))
    _save(fig, output)
    return {"n_defects": n_defects, "n_plaquettes": len(xs),
            "n_zero": int((~nonzero).sum())}


def render_m_vs_s(inputs, output, options=None):
    """<m> against the annealing parameter, one errorbar series per source."""
    options = options or {}
    table = read_table(inputs["curve"], ["s", "m", "ci_lo", "ci_hi", "source"])
    fig, ax = _new_axes()
    sources = np.unique(table["source"])
    labels = options.get("source_labels", {})
    for k, src in enumerate(sources):
        sel = table["source"] == src
        order = np.argsort(table["s"][sel])
        s = table["s"][sel][order]
        m = table["m"][sel][order]
        lo = table["ci_lo"][sel][order]
        hi = table["ci_hi"][sel][order]
        label = labels.get(str(int(src)), f"source {int(src)}")
        ax.errorbar(s, m, yerr=[m - lo, hi - m], fmt="o-", ms=4,
                    capsize=2, label=label)
    ax.set_xlabel("annealing parameter s")
    ax.set_ylabel(r"$\langle m \rangle$")
    ax.legend(frameon=False)
    ax.set_title(options.get("title", "order parameter magnitude"))
    _save(fig, output)
    return {"n_series": len(sources), "n_points": len(table["s"])}


def render_psi_histogram(inputs, output, options=None):
    """2D histogram of complex order-parameter samples."""
    options = options or {}
    table = read_table(inputs["samples"], ["re", "im"])
    lim = options.get("limit", 1.2 * max(np.abs(table["re"]).max(),
                                         np.abs(table["im"]).max()))
    bins = int(options.get("bins", 61))
    fig, ax = _new_axes((5.0, 4.6))
    h = ax.hist2d(
        table["re"], table["im"], bins=bins,
        range=[[-lim, lim], [-lim, lim]], cmap="inferno",
    )
    fig.colorbar(h[3], ax=ax, label="samples")
    ax.set_aspect("equal")
    ax.set_xlabel(r"Re $\psi$")
    ax.set_ylabel(r"Im $\psi$")
    ax.set_title(options.get("title", "order parameter distribution"))
    _save(fig, output)
    return {"n_samples": len(table["re"]), "bins": bins}


def render_correlation_panel(inputs, output, options=None):
    """Log-log correlation decay; optional fitted power-law overlays."""
    options = options or {}
    fig, ax = _new_axes()
    series = inputs["series"]
    if isinstance(series, dict):
        series = [series]
    n_over = 0
    for spec in series:
        table = read_table(spec["path"], ["x", "C"])
        keep = (table["x"] > 0) & (table["C"] > 0)
        ax.plot(table["x"][keep], table["C"][keep], "o-", ms=4,
                label=spec.get("label", Path(spec["path"]).stem))
        if "fit" in spec:
            fit = read_table(spec["fit"], ["b", "prefactor"])
            xs = np.linspace(1.0, max(table["x"][keep]), 64)
            ax.plot(xs, fit["prefactor"][0] * xs ** (-fit["b"][0]), "--",
                    lw=1, color="gray")
            n_over += 1
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("distance x")
    ax.set_ylabel("C(x)")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(options.get("title", "correlation decay"))
    _save(fig, output)
    return {"n_series": len(series), "n_fit_overlays": n_over}


def render_collapse_phase(inputs, output, options=None):
    """Universal-collapse scatter beside the phase-diagram dome."""
    options = options or {}
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    collapse = read_table(inputs["collapse"], ["log_u", "v", "L"])
    for L in np.unique(collapse["L"]):
        sel = collapse["L"] == L
        ax1.plot(collapse["log_u"][sel], collapse["v"][sel], "o", ms=4,
                 label=f"L={int(L)}")
    ax1.set_xlabel(r"$\log(L^{-1} e^{a t^{-1/2}})$")
    ax1.set_ylabel("scaled observable")
    ax1.legend(frameon=False, fontsize=8)
    ax1.set_title("universal collapse")

    phase = read_table(inputs["phase"], ["Gamma", "T1", "T2"])
    order = np.argsort(phase["Gamma"])
    g = phase["Gamma"][order]
    ax2.plot(g, phase["T2"][order], "o-", label="upper transition")
    ax2.plot(g, phase["T1"][order], "s-", label="lower transition")
    ax2.fill_between(g, phase["T1"][order], phase["T2"][order], alpha=0.2)
    if "Gamma_c" in phase and np.isfinite(phase["Gamma_c"][0]):
        ax2.plot(phase["Gamma_c"][0], 0.0, "k^", ms=10, label="quantum critical point")
    ax2.set_xlabel(r"$\Gamma / J$")
    ax2.set_ylabel("T / J")
    ax2.set_ylim(bottom=0)
    ax2.legend(frameon=False, fontsize=8)
    ax2.set_title("phase diagram")
    fig.tight_layout()
    _save(fig, output)
    return {"n_gamma": len(g), "n_collapse_points": len(collapse["L"])}


RENDERERS = {
    "vector_field": render_vector_field,
    "m_vs_s": render_m_vs_s,
    "psi_histogram": render_psi_histogram,
    "correlation_panel": render_correlation_panel,
    "collapse_phase": render_collapse_phase,
}
