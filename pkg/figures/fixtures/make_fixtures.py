"""Regenerate the synthetic fixture CSVs used by the figure tests.

All data here is handcrafted: small plaquette grids with one constructed
defect, ring-distributed order-parameter samples, exact power laws, and a
toy collapse/phase table matching the documented CSV schemas.
"""

import csv
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
SQRT3 = math.sqrt(3.0)


def write(name, header, rows):
    with open(HERE / name, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def field_and_winding():
    rows_n, cols_n = 3, 6
    phases = {}
    # clockwise plaquette ring around cell (1, 2), phases stepping by -pi/3
    ring = [(0, 2, 1), (0, 2, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1), (1, 2, 0)]
    for k, key in enumerate(ring):
        phases[key] = -k * math.pi / 3.0
    rows = []
    for r in range(rows_n):
        for c in range(cols_n):
            for o in (0, 1):
                theta = phases.get((r, c, o), 0.3)
                mag = 1.0 if (r, c, o) in phases else 0.8
                rows.append(
                    (r, c, o, f"{mag * math.cos(theta):.6f}",
                     f"{mag * math.sin(theta):.6f}")
                )
    write("field.csv", ["row", "col", "orientation", "re", "im"], rows)

    wrows = []
    for r in range(1, rows_n):
        for c in range(1, cols_n - 1):
            w = 1 if (r, c) == (1, 2) else 0
            wrows.append((r, c, w, 1))
    write("winding.csv", ["row", "col", "winding", "defined"], wrows)


def m_vs_s():
    rows = []
    s = np.linspace(0.20, 0.30, 11)
    for src, shift, width in ((0, 0.255, 0.02), (1, 0.26, 0.022)):
        m = 0.15 + 0.4 * np.exp(-((s - shift) ** 2) / (2 * width**2))
        err = 0.02 + 0.01 * (src == 0)
        for si, mi in zip(s, m):
            rows.append(
                (f"{si:.3f}", f"{mi:.5f}", f"{mi - err:.5f}", f"{mi + err:.5f}", src)
            )
    write("m_vs_s.csv", ["s", "m", "ci_lo", "ci_hi", "source"], rows)


def psi_samples():
    rng = np.random.default_rng(20180815)
    n = 4000
    theta = rng.uniform(0, 2 * np.pi, n)
    radius = rng.normal(0.62, 0.06, n)
    rows = [
        (f"{r * np.cos(t):.5f}", f"{r * np.sin(t):.5f}")
        for r, t in zip(radius, theta)
    ]
    write("psi_samples.csv", ["re", "im"], rows)


def correlations():
    x = np.arange(1, 10)
    for name, b, pref in (("corr_cold", 0.30, 0.85), ("corr_warm", 1.1, 0.7)):
        rows = [(int(xi), f"{pref * xi ** (-b):.6f}") for xi in x]
        write(f"{name}.csv", ["x", "C"], rows)
        write(
            f"{name}_fit.csv",
            ["b", "prefactor", "rms", "b_ci_lo", "b_ci_hi"],
            [[b, pref, 0.0, b - 0.03, b + 0.03]],
        )


def collapse_phase():
    rng = np.random.default_rng(7)
    rows = []
    for L in (6, 9, 12):
        log_u = np.linspace(-2.0, 3.0, 14)
        v = 1.0 / (1.0 + np.exp(log_u)) ** 0.25 + rng.normal(0, 0.004, 14)
        for u, vi in zip(log_u, v):
            rows.append((f"{u:.4f}", f"{vi:.5f}", L))
    write("collapse.csv", ["log_u", "v", "L"], rows)

    gammas = np.array([0.4, 0.7, 1.0, 1.2, 1.4, 1.6])
    t2 = 0.62 * np.sqrt(np.clip(1.0 - (gammas / 1.76) ** 2, 0, None)) + 0.02
    t1 = 0.55 * t2
    rows = [
        (f"{g:.2f}", f"{a:.4f}", f"{b:.4f}", 1.76)
        for g, a, b in zip(gammas, t1, t2)
    ]
    write("phase.csv", ["Gamma", "T1", "T2", "Gamma_c"], rows)


if __name__ == "__main__":
    field_and_winding()
    m_vs_s()
    psi_samples()
    correlations()
    collapse_phase()
    print("fixtures written to", HERE)
