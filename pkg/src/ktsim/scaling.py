"""Power-law fits, KT universal collapses, Binder crossing, phase diagram.

Collapse quality is measured by fitting a monotone reference curve (isotonic
least squares, interpreted piecewise-linearly) through the scaled points and
taking the variance-normalized mean squared deviation; the optimizer is a
restarted Nelder-Mead direct search.  The scaling variable 1/L * exp(a /
sqrt(t)) is handled in log space to avoid overflow near the transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize


@dataclass
class ScalingResult:
    kind: str
    params: dict
    cost: float | None = None
    rms: float | None = None
    ci: dict = field(default_factory=dict)
    converged: bool = True
    provenance: str = ""
    reference_curve: tuple | None = None  # (sorted log-u, fitted values)


class FitError(ValueError):
    """Raised when inputs cannot support the requested fit."""


def powerlaw_fit(x, y, fit_range: tuple[float, float] | None = None):
    """Least-squares line in log-log space; returns (b, prefactor, rms).

    Models y = prefactor * x^(-b); rms is the root-mean-square residual of
    log y.  Nonpositive y values inside the range are rejected (non-power-law
    regime).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if fit_range is not None:
        lo, hi = fit_range
        mask = (x >= lo) & (x <= hi)
        x, y = x[mask], y[mask]
    if len(x) < 3:
        raise FitError(f"power-law fit needs at least 3 points, got {len(x)}")
    if np.any(x <= 0):
        raise FitError("power-law fit needs positive distances")
    if np.any(y <= 0):
        raise FitError(
            "nonpositive values in fit range: not in a power-law regime"
        )
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(-slope), float(np.exp(intercept)), rms


def powerlaw_fit_ci(x, y, fit_range=None, B: int = 1000, level: float = 0.95, rng=None):
    """Bootstrap CI for the power-law exponent by resampling points."""
    if rng is None:
        rng = np.random.default_rng()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if fit_range is not None:
        lo, hi = fit_range
        mask = (x >= lo) & (x <= hi)
        x, y = x[mask], y[mask]
    n = len(x)
    bs = []
    for _ in range(B):
        idx = rng.integers(0, n, size=n)
        ux = x[idx]
        if len(np.unique(ux)) < 2:
            continue
        lx, ly = np.log(ux), np.log(y[idx])
        slope = np.polyfit(lx, ly, 1)[0]
        bs.append(-slope)
    lo_q = (1 - level) / 2
    return float(np.quantile(bs, lo_q)), float(np.quantile(bs, 1 - lo_q))


def finite_size_fit(sizes, m_values):
    """Power-law fit of <m> against L; the exponent plays the role of b/2."""
    sizes = np.asarray(sizes, dtype=np.float64)
    if len(sizes) < 3:
        raise FitError("finite-size fit needs at least 3 sizes")
    return powerlaw_fit(sizes, m_values)


def _isotonic_fit(values: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators: L2-optimal nondecreasing fit."""
    n = len(values)
    out = []
    for v in values:
        out.append([float(v), 1.0])
        while len(out) > 1 and out[-2][0] > out[-1][0]:
            v2, w2 = out.pop()
            v1, w1 = out.pop()
            out.append([(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2])
    fitted = np.empty(n)
    pos = 0
    for v, w in out:
        k = int(round(w))
        fitted[pos : pos + k] = v
        pos += k
    return fitted


def monotone_reference_cost(u: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
    """Deviation of (u, v) points from the best monotone curve v(u).

    Fits both orientations and keeps the better; the cost is the mean squared
    residual normalized by the variance of v, so it is invariant under affine
    rescaling of v and equals ~1 for structureless data.
    """
    order = np.argsort(u)
    vs = v[order]
    var = float(np.var(vs))
    if var <= 0:
        return 0.0, vs
    up = _isotonic_fit(vs)
    down = -_isotonic_fit(-vs)
    cost_up = float(np.mean((vs - up) ** 2))
    cost_down = float(np.mean((vs - down) ** 2))
    fitted = up if cost_up <= cost_down else down
    return min(cost_up, cost_down) / var, fitted


def _kt_scaled_points(L, T, y, Tc, a, exponent, transition):
    """Scaled coordinates (log u, log v) of the universal-collapse ansatz.

    Both axes live in log space: u = exp(a/sqrt(t))/L overflows otherwise,
    and log v keeps the cost meaningful when the scaled values span decades.
    """
    L = np.asarray(L, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0):
        raise FitError("collapse values must be positive")
    if transition == "lower":
        t = (Tc - T) / Tc
        log_v = np.log(y) + exponent * np.log(L)
    elif transition == "upper":
        t = (T - Tc) / Tc
        log_v = np.log(y) - exponent * np.log(L)
    else:
        raise FitError(f"transition must be 'lower' or 'upper', got {transition!r}")
    mask = t > 1e-9
    if np.sum(mask) < 5 or len(np.unique(L[mask])) < 2:
        return None, None
    log_u = -np.log(L[mask]) + a / np.sqrt(t[mask])
    return log_u, log_v[mask]


def kt_collapse(
    data,
    transition: str,
    initial: dict | None = None,
    fix_exponent: bool = False,
    n_restarts: int = 8,
    seed: int = 0,
) -> ScalingResult:
    """Fit (Tc, a, exponent) by minimizing the universal-collapse cost.

    `data` is an iterable of (L, T, value) with value = m_L for the lower
    transition or chi_L for the upper one.  Expected exponents are about
    1/18 (lower, on m_L L^b) and 7/4 (upper, on chi_L L^-c); they seed the
    optimizer and may be frozen with fix_exponent.
    """
    arr = np.asarray(list(data), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise FitError("collapse data must be rows of (L, T, value)")
    L, T, y = arr[:, 0], arr[:, 1], arr[:, 2]
    if len(np.unique(L)) < 3:
        raise FitError("collapse needs at least 3 system sizes")
    defaults = {
        "lower": {"Tc": float(np.max(T)) * 1.05, "a": 1.0, "exponent": 1.0 / 18.0},
        "upper": {"Tc": float(np.min(T)) * 0.95, "a": 1.0, "exponent": 7.0 / 4.0},
    }[transition]
    if initial:
        defaults.update(initial)

    T_lo, T_hi = float(np.min(T)), float(np.max(T))

    exp_seed = defaults["exponent"]

    def cost_of(params):
        Tc, a = params[0], params[1]
        exponent = exp_seed if fix_exponent else params[2]
        if a <= 0 or Tc <= 0:
            return 1e6
        if not fix_exponent and not (0.3 * exp_seed <= exponent <= 3.0 * exp_seed):
            return 1e6
        if transition == "lower" and not (T_lo < Tc <= 2.0 * T_hi):
            return 1e6
        if transition == "upper" and not (0.3 * T_lo <= Tc < T_hi):
            return 1e6
        log_u, v = _kt_scaled_points(L, T, y, Tc, a, exponent, transition)
        if log_u is None:
            return 1e6
        c, _ = monotone_reference_cost(log_u, v)
        return c

    rng = np.random.default_rng(seed)
    base = [defaults["Tc"], defaults["a"]] + ([] if fix_exponent else [defaults["exponent"]])
    best = None
    for restart in range(n_restarts):
        x0 = np.array(base, dtype=np.float64)
        if restart > 0:
            x0 = x0 * rng.uniform(0.7, 1.3, size=len(x0))
        res = minimize(cost_of, x0, method="Nelder-Mead",
                       options={"xatol": 1e-5, "fatol": 1e-10, "maxiter": 2000})
        if best is None or res.fun < best.fun:
            best = res
    params = {
        "Tc": float(best.x[0]),
        "a": float(best.x[1]),
        "exponent": defaults["exponent"] if fix_exponent else float(best.x[2]),
    }
    log_u, v = _kt_scaled_points(
        L, T, y, params["Tc"], params["a"], params["exponent"], transition
    )
    curve = None
    if log_u is not None:
        _, fitted = monotone_reference_cost(log_u, v)
        curve = (np.sort(log_u), fitted)
    return ScalingResult(
        kind=f"kt_collapse_{transition}",
        params=params,
        cost=float(best.fun),
        converged=bool(best.success and best.fun < 1e6),
        reference_curve=curve,
    )


def collapse_cost_at(data, transition, Tc, a, exponent) -> float:
    """Collapse cost at explicit parameters (for comparisons and tests)."""
    arr = np.asarray(list(data), dtype=np.float64)
    log_u, v = _kt_scaled_points(
        arr[:, 0], arr[:, 1], arr[:, 2], Tc, a, exponent, transition
    )
    if log_u is None:
        return math.inf
    c, _ = monotone_reference_cost(log_u, v)
    return c


def eta_method_transitions(data, eta_lower: float = 1.0 / 9.0, eta_upper: float = 0.25):
    """Transition temperatures from the finite-size decay exponent of <m>.

    For each temperature with at least three sizes, fits m_L ~ L^(-b) and
    interpolates b(T); the lower/upper KT temperatures are where b crosses
    eta/2 for the universal exponents.  Returns a ScalingResult with the
    exponent curve attached.
    """
    arr = np.asarray(list(data), dtype=np.float64)
    by_T: dict[float, list] = {}
    for L, T, m in arr:
        by_T.setdefault(round(float(T), 12), []).append((L, m))
    temps, exps = [], []
    for T in sorted(by_T):
        pts = by_T[T]
        if len(pts) < 3:
            continue
        Ls = np.array([p[0] for p in pts])
        ms = np.array([p[1] for p in pts])
        b, _, _ = powerlaw_fit(Ls, ms)
        temps.append(T)
        exps.append(b)
    temps = np.array(temps)
    exps = np.array(exps)
    if len(temps) < 2:
        raise FitError("eta method needs exponents at >= 2 temperatures")

    def crossing(target):
        for k in range(len(temps) - 1):
            lo, hi = exps[k], exps[k + 1]
            if (lo - target) * (hi - target) <= 0 and lo != hi:
                frac = (target - lo) / (hi - lo)
                return float(temps[k] + frac * (temps[k + 1] - temps[k]))
        return math.nan

    return ScalingResult(
        kind="eta_method",
        params={"T1": crossing(eta_lower / 2.0), "T2": crossing(eta_upper / 2.0)},
        reference_curve=(temps, exps),
    )


def binder_crossing(curves: dict, bootstrap_curves: dict | None = None) -> ScalingResult:
    """Crossing point of Binder-cumulant curves across sizes.

    `curves` maps L -> (gamma_grid, U_values); curves are interpolated with
    monotone piecewise-cubic Hermite polynomials (no overshoot on steep
    drops) and all pairwise crossings inside the common range are averaged.
    `bootstrap_curves` (L -> (B, n) array of resampled U values) yields a
    percentile CI over crossing replicas.
    """
    sizes = sorted(curves)
    if len(sizes) < 2:
        raise FitError("binder crossing needs at least two sizes")

    def crossings(curve_values: dict) -> list[float]:
        found = []
        for ai in range(len(sizes)):
            for bi in range(ai + 1, len(sizes)):
                La, Lb = sizes[ai], sizes[bi]
                ga, Ua = np.asarray(curves[La][0]), np.asarray(curve_values[La])
                gb, Ub = np.asarray(curves[Lb][0]), np.asarray(curve_values[Lb])
                lo = max(ga.min(), gb.min())
                hi = min(ga.max(), gb.max())
                if hi <= lo:
                    continue
                sa = PchipInterpolator(ga, Ua)
                sb = PchipInterpolator(gb, Ub)
                grid = np.linspace(lo, hi, 512)
                diff = sa(grid) - sb(grid)
                sign = np.sign(diff)
                flips = np.flatnonzero(np.diff(sign) != 0)
                for k in flips:
                    try:
                        root = brentq(lambda g: sa(g) - sb(g), grid[k], grid[k + 1])
                        found.append(root)
                    except ValueError:
                        continue
        return found

    points = crossings({L: curves[L][1] for L in sizes})
    if not points:
        return ScalingResult(
            kind="binder_crossing",
            params={"Gamma_c": math.nan, "n_crossings": 0},
            converged=False,
            provenance="no crossing in range",
        )
    gamma_c = float(np.mean(points))
    ci = {}
    if bootstrap_curves is not None:
        B = min(len(v) for v in bootstrap_curves.values())
        reps = []
        for b in range(B):
            pts = crossings({L: bootstrap_curves[L][b] for L in sizes})
            if pts:
                reps.append(np.mean(pts))
        if len(reps) >= 10:
            ci["Gamma_c"] = (
                float(np.quantile(reps, 0.025)),
                float(np.quantile(reps, 0.975)),
            )
    return ScalingResult(
        kind="binder_crossing",
        params={"Gamma_c": gamma_c, "n_crossings": len(points)},
        ci=ci,
        converged=True,
    )


def binder_collapse(curves: dict, gamma_c: float, nu: float = 2.0 / 3.0) -> float:
    """Collapse cost of U against L^(1/nu) (Gamma - Gamma_c)/Gamma_c."""
    us, vs = [], []
    for L, (gammas, U) in curves.items():
        gammas = np.asarray(gammas, dtype=np.float64)
        U = np.asarray(U, dtype=np.float64)
        us.append(L ** (1.0 / nu) * (gammas - gamma_c) / gamma_c)
        vs.append(U)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    cost, _ = monotone_reference_cost(u, v)
    return cost


def assemble_phase_diagram(per_gamma: list[dict], qcp: float | None = None) -> list[dict]:
    """Merge per-Gamma transition estimates into a phase-diagram table."""
    if not per_gamma:
        raise FitError("phase diagram needs at least one per-Gamma result")
    rows = []
    for rec in sorted(per_gamma, key=lambda r: r["Gamma"]):
        row = {
            "Gamma": rec["Gamma"],
            "T1": rec.get("T1", math.nan),
            "T2": rec.get("T2", math.nan),
            "method_T1": rec.get("method_T1", ""),
            "method_T2": rec.get("method_T2", ""),
            "T1_ci_lo": rec.get("T1_ci", (math.nan, math.nan))[0],
            "T1_ci_hi": rec.get("T1_ci", (math.nan, math.nan))[1],
            "T2_ci_lo": rec.get("T2_ci", (math.nan, math.nan))[0],
            "T2_ci_hi": rec.get("T2_ci", (math.nan, math.nan))[1],
            "Gamma_c": qcp if qcp is not None else math.nan,
        }
        rows.append(row)
    return rows
