"""Configuration-driven experiment runner.

Subcommands: lattice, sample, analyze, quench, shim, phase-diagram.  All
outputs are CSV/JSON files; every sample run copies its fully resolved
configuration (seeds included) next to its outputs so results can be
reproduced by re-running the same command.  Exit codes: 0 success, 1 runtime
failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import lattice as lattice_mod
from .embedding import EmbeddingMap, embed_chimera, validate_embedding
from .estimators import bootstrap_ci, dual_init_estimate, reverse_anneal_sampler
from .lattice import build_lattice, clock_state, symmetry_classes
from .observables import (
    PSI_WEIGHTS,
    classical_energy,
    correlation_profile,
    order_parameter,
    pseudospin_field,
    snapshot_hook,
    sublattice_magnetization_hook,
    winding_chart,
    chart_to_rows,
    field_to_rows,
)
from .pimc import make_ladder, run_qmc
from .quench import QuenchTables, improving_moves, local_quench
from .scaling import (
    assemble_phase_diagram,
    binder_collapse,
    binder_crossing,
    finite_size_fit,
    kt_collapse,
    powerlaw_fit,
    powerlaw_fit_ci,
)
from .schedule import ScheduleTable, dimensionless_model, model_at
from .shim import KnobbedSampler, degeneracy_shim


class ConfigError(ValueError):
    pass


KIND_ALIASES = {
    "square-octagonal": "square_octagonal",
    "square_octagonal": "square_octagonal",
    "triangular": "triangular",
}
BOUNDARY_ALIASES = {
    "cylinder": "cylindrical",
    "cylindrical": "cylindrical",
    "torus": "toroidal",
    "toroidal": "toroidal",
}


def _require_keys(doc: dict, allowed: set, context: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown config key(s) in {context}: {sorted(unknown)}")


def _load_lattice_spec(doc: dict):
    _require_keys(doc, {"kind", "L", "boundary"}, "lattice")
    kind = KIND_ALIASES.get(doc.get("kind", ""), None)
    boundary = BOUNDARY_ALIASES.get(doc.get("boundary", ""), None)
    if kind is None or boundary is None:
        raise ConfigError(f"bad lattice spec {doc}")
    return build_lattice(kind, int(doc["L"]), boundary)


def bundled_schedule_path() -> Path:
    return Path(resources.files("ktsim").joinpath("data/synthetic_schedule.csv"))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        bad = next(
            i + 2 for i, r in enumerate(rows[1:])
            if any(not _is_float(v) for v in r)
        )
        raise ConfigError(f"{path}: malformed row {bad}: {exc}") from exc
    return header, data


def _is_float(v):
    try:
        float(v)
        return True
    except ValueError:
        return False


def _read_snapshots(path):
    header, data = _read_csv(path)
    spins = data.astype(np.int8)
    if not np.all(np.abs(spins) == 1):
        raise ConfigError(f"{path}: snapshots must be ±1")
    return spins


# ---------------------------------------------------------------- lattice --


def cmd_lattice(args) -> int:
    kind = KIND_ALIASES.get(args.kind)
    boundary = BOUNDARY_ALIASES.get(args.boundary)
    if kind is None:
        raise ConfigError(f"unknown kind {args.kind!r}")
    if boundary is None:
        raise ConfigError(f"unknown boundary {args.boundary!r}")
    lat = build_lattice(kind, args.L, boundary)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "lattice.json").write_text(lat.to_json())
    summary = f"sites={lat.num_sites} afm={lat.num_afm} fm={lat.num_fm} chains={lat.n_chains}"
    if boundary == "cylindrical":
        classes = symmetry_classes(lat)
        (out / "symmetry_classes.json").write_text(classes.to_json())
        summary += f" classes={classes.n_classes}"
    if args.embed:
        rows, cols = (int(v) for v in args.grid.split("x"))
        emap = embed_chimera(lat, (rows, cols))
        report = validate_embedding(emap, lat)
        if report:
            raise RuntimeError(f"internal embedding invalid: {report[:3]}")
        (out / "embedding.json").write_text(emap.to_json())
        summary += f" qubits={len(set(emap.site_to_qubit.tolist()))}"
    print(summary)
    return 0


# ----------------------------------------------------------------- sample --

SAMPLE_KEYS = {"lattice", "schedule", "grid", "engine", "estimator", "output"}
ENGINE_KEYS = {
    "sweeps", "thin", "burn", "chain_cadence", "seed", "ladder_mode", "snapshots",
}
ESTIMATOR_KEYS = {
    "mode", "chain_len", "burn", "n_chains", "evolution_sweeps", "quench",
    "bootstrap_B", "statistic", "seed",
}
POINT_KEYS = {"beta_J", "beta_Gamma", "s", "T_mK", "label"}


def _resolve_models(cfg, lat):
    schedule = None
    if cfg.get("schedule"):
        schedule = ScheduleTable.from_csv(cfg["schedule"])
    models, labels = [], []
    for k, point in enumerate(cfg["grid"]):
        _require_keys(point, POINT_KEYS, f"grid[{k}]")
        if "s" in point:
            if schedule is None:
                raise ConfigError("grid point uses s/T_mK but no schedule file given")
            m = model_at(lat, schedule, float(point["s"]), float(point["T_mK"]))
            label = point.get("label", f"s{point['s']}_T{point['T_mK']}")
        else:
            bj, bg = float(point["beta_J"]), float(point["beta_Gamma"])
            m = dimensionless_model(lat, beta_J=bj, beta_Gamma=bg, beta=bj if bj > 0 else 1.0)
            label = point.get("label", f"bJ{bj}_bG{bg}")
        models.append(m)
        labels.append(str(label))
    return models, labels


def _run_engine_point(cfg, lat, model, label, seed, outdir):
    eng = cfg["engine"]
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    n_snap = int(eng.get("snapshots", 0))
    if n_snap:
        hooks["snap"] = snapshot_hook(0.0)
    res = run_qmc(
        model,
        int(eng["sweeps"]),
        seed=seed,
        init=clock_state(lat),
        thin=int(eng.get("thin", 1)),
        burn=int(eng.get("burn", 0)),
        hooks=hooks,
        chain_cadence=int(eng.get("chain_cadence", 2)),
    )
    msub = res.data["msub"][:, 0, :]
    m = np.abs(msub @ PSI_WEIGHTS)
    rows = [
        (int(s), *[f"{v:.9g}" for v in triple], f"{mv:.9g}")
        for s, triple, mv in zip(res.sweep_indices, msub, m)
    ]
    _write_csv(
        outdir / f"measurements_{label}.csv",
        ["sweep", "m1", "m2", "m3", "m"],
        rows,
    )
    if n_snap:
        snaps = res.data["snap"][:, 0, :].astype(int)[-n_snap:]
        _write_csv(
            outdir / f"snapshots_{label}.csv",
            [f"site_{i}" for i in range(lat.num_sites)],
            snaps.tolist(),
        )
        (outdir / f"snapshots_{label}.json").write_text(
            json.dumps(
                {
                    "seed": seed,
                    "label": label,
                    "beta": model.beta,
                    "beta_Gamma": model.beta_Gamma,
                    "sweeps": res.sweep_indices[-n_snap:].tolist(),
                    "tau": 0.0,
                },
                indent=1,
            )
        )
    return str(outdir / f"measurements_{label}.csv")


def _run_qemc_point(cfg, lat, model, label, seed, outdir):
    est = cfg["estimator"]
    sampler = reverse_anneal_sampler(
        model,
        sweeps=int(est.get("evolution_sweeps", 1000)),
        quench=bool(est.get("quench", False)),
    )
    rng = np.random.default_rng(np.random.SeedSequence([seed, 77]))
    stat_name = est.get("statistic", "m")
    if stat_name != "m":
        raise ConfigError(f"unknown estimator statistic {stat_name!r}")

    def statistic(state):
        return order_parameter(state, lat).m

    report = dual_init_estimate(
        sampler,
        lat,
        statistic,
        rng,
        n_chains=int(est.get("n_chains", 2)),
        chain_len=int(est.get("chain_len", 50)),
        burn=int(est.get("burn", 25)),
        statistic_name=stat_name,
        bootstrap_B=int(est.get("bootstrap_B", 1000)),
    )
    (outdir / f"estimate_{label}.json").write_text(report.to_json())
    for k, chain in enumerate(report.chains):
        rows = [
            (step, f"{row[stat_name]:.9g}") for step, row in enumerate(chain.trace)
        ]
        _write_csv(
            outdir / f"trace_{label}_{chain.init_name}{k}.csv",
            ["step", stat_name],
            rows,
        )
    return str(outdir / f"estimate_{label}.json")


def _sample_one(packed):
    cfg, point_idx, seed = packed
    lat = _load_lattice_spec(cfg["lattice"])
    models, labels = _resolve_models(cfg, lat)
    model, label = models[point_idx], labels[point_idx]
    outdir = Path(cfg["output"])
    if cfg.get("estimator"):
        return _run_qemc_point(cfg, lat, model, label, seed, outdir)
    return _run_engine_point(cfg, lat, model, label, seed, outdir)


def cmd_sample(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    _require_keys(cfg, SAMPLE_KEYS, "config")
    if "engine" not in cfg:
        raise ConfigError("config requires an 'engine' section")
    _require_keys(cfg["engine"], ENGINE_KEYS, "engine")
    if cfg.get("estimator"):
        _require_keys(cfg["estimator"], ESTIMATOR_KEYS, "estimator")
    if "seed" not in cfg["engine"]:
        raise ConfigError("engine.seed is required (no ambient entropy)")
    if args.output:
        cfg["output"] = args.output
    outdir = Path(cfg["output"])
    outdir.mkdir(parents=True, exist_ok=True)
    if cfg.get("schedule") and not os.path.exists(cfg["schedule"]):
        raise ConfigError(f"schedule file not found: {cfg['schedule']}")

    marker = outdir / ".partial"
    marker.write_text("run in progress or interrupted\n")
    resolved = dict(cfg)
    # per-point seeds derived from the master seed; recorded for reproduction
    base_seed = int(cfg["engine"]["seed"])
    resolved["resolved_seeds"] = {
        str(i): base_seed * 100003 + i for i in range(len(cfg["grid"]))
    }
    config_copy = outdir / "config.json"
    config_copy.write_text(json.dumps(resolved, indent=1))
    os.chmod(config_copy, 0o444)

    jobs = [
        (cfg, i, resolved["resolved_seeds"][str(i)]) for i in range(len(cfg["grid"]))
    ]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            outputs = list(pool.map(_sample_one, jobs))
    else:
        outputs = [_sample_one(j) for j in jobs]
    for path in outputs:
        print(path)
    marker.unlink()
    return 0


# ---------------------------------------------------------------- analyze --


def cmd_analyze(args) -> int:
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.what == "correlation":
        lat = lattice_mod.Lattice.from_json(Path(args.lattice).read_text())
        spins = _read_snapshots(args.snapshots)
        fields = [pseudospin_field(s.astype(float), lat) for s in spins]
        prof = correlation_profile(fields, lat)
        _write_csv(out, ["x", "C"], list(zip(prof.x.tolist(), prof.C.tolist())))
        print(f"{out}: C(x) over x=0..{prof.x[-1]} from {prof.n_samples} snapshots")
    elif args.what == "powerlaw":
        header, data = _read_csv(args.input)
        fit_range = tuple(float(v) for v in args.range.split(":"))
        x, y = data[:, 0], data[:, 1]
        b, pref, rms = powerlaw_fit(x, y, fit_range)
        rng = np.random.default_rng(args.seed)
        ci = powerlaw_fit_ci(x, y, fit_range, B=args.bootstrap, rng=rng)
        _write_csv(
            out,
            ["b", "prefactor", "rms", "b_ci_lo", "b_ci_hi"],
            [[f"{v:.9g}" for v in (b, pref, rms, ci[0], ci[1])]],
        )
        print(f"{out}: b={b:.4f} ci=({ci[0]:.4f},{ci[1]:.4f}) rms={rms:.4g}")
    elif args.what == "binder":
        header, data = _read_csv(args.input)
        cols = {name: k for k, name in enumerate(header)}
        for need in ("L", "Gamma", "U"):
            if need not in cols:
                raise ConfigError(f"{args.input}: missing column {need!r}")
        curves = {}
        for L in np.unique(data[:, cols["L"]]):
            sel = data[data[:, cols["L"]] == L]
            order = np.argsort(sel[:, cols["Gamma"]])
            curves[int(L)] = (
                sel[order, cols["Gamma"]],
                sel[order, cols["U"]],
            )
        result = binder_crossing(curves)
        gamma_c = result.params["Gamma_c"]
        cost = binder_collapse(curves, gamma_c) if result.converged else float("nan")
        doc = {
            "Gamma_c": gamma_c,
            "n_crossings": result.params["n_crossings"],
            "converged": result.converged,
            "collapse_cost_nu_2_3": cost,
        }
        Path(out).write_text(json.dumps(doc, indent=1))
        print(f"{out}: Gamma_c={gamma_c:.4f} crossings={result.params['n_crossings']}")
    elif args.what == "collapse":
        header, data = _read_csv(args.input)
        cols = {name: k for k, name in enumerate(header)}
        value_col = "m" if args.transition == "lower" else "chi"
        for need in ("L", "T", value_col):
            if need not in cols:
                raise ConfigError(f"{args.input}: missing column {need!r}")
        rows = [
            (r[cols["L"]], r[cols["T"]], r[cols[value_col]]) for r in data
        ]
        res = kt_collapse(rows, args.transition, fix_exponent=args.fix_exponent)
        doc = {"transition": args.transition, **res.params, "cost": res.cost,
               "converged": res.converged}
        Path(out).write_text(json.dumps(doc, indent=1))
        print(f"{out}: Tc={res.params['Tc']:.4f} cost={res.cost:.4g}")
    elif args.what == "finite-size":
        header, data = _read_csv(args.input)
        b, pref, rms = finite_size_fit(data[:, 0], data[:, 1])
        _write_csv(out, ["exponent", "prefactor", "rms"],
                   [[f"{b:.9g}", f"{pref:.9g}", f"{rms:.9g}"]])
        print(f"{out}: exponent={b:.4f} rms={rms:.4g}")
    elif args.what == "field":
        lat = lattice_mod.Lattice.from_json(Path(args.lattice).read_text())
        spins = _read_snapshots(args.snapshots)
        if not (0 <= args.index < len(spins)):
            raise ConfigError(
                f"snapshot index {args.index} out of range 0..{len(spins) - 1}"
            )
        field = pseudospin_field(spins[args.index].astype(float), lat)
        _write_csv(
            out,
            ["row", "col", "orientation", "re", "im"],
            [[r, c, o, f"{re:.9g}", f"{im:.9g}"]
             for r, c, o, re, im in field_to_rows(field, lat)],
        )
        chart = winding_chart(field, lat)
        winding_out = Path(args.winding_output or str(out).replace(".csv", "_winding.csv"))
        _write_csv(
            winding_out,
            ["row", "col", "winding", "defined"],
            chart_to_rows(chart, lat),
        )
        print(
            f"{out}: field of snapshot {args.index}; {winding_out}: "
            f"{chart.n_vortices} vortices, {chart.n_antivortices} antivortices"
        )
    else:  # pragma: no cover
        raise ConfigError(f"unknown analysis {args.what!r}")
    return 0


# ------------------------------------------------------------ quench/shim --


def cmd_quench(args) -> int:
    lat = lattice_mod.Lattice.from_json(Path(args.lattice).read_text())
    spins = _read_snapshots(args.snapshots)
    tables = QuenchTables(lat)
    rng = np.random.default_rng(args.seed)
    rows = []
    improving_after = 0
    for s in spins:
        e0 = classical_energy(s, lat)
        m0 = order_parameter(s, lat).m
        q = local_quench(s, lat, rng, tables)
        e1 = classical_energy(q.values, lat)
        m1 = order_parameter(q.values, lat).m
        improving_after += len(improving_moves(q.values, lat, tables))
        rows.append([f"{v:.9g}" for v in (e0, e1, m0, m1)])
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, ["energy_before", "energy_after", "m_before", "m_after"], rows)
    arr = np.array(rows, dtype=float)
    print(
        f"{out}: dE={arr[:,1].mean()-arr[:,0].mean():+.5f} "
        f"d|psi|={arr[:,3].mean()-arr[:,2].mean():+.5f} "
        f"residual_improving_moves={improving_after}"
    )
    return 0


class _QMCShimSampler(KnobbedSampler):
    """QMC-backed sampler whose offsets/scales perturb the model."""

    def __init__(self, lat, beta_J, beta_Gamma, beta, sweeps, thin, bias=None,
                 coupler_disorder=None):
        self.lat = lat
        self.beta_J = beta_J
        self.beta_Gamma = beta_Gamma
        self.beta = beta
        self.sweeps = sweeps
        self.thin = thin
        self.bias = np.zeros(lat.num_sites) if bias is None else bias
        self.disorder = (
            np.ones(lat.num_couplers) if coupler_disorder is None else coupler_disorder
        )

    def draw(self, offsets, coupler_scale, n_samples, rng):
        ci, cj, strength = self.lat.coupler_arrays()
        model = dimensionless_model(
            self.lat,
            beta_J=1.0,
            beta_Gamma=self.beta_Gamma,
            beta=self.beta,
            beta_h=self.bias + offsets,
        )
        model.beta_J = strength * self.beta_J * self.disorder * coupler_scale
        hooks = {"snap": snapshot_hook(0.0)}
        burn = max(1, self.sweeps // 5)
        res = run_qmc(
            model,
            self.sweeps,
            seed=int(rng.integers(1 << 31)),
            init=clock_state(self.lat),
            hooks=hooks,
            burn=burn,
            thin=self.thin,
        )
        snaps = res.data["snap"][:, 0, :]
        if len(snaps) < n_samples:
            raise RuntimeError("shim sampler produced too few samples")
        return snaps[-n_samples:]


SHIM_KEYS = {"lattice", "beta_J", "beta_Gamma", "beta", "rounds", "step",
             "samples_per_round", "sweeps", "thin", "seed", "output"}


def cmd_shim(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    _require_keys(cfg, SHIM_KEYS, "shim config")
    lat = _load_lattice_spec(cfg["lattice"])
    classes = symmetry_classes(lat)
    thin = int(cfg.get("thin", 8))
    n_per = int(cfg.get("samples_per_round", 128))
    sweeps = int(cfg.get("sweeps", n_per * thin * 5 // 4 + 1))
    usable = (sweeps - max(1, sweeps // 5)) // thin
    if usable < n_per:
        raise ConfigError(
            f"sweeps={sweeps} yields only {usable} thinned samples per round "
            f"(need samples_per_round={n_per}); raise sweeps or lower thin"
        )
    sampler = _QMCShimSampler(
        lat,
        float(cfg.get("beta_J", 1.0)),
        float(cfg.get("beta_Gamma", 1.0)),
        float(cfg.get("beta", 1.0)),
        sweeps,
        thin,
    )
    rng = np.random.default_rng(int(cfg["seed"]))
    report = degeneracy_shim(
        sampler,
        lat,
        classes,
        rng,
        rounds=int(cfg.get("rounds", 8)),
        step=float(cfg.get("step", 0.5)),
        samples_per_round=n_per,
    )
    out = Path(cfg["output"])
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps(
            {
                "offsets": report.offsets.tolist(),
                "coupler_scale": report.coupler_scale.tolist(),
                "max_abs_magnetization": report.max_abs_magnetization,
                "class_spread": report.class_spread,
                "converged": report.converged,
                "warning": report.warning,
            },
            indent=1,
        )
    )
    print(
        f"{out}: |m|max {report.max_abs_magnetization[0]:.4f} -> "
        f"{report.max_abs_magnetization[-1]:.4f}"
    )
    return 0


def cmd_phase_diagram(args) -> int:
    per_gamma = []
    qcp = None
    for path in args.inputs:
        with open(path) as fh:
            doc = json.load(fh)
        if "Gamma_c" in doc and "Gamma" not in doc:
            qcp = doc["Gamma_c"]
        else:
            per_gamma.append(doc)
    rows = assemble_phase_diagram(per_gamma, qcp=qcp)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    header = list(rows[0])
    _write_csv(out, header, [[row[k] for k in header] for row in rows])
    print(f"{out}: {len(rows)} Gamma rows, QCP={qcp}")
    return 0


# ------------------------------------------------------------------ main --


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ktsim",
        description="Frustrated-TFIM simulation toolkit: lattices, QMC, scaling.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("lattice", help="build lattice/embedding files")
    pl.add_argument("--kind", required=True)
    pl.add_argument("-L", type=int, required=True)
    pl.add_argument("--boundary", required=True)
    pl.add_argument("--embed", action="store_true")
    pl.add_argument("--grid", default="16x16")
    pl.add_argument("-o", "--output", default=".")
    pl.set_defaults(func=cmd_lattice)

    ps = sub.add_parser("sample", help="run QMC or chained-estimator sampling")
    ps.add_argument("--config", required=True)
    ps.add_argument("-o", "--output", default=None)
    ps.add_argument("--workers", type=int, default=1)
    ps.set_defaults(func=cmd_sample)

    pa = sub.add_parser("analyze", help="correlations, fits, collapses, Binder")
    pa.add_argument("what", choices=["correlation", "powerlaw", "binder",
                                     "collapse", "finite-size", "field"])
    pa.add_argument("--input")
    pa.add_argument("--snapshots")
    pa.add_argument("--lattice")
    pa.add_argument("--range", default="1:5")
    pa.add_argument("--transition", choices=["upper", "lower"], default="upper")
    pa.add_argument("--fix-exponent", action="store_true")
    pa.add_argument("--bootstrap", type=int, default=1000)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--index", type=int, default=0)
    pa.add_argument("--winding-output", default=None)
    pa.add_argument("-o", "--output", required=True)
    pa.set_defaults(func=cmd_analyze)

    pq = sub.add_parser("quench", help="local classical quench of snapshots")
    pq.add_argument("--snapshots", required=True)
    pq.add_argument("--lattice", required=True)
    pq.add_argument("--seed", type=int, default=0)
    pq.add_argument("-o", "--output", required=True)
    pq.set_defaults(func=cmd_quench)

    ph = sub.add_parser("shim", help="degeneracy shim on a QMC sampler")
    ph.add_argument("--config", required=True)
    ph.set_defaults(func=cmd_shim)

    pp = sub.add_parser("phase-diagram", help="assemble per-Gamma results")
    pp.add_argument("inputs", nargs="+")
    pp.add_argument("-o", "--output", required=True)
    pp.set_defaults(func=cmd_phase_diagram)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
