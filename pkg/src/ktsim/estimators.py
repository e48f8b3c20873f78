"""Chained-evolution sampling harness and statistical machinery.

A sampler is any callable (classical ±1 state, rng) -> classical ±1 state of
the same length, deterministic under a fixed rng stream.  The bundled
reverse-anneal emulator loads the state into kink-free worldlines, evolves at
the target model for a fixed sweep budget, projects at tau=0 and optionally
applies the local quench to emulate the fast pre-readout ramp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice, clock_state
from .pimc.engine import run_qmc
from .pimc.worldlines import (
    ChainUpdater,
    SpinSample,
    init_worldlines,
    project,
    sweep_cluster,
)
from .quench import QuenchTables, local_quench
from .schedule import TFIMModel


class ChainAbort(RuntimeError):
    """Sampler contract violation inside a chain, annotated with position."""


def reverse_anneal_sampler(
    model: TFIMModel,
    sweeps: int = 1000,
    chain_cadence: int = 2,
    quench: bool = False,
):
    """Sampler emulating one reverse-anneal evolution with a QMC dwell."""
    lattice = model.lattice
    has_chains = lattice is not None and getattr(lattice, "n_chains", 0) > 0
    updater = ChainUpdater(model) if has_chains else None
    tables = QuenchTables(lattice) if (quench and lattice is not None) else None

    def sampler(state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        config = init_worldlines(model, state)
        for sweep in range(1, sweeps + 1):
            sweep_cluster(config, model, rng)
            if updater is not None and sweep % chain_cadence == 0:
                updater.sweep(config, model, rng)
        out = project(config, 0.0).values
        if tables is not None:
            out = local_quench(out, lattice, rng, tables).values
        return out

    return sampler


@dataclass
class ChainResult:
    """Trace and post-burn-in statistics of one sampler chain."""

    trace: list  # per-step statistic values (full chain, length chain_len)
    samples: np.ndarray  # post-burn-in classical states, (kept, N)
    estimates: dict[str, float]
    init_name: str


@dataclass
class EstimateReport:
    statistic: str
    per_init: dict[str, dict]  # init -> {"estimate", "ci", "values"}
    pooled: float
    union_ci: tuple[float, float]
    deviation: float
    chains: list[ChainResult] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "statistic": self.statistic,
                "per_init": {
                    name: {
                        "estimate": rec["estimate"],
                        "ci": list(rec["ci"]),
                    }
                    for name, rec in self.per_init.items()
                },
                "pooled": self.pooled,
                "union_ci": list(self.union_ci),
                "deviation": self.deviation,
            },
            indent=1,
        )


def qemc_chain(
    sampler,
    init: np.ndarray,
    statistics: dict,
    rng: np.random.Generator,
    chain_len: int = 50,
    burn: int = 25,
    init_name: str = "explicit",
) -> ChainResult:
    """Run one chain of sequential sampler calls, each seeded by the last.

    Statistics are evaluated per retained sample (the final chain_len - burn
    states); the full per-step trace of every statistic is kept for
    diagnostics.
    """
    if not 0 <= burn < chain_len:
        raise ValueError(f"burn={burn} must satisfy 0 <= burn < chain_len={chain_len}")
    state = np.asarray(getattr(init, "values", init)).astype(np.int8)
    n = len(state)
    trace = []
    kept = []
    for step in range(chain_len):
        out = np.asarray(sampler(state, rng))
        if out.shape != state.shape:
            raise ChainAbort(
                f"sampler returned length {out.shape} at chain position {step}, "
                f"expected {state.shape}"
            )
        state = out.astype(np.int8)
        trace.append({name: fn(state) for name, fn in statistics.items()})
        if step >= burn:
            kept.append(state.copy())
    samples = np.array(kept, dtype=np.int8)
    estimates = {
        name: float(np.mean([row[name] for row in trace[burn:]]))
        for name in statistics
    }
    return ChainResult(trace=trace, samples=samples, estimates=estimates, init_name=init_name)


def bootstrap_ci(
    values,
    statistic=np.mean,
    B: int = 1000,
    level: float = 0.95,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval, deterministic under a seeded rng."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        raise ValueError("bootstrap needs at least two values")
    if rng is None:
        rng = np.random.default_rng()
    n = len(values)
    idx = rng.integers(0, n, size=(B, n))
    stats = np.array([statistic(values[row]) for row in idx])
    lo = (1.0 - level) / 2.0
    return (
        float(np.quantile(stats, lo)),
        float(np.quantile(stats, 1.0 - lo)),
    )


def batch_standard_error(values, n_batches: int = 32) -> float:
    """Standard error of the mean with autocorrelation absorbed by batching."""
    values = np.asarray(values, dtype=np.float64)
    nb = min(n_batches, max(2, len(values) // 4))
    usable = len(values) // nb * nb
    batches = values[:usable].reshape(nb, -1).mean(axis=1)
    return float(batches.std(ddof=1) / np.sqrt(nb))


def dual_init_estimate(
    sampler,
    lattice: Lattice,
    statistic,
    rng: np.random.Generator,
    n_chains: int = 4,
    chain_len: int = 50,
    burn: int = 25,
    statistic_name: str = "statistic",
    bootstrap_B: int = 1000,
) -> EstimateReport:
    """Independent chains from clock and random inits; union-interval report.

    The reported interval is the convex hull of the two per-init percentile
    bootstrap intervals; the deviation between the init estimates is recorded
    so drifting chains are visible.
    """
    if n_chains < 1:
        raise ValueError("need at least one chain per initialization")
    stats = {statistic_name: statistic}
    per_init = {}
    all_chains = []
    for init_name in ("clock", "random"):
        values = []
        for _ in range(n_chains):
            if init_name == "clock":
                init = clock_state(lattice)
            else:
                init = rng.choice(np.array([-1, 1], dtype=np.int8), size=lattice.num_sites)
            result = qemc_chain(
                sampler, init, stats, rng,
                chain_len=chain_len, burn=burn, init_name=init_name,
            )
            all_chains.append(result)
            values.extend(row[statistic_name] for row in result.trace[burn:])
        values = np.array(values)
        ci = bootstrap_ci(values, np.mean, B=bootstrap_B, rng=rng)
        per_init[init_name] = {
            "estimate": float(values.mean()),
            "ci": ci,
            "values": values,
        }
    est_c = per_init["clock"]["estimate"]
    est_r = per_init["random"]["estimate"]
    union = (
        min(per_init["clock"]["ci"][0], per_init["random"]["ci"][0]),
        max(per_init["clock"]["ci"][1], per_init["random"]["ci"][1]),
    )
    return EstimateReport(
        statistic=statistic_name,
        per_init=per_init,
        pooled=0.5 * (est_c + est_r),
        union_ci=union,
        deviation=abs(est_c - est_r),
        chains=all_chains,
    )
