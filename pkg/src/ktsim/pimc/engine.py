"""Sweep orchestration: cluster/chain cadence, tempering, measurement hooks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..schedule import TFIMModel
from .tempering import ReplicaLadder, pt_step
from .worldlines import (
    ChainUpdater,
    WorldlineConfiguration,
    init_worldlines,
    sweep_cluster,
)


@dataclass
class RunResult:
    """Measurement streams plus enough state to reproduce or continue."""

    data: dict[str, np.ndarray]  # hook name -> (n_emits, n_replicas, ...) values
    sweep_indices: np.ndarray
    models: list[TFIMModel]
    configs: list[WorldlineConfiguration]
    ladder: ReplicaLadder | None = None
    chain_sweeps_run: int = 0

    def column(self, name: str, replica: int = 0) -> np.ndarray:
        return self.data[name][:, replica]


def run_qmc(
    target,
    sweeps: int,
    *,
    seed: int,
    init="random",
    thin: int = 1,
    burn: int = 0,
    hooks: dict | None = None,
    chain_cadence: int = 2,
    pt_every: int = 1,
) -> RunResult:
    """Run the Monte Carlo engine for a model or a replica ladder.

    Every sweep is a cluster update; every `chain_cadence`-th sweep also runs
    the whole-chain update (when the lattice has chains).  With a ladder,
    tempering swaps run every `pt_every` sweeps.  Hooks fire after each sweep
    past `burn` at the thinning interval and must be pure functions
    (config, model) -> float or ndarray.  Fully reproducible from `seed`.
    """
    if sweeps <= 0:
        raise ValueError("sweep budget must be positive")
    hooks = hooks or {}

    if isinstance(target, ReplicaLadder):
        ladder = target
        models = ladder.models
        configs = ladder.configs
    else:
        ladder = None
        models = [target]
        configs = None

    seq = np.random.SeedSequence(seed)
    children = seq.spawn(len(models) + 1)
    pt_rng = np.random.default_rng(children[-1])
    rngs = [np.random.default_rng(c) for c in children[: len(models)]]

    if configs is None:
        configs = [init_worldlines(models[0], init, rngs[0])]

    has_chains = (
        models[0].lattice is not None and getattr(models[0].lattice, "n_chains", 0) > 0
    )
    updater = ChainUpdater(models[0]) if has_chains else None

    collected: dict[str, list] = {name: [] for name in hooks}
    emitted_sweeps: list[int] = []
    chain_sweeps_run = 0

    for sweep in range(1, sweeps + 1):
        for k, (model, config) in enumerate(zip(models, configs)):
            sweep_cluster(config, model, rngs[k])
            if has_chains and sweep % chain_cadence == 0:
                updater.sweep(config, model, rngs[k])
        if has_chains and sweeps and sweep % chain_cadence == 0:
            chain_sweeps_run += 1
        if ladder is not None and ladder.n_replicas > 1 and sweep % pt_every == 0:
            pt_step(ladder, pt_rng)
            configs = ladder.configs
        if sweep > burn and (sweep - burn) % thin == 0:
            emitted_sweeps.append(sweep)
            for name, fn in hooks.items():
                collected[name].append(
                    [np.asarray(fn(config, model), dtype=np.float64)
                     for model, config in zip(models, configs)]
                )

    data = {name: np.array(vals) for name, vals in collected.items()}
    return RunResult(
        data=data,
        sweep_indices=np.array(emitted_sweeps, dtype=np.int64),
        models=models,
        configs=configs,
        ladder=ladder,
        chain_sweeps_run=chain_sweeps_run,
    )


def make_ladder(models: list[TFIMModel], mode: str, seed: int, init="random"):
    """Ladder with per-model configurations initialized from `init`."""
    seq = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(c) for c in seq.spawn(len(models))]
    configs = [init_worldlines(m, init, r) for m, r in zip(models, rngs)]
    return ReplicaLadder(models=models, configs=configs, mode=mode)
