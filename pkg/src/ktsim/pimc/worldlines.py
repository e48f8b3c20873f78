"""Worldline configurations and the elementary Monte Carlo updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..schedule import TFIMModel
from . import kernels


@dataclass
class SpinSample:
    """A classical ±1 state with provenance."""

    values: np.ndarray
    origin: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)
        if not np.all(np.abs(self.values) == 1):
            raise ValueError("spin samples must be ±1")

    def __len__(self):
        return len(self.values)


class WorldlineConfiguration:
    """Per-site piecewise-constant ±1 trajectories on the circle [0, beta).

    Kinks are stored flattened (`kink_t`) with CSR offsets (`kink_off`); the
    cached diagonal action `S` is refreshed by the update wrappers.
    """

    def __init__(self, beta: float, spins0: np.ndarray, kink_t=None, kink_off=None):
        self.beta = float(beta)
        self.spins0 = np.asarray(spins0, dtype=np.int8)
        n = len(self.spins0)
        self.kink_t = (
            np.empty(0, dtype=np.float64) if kink_t is None else np.asarray(kink_t)
        )
        self.kink_off = (
            np.zeros(n + 1, dtype=np.int64) if kink_off is None else np.asarray(kink_off)
        )
        self.S = 0.0

    @property
    def num_sites(self) -> int:
        return len(self.spins0)

    @property
    def n_kinks(self) -> int:
        return len(self.kink_t)

    def kinks_of(self, i: int) -> np.ndarray:
        return self.kink_t[self.kink_off[i] : self.kink_off[i + 1]]

    def kink_counts(self) -> np.ndarray:
        return np.diff(self.kink_off)

    def copy(self) -> "WorldlineConfiguration":
        out = WorldlineConfiguration(
            self.beta, self.spins0.copy(), self.kink_t.copy(), self.kink_off.copy()
        )
        out.S = self.S
        return out

    def recompute_action(self, model: TFIMModel) -> float:
        return kernels.compute_action(
            self.spins0,
            self.kink_t,
            self.kink_off,
            model.coupler_i,
            model.coupler_j,
            model.J,
            model.h,
            self.beta,
        )

    def refresh_action(self, model: TFIMModel) -> None:
        self.S = self.recompute_action(model)

    def validate(self, model: TFIMModel | None = None, rtol: float = 1e-9) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        counts = self.kink_counts()
        assert np.all(counts % 2 == 0), "kink counts must be even (periodic time)"
        for i in range(self.num_sites):
            k = self.kinks_of(i)
            if len(k):
                assert np.all(np.diff(k) > 0), "kink times must be strictly increasing"
                assert k[0] >= 0.0 and k[-1] < self.beta, "kinks must lie in [0, beta)"
        if model is not None:
            S = self.recompute_action(model)
            scale = max(1.0, abs(S))
            assert abs(S - self.S) <= rtol * scale, (
                f"cached action {self.S} deviates from recomputed {S}"
            )

    def site_time_averages(self) -> np.ndarray:
        return kernels.site_time_averages(
            self.spins0, self.kink_t, self.kink_off, self.beta
        )

    def rescale_time(self, new_beta: float) -> None:
        """Uniformly rescale tau -> tau * new_beta / beta (used by tempering)."""
        factor = new_beta / self.beta
        self.kink_t = self.kink_t * factor
        self.S = self.S * factor
        self.beta = new_beta


def init_worldlines(model: TFIMModel, init, rng: np.random.Generator | None = None):
    """Kink-free configuration from a classical state or fresh random spins."""
    n = model.num_sites
    if isinstance(init, str):
        if init != "random":
            raise ValueError(f"unknown init mode {init!r}")
        if rng is None:
            raise ValueError("random init requires an rng")
        spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
    else:
        values = init.values if isinstance(init, SpinSample) else np.asarray(init)
        if len(values) != n:
            raise ValueError(
                f"init length {len(values)} does not match lattice size {n}"
            )
        if not np.all(np.abs(values) == 1):
            raise ValueError("init spins must be ±1")
        spins = values.astype(np.int8).copy()
    config = WorldlineConfiguration(model.beta, spins)
    config.refresh_action(model)
    return config


def project(config: WorldlineConfiguration, tau: float = 0.0) -> SpinSample:
    """Classical state sigma(tau); periodicity makes all slices equal in law."""
    if not (0.0 <= tau < config.beta):
        raise ValueError(f"tau={tau} outside [0, {config.beta})")
    values = kernels.project_spins(config.spins0, config.kink_t, config.kink_off, tau)
    return SpinSample(values=values, origin=f"projection tau={tau:g}")


def sweep_cluster(
    config: WorldlineConfiguration, model: TFIMModel, rng: np.random.Generator
) -> WorldlineConfiguration:
    """One full Swendsen-Wang cluster update (in place)."""
    seed = int(rng.integers(1 << 31))
    spins, kt, koff = kernels.cluster_sweep(
        config.spins0,
        config.kink_t,
        config.kink_off,
        model.coupler_i,
        model.coupler_j,
        model.J,
        model.h,
        model.Gamma,
        config.beta,
        seed,
    )
    config.spins0 = spins
    config.kink_t = kt
    config.kink_off = koff
    config.refresh_action(model)
    return config


class ChainUpdater:
    """Precomputed external-coupler table for whole-chain flips."""

    def __init__(self, model: TFIMModel):
        lattice = model.lattice
        if lattice is None or lattice.n_chains == 0:
            raise ValueError("chain updates require a lattice with FM chains")
        self.chains = lattice.chains.astype(np.int64)
        n_chains = len(self.chains)
        chain_of = np.full(model.num_sites, -1, dtype=np.int64)
        for q, sites in enumerate(self.chains):
            chain_of[sites] = q
        per_chain: list[list[tuple[int, int, float]]] = [[] for _ in range(n_chains)]
        J = model.J
        for e in range(len(model.coupler_i)):
            a, b = int(model.coupler_i[e]), int(model.coupler_j[e])
            qa, qb = chain_of[a], chain_of[b]
            if qa == qb:
                continue
            if qa >= 0:
                per_chain[qa].append((a, b, J[e]))
            if qb >= 0:
                per_chain[qb].append((b, a, J[e]))
        counts = np.array([len(v) for v in per_chain], dtype=np.int64)
        self.ext_off = np.concatenate([[0], np.cumsum(counts)])
        total = int(self.ext_off[-1])
        self.ext_in = np.empty(total, dtype=np.int64)
        self.ext_out = np.empty(total, dtype=np.int64)
        self.ext_J = np.empty(total, dtype=np.float64)
        w = 0
        for v in per_chain:
            for a, b, Jv in v:
                self.ext_in[w] = a
                self.ext_out[w] = b
                self.ext_J[w] = Jv
                w += 1

    def sweep(self, config: WorldlineConfiguration, model: TFIMModel, rng) -> tuple[float, int]:
        seed = int(rng.integers(1 << 31))
        dS, n_acc = kernels.chain_sweep(
            config.spins0,
            config.kink_t,
            config.kink_off,
            self.chains,
            self.ext_in,
            self.ext_out,
            self.ext_J,
            self.ext_off,
            model.h,
            config.beta,
            seed,
        )
        config.S += dS
        return dS, n_acc


def sweep_chain(
    config: WorldlineConfiguration,
    model: TFIMModel,
    rng: np.random.Generator,
    updater: ChainUpdater | None = None,
) -> WorldlineConfiguration:
    """Whole-worldline Metropolis flip attempt on every FM chain (in place)."""
    if updater is None:
        updater = ChainUpdater(model)
    updater.sweep(config, model, rng)
    return config
