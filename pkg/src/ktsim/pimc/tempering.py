"""Parallel tempering over a ladder of TFIM models.

Replicas exchange configurations, never models: slot k always holds the k-th
model of the ladder, and configurations move between slots by uniform time
rescaling tau -> tau * beta'/beta.  The swap acceptance follows from the
worldline weight Gamma^n * exp(-S): a configuration with n kinks and diagonal
action S rescaled from beta to beta' acquires weight
Gamma'^n (beta'/beta)^n exp(-S beta'/beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..schedule import TFIMModel
from .worldlines import WorldlineConfiguration

MODE_FIXED_GAMMA = "fixed_Gamma"
MODE_FIXED_GAMMA_OVER_T = "fixed_Gamma_over_T"


@dataclass
class ReplicaLadder:
    models: list[TFIMModel]
    configs: list[WorldlineConfiguration]
    mode: str = MODE_FIXED_GAMMA
    replica_ids: np.ndarray = field(default=None)
    swap_attempts: np.ndarray = field(default=None)
    swap_accepts: np.ndarray = field(default=None)
    _parity: int = 0
    _last_end: np.ndarray = field(default=None)  # -1 unset, 0 cold end, 1 hot end
    round_trips: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.models)
        if n != len(self.configs):
            raise ValueError("one configuration per model required")
        betas = [m.beta for m in self.models]
        if not all(b1 < b2 for b1, b2 in zip(betas, betas[1:])) and not all(
            b1 > b2 for b1, b2 in zip(betas, betas[1:])
        ):
            raise ValueError("ladder must be monotone in temperature")
        ref = self.models[0]
        for m in self.models[1:]:
            if len(m.beta_J) != len(ref.beta_J):
                raise ValueError("ladder models must share the coupler set")
            if not np.allclose(m.J, ref.J) or not np.allclose(m.h, ref.h):
                raise ValueError(
                    "ladder models must share couplings and fields per unit time"
                )
        if self.mode == MODE_FIXED_GAMMA_OVER_T:
            bg = [m.beta_Gamma for m in self.models]
            if not np.allclose(bg, bg[0]):
                raise ValueError("fixed_Gamma_over_T requires constant beta*Gamma")
        elif self.mode == MODE_FIXED_GAMMA:
            g = [m.Gamma for m in self.models]
            if not np.allclose(g, g[0]):
                raise ValueError("fixed_Gamma requires constant Gamma")
        else:
            raise ValueError(f"unknown ladder mode {self.mode!r}")
        for m, c in zip(self.models, self.configs):
            if not math.isclose(m.beta, c.beta, rel_tol=1e-12):
                raise ValueError("each configuration must live at its model's beta")
        if self.replica_ids is None:
            self.replica_ids = np.arange(n)
        if self.swap_attempts is None:
            self.swap_attempts = np.zeros(n - 1 if n > 1 else 0, dtype=np.int64)
            self.swap_accepts = np.zeros(n - 1 if n > 1 else 0, dtype=np.int64)
        if self._last_end is None:
            self._last_end = np.full(n, -1, dtype=np.int64)
            self.round_trips = np.zeros(n, dtype=np.int64)
            self._update_round_trips()

    @property
    def n_replicas(self) -> int:
        return len(self.models)

    def _update_round_trips(self):
        n = self.n_replicas
        for slot in (0, n - 1):
            rid = int(self.replica_ids[slot])
            end = 0 if slot == 0 else 1
            if self._last_end[rid] not in (-1, end):
                self.round_trips[rid] += 1
            self._last_end[rid] = end

    def swap_rate(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(
                self.swap_attempts > 0, self.swap_accepts / self.swap_attempts, np.nan
            )


def log_swap_ratio(
    config_a: WorldlineConfiguration,
    model_a: TFIMModel,
    config_b: WorldlineConfiguration,
    model_b: TFIMModel,
) -> float:
    """Log Metropolis ratio for exchanging two configurations between models."""
    n_a, n_b = config_a.n_kinks, config_b.n_kinks
    beta_a, beta_b = model_a.beta, model_b.beta
    gb_a = model_a.beta_Gamma
    gb_b = model_b.beta_Gamma
    kink_term = 0.0
    if n_a != n_b:
        if gb_a <= 0.0 or gb_b <= 0.0:
            return -np.inf if (n_a or n_b) else 0.0
        # Gamma' beta' / (Gamma beta) reduces to the beta_Gamma ratio
        kink_term = (n_a - n_b) * (math.log(gb_b) - math.log(gb_a))
    action_term = -config_a.S * (beta_b / beta_a - 1.0) - config_b.S * (
        beta_a / beta_b - 1.0
    )
    return kink_term + action_term


def pt_step(ladder: ReplicaLadder, rng: np.random.Generator) -> ReplicaLadder:
    """Propose swaps on alternating even/odd adjacent pairs."""
    n = ladder.n_replicas
    if n < 2:
        raise ValueError("parallel tempering needs at least two replicas")
    start = ladder._parity
    ladder._parity = 1 - ladder._parity
    for k in range(start, n - 1, 2):
        ma, mb = ladder.models[k], ladder.models[k + 1]
        ca, cb = ladder.configs[k], ladder.configs[k + 1]
        ladder.swap_attempts[k] += 1
        ln_ratio = log_swap_ratio(ca, ma, cb, mb)
        if ln_ratio >= 0.0 or rng.random() < math.exp(ln_ratio):
            ca.rescale_time(mb.beta)
            cb.rescale_time(ma.beta)
            ladder.configs[k], ladder.configs[k + 1] = cb, ca
            ladder.replica_ids[[k, k + 1]] = ladder.replica_ids[[k + 1, k]]
            ladder.swap_accepts[k] += 1
    ladder._update_round_trips()
    return ladder


def geometric_betas(beta_min: float, beta_max: float, n: int) -> np.ndarray:
    """Geometric ladder spacing (the default when none is specified)."""
    return np.geomspace(beta_min, beta_max, n)
