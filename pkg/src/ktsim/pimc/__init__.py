"""Continuous-time path-integral quantum Monte Carlo for the TFIM."""

from .engine import RunResult, make_ladder, run_qmc
from .exact import ExactResult, degeneracy_at, exact_diag
from .tempering import (
    MODE_FIXED_GAMMA,
    MODE_FIXED_GAMMA_OVER_T,
    ReplicaLadder,
    geometric_betas,
    log_swap_ratio,
    pt_step,
)
from .worldlines import (
    ChainUpdater,
    SpinSample,
    WorldlineConfiguration,
    init_worldlines,
    project,
    sweep_chain,
    sweep_cluster,
)

__all__ = [
    "RunResult",
    "make_ladder",
    "run_qmc",
    "ExactResult",
    "degeneracy_at",
    "exact_diag",
    "MODE_FIXED_GAMMA",
    "MODE_FIXED_GAMMA_OVER_T",
    "ReplicaLadder",
    "geometric_betas",
    "log_swap_ratio",
    "pt_step",
    "ChainUpdater",
    "SpinSample",
    "WorldlineConfiguration",
    "init_worldlines",
    "project",
    "sweep_chain",
    "sweep_cluster",
]
