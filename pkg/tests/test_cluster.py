"""Cluster-update correctness against exact results on small systems.

The full oracle grid lives in the acceptance suite; these are fast spot
checks with fixed seeds.
"""

import numpy as np
import pytest

from ktsim.estimators import batch_standard_error
from ktsim.pimc import exact_diag, init_worldlines, sweep_cluster
from ktsim.pimc.kernels import pair_overlaps
from ktsim.schedule import model_from_couplers


def run_chain(model, sweeps, seed, pairs=(), burn_frac=0.1):
    rng = np.random.default_rng(seed)
    cfg = init_worldlines(model, "random", rng)
    sz, zz, kinks = [], [], []
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    for _ in range(sweeps):
        sweep_cluster(cfg, model, rng)
        sz.append(cfg.site_time_averages())
        kinks.append(cfg.n_kinks)
        if len(pairs):
            zz.append(
                pair_overlaps(cfg.spins0, cfg.kink_t, cfg.kink_off, pi, pj, cfg.beta)
                / cfg.beta
            )
    burn = int(sweeps * burn_frac)
    return (
        np.array(sz[burn:]),
        np.array(zz[burn:]) if len(pairs) else None,
        np.array(kinks[burn:]),
    )


def test_free_spin_symmetry_and_kink_density():
    bG = 1.2
    m = model_from_couplers(1, [], beta_Gamma=bG, beta=1.0)
    sz, _, kinks = run_chain(m, 20000, seed=3)
    se = batch_standard_error(sz[:, 0])
    assert abs(sz[:, 0].mean()) < 4 * se + 1e-3
    # n_mean = beta*Gamma*<sigma^x> = bG*tanh(bG) for the free spin
    expected = bG * np.tanh(bG)
    assert abs(kinks.mean() - expected) < 4 * batch_standard_error(kinks.astype(float))


def test_single_spin_longitudinal_field_closed_form():
    # h=1, Gamma=1, beta=1: <sz> = -(h/E) tanh(beta E), E = sqrt(2)
    m = model_from_couplers(1, [], beta_Gamma=1.0, beta=1.0, beta_h=np.array([1.0]))
    ref = -(1 / np.sqrt(2)) * np.tanh(np.sqrt(2))
    assert np.isclose(exact_diag(m).sz[0], ref, atol=1e-12)
    sz, _, _ = run_chain(m, 30000, seed=7)
    se = batch_standard_error(sz[:, 0])
    assert abs(sz[:, 0].mean() - ref) < 3 * se


def test_gamma_zero_classical_boltzmann():
    m = model_from_couplers(2, [(0, 1, 1.0)], beta_Gamma=0.0, beta=1.0)
    rng = np.random.default_rng(2)
    cfg = init_worldlines(m, "random", rng)
    prods = []
    for _ in range(20000):
        sweep_cluster(cfg, m, rng)
        assert cfg.n_kinks == 0  # no cuts are generated at Gamma=0
        prods.append(cfg.spins0[0] * cfg.spins0[1])
    prods = np.array(prods[2000:], dtype=float)
    exact = -np.tanh(1.0)  # 4-state enumeration
    assert abs(prods.mean() - exact) < 3 * batch_standard_error(prods)


@pytest.mark.parametrize("bJ,bG", [(0.5, 2.0), (2.0, 0.5)])
def test_afm_pair_matches_exact_diag(bJ, bG):
    m = model_from_couplers(2, [(0, 1, bJ)], beta_Gamma=bG, beta=1.0)
    ex = exact_diag(m)
    sz, zz, _ = run_chain(m, 20000, seed=11, pairs=[(0, 1)])
    se = batch_standard_error(zz[:, 0])
    assert abs(zz[:, 0].mean() - ex.pair(0, 1)) < 3.5 * se


def test_ghost_field_does_not_leak_without_h():
    # with h identically zero the ghost is disabled and <sz> stays symmetric
    m = model_from_couplers(2, [(0, 1, -1.0)], beta_Gamma=1.0, beta=1.0)
    sz, _, _ = run_chain(m, 15000, seed=5)
    assert abs(sz.mean()) < 0.05
