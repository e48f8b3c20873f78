import numpy as np
import pytest

from ktsim.lattice import build_lattice, clock_state
from ktsim.observables import classical_energy
from ktsim.pimc import (
    SpinSample,
    WorldlineConfiguration,
    init_worldlines,
    project,
    sweep_cluster,
)
from ktsim.schedule import dimensionless_model, model_from_couplers


def test_init_all_up_action():
    m = model_from_couplers(2, [(0, 1, 1.3)], beta_Gamma=0.7, beta=1.0)
    cfg = init_worldlines(m, np.array([1, 1]))
    assert cfg.n_kinks == 0
    assert np.isclose(cfg.S, 1.3)  # beta * sum J


def test_init_random_reproducible():
    m = model_from_couplers(5, [], beta_Gamma=1.0)
    c1 = init_worldlines(m, "random", np.random.default_rng(42))
    c2 = init_worldlines(m, "random", np.random.default_rng(42))
    assert np.array_equal(c1.spins0, c2.spins0)


def test_init_length_mismatch():
    m = model_from_couplers(3, [], beta_Gamma=1.0)
    with pytest.raises(ValueError, match="length"):
        init_worldlines(m, np.array([1, -1]))


def test_init_action_matches_classical_energy():
    lat = build_lattice("square_octagonal", 3, "toroidal")
    model = dimensionless_model(lat, beta_J=1.7, beta_Gamma=0.5, beta=1.7)
    s = clock_state(lat)
    cfg = init_worldlines(model, s)
    e_per_spin = classical_energy(s, lat)
    # S = beta * E_classical with E in the lattice's J units
    assert np.isclose(cfg.S, 1.7 * e_per_spin * lat.num_sites, rtol=1e-12)


def test_project_constant_and_kinked():
    m = model_from_couplers(2, [], beta_Gamma=1.0, beta=1.0)
    cfg = init_worldlines(m, np.array([1, -1]))
    for tau in (0.0, 0.3, 0.99):
        assert np.array_equal(project(cfg, tau).values, [1, -1])
    # inject a kink pair on site 0 at tau = 0.5, 0.9
    cfg.kink_t = np.array([0.5, 0.9])
    cfg.kink_off = np.array([0, 2, 2])
    assert project(cfg, 0.25).values[0] == 1
    assert project(cfg, 0.75).values[0] == -1
    assert project(cfg, 0.95).values[0] == 1
    with pytest.raises(ValueError, match="tau"):
        project(cfg, 1.0)


def test_kink_parity_and_action_cache_over_sweeps():
    m = model_from_couplers(
        3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], beta_Gamma=1.5, beta=1.0
    )
    rng = np.random.default_rng(3)
    cfg = init_worldlines(m, "random", rng)
    for _ in range(500):
        sweep_cluster(cfg, m, rng)
    cfg.validate(m)  # parity, sorted kinks, cached action within 1e-9


def test_spin_sample_validation():
    with pytest.raises(ValueError):
        SpinSample(values=np.array([1, 0, -1]))
    s = SpinSample(values=np.array([1, -1]), origin="test")
    assert len(s) == 2
