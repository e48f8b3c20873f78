import numpy as np
import pytest

from ktsim.lattice import build_lattice, clock_state
from ktsim.observables import sublattice_magnetization_hook
from ktsim.pimc import run_qmc
from ktsim.schedule import dimensionless_model


@pytest.fixture(scope="module")
def small_model():
    lat = build_lattice("square_octagonal", 2, "toroidal")
    return lat, dimensionless_model(lat, beta_J=1.0, beta_Gamma=1.0)


def test_thinning_budget_bookkeeping(small_model):
    lat, model = small_model
    hooks = {"m": sublattice_magnetization_hook(lat)}
    res = run_qmc(model, 100, seed=1, hooks=hooks, thin=1)
    assert len(res.sweep_indices) == 100
    res2 = run_qmc(model, 100, seed=1, hooks=hooks, thin=10, burn=20)
    assert len(res2.sweep_indices) == 8
    assert res2.sweep_indices[0] == 30


def test_same_seed_bit_identical(small_model):
    lat, model = small_model
    hooks = {"m": sublattice_magnetization_hook(lat)}
    r1 = run_qmc(model, 150, seed=77, hooks=hooks)
    r2 = run_qmc(model, 150, seed=77, hooks=hooks)
    assert np.array_equal(r1.data["m"], r2.data["m"])
    r3 = run_qmc(model, 150, seed=78, hooks=hooks)
    assert not np.array_equal(r1.data["m"], r3.data["m"])


def test_budget_must_be_positive(small_model):
    _, model = small_model
    with pytest.raises(ValueError):
        run_qmc(model, 0, seed=1)


def test_clock_vs_random_convergence():
    """Sublattice magnetizations agree between inits within 0.04 (L=3 torus,
    Gamma=1, T=0.5)."""
    lat = build_lattice("square_octagonal", 3, "toroidal")
    model = dimensionless_model(lat, beta_J=2.0, beta_Gamma=2.0, beta=2.0)
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    res_c = run_qmc(model, 30000, seed=101, init=clock_state(lat), hooks=hooks,
                    burn=4000, thin=4)
    res_r = run_qmc(model, 30000, seed=202, init="random", hooks=hooks,
                    burn=4000, thin=4)
    mc = np.abs(res_c.data["msub"][:, 0, :]).mean(axis=0)
    mr = np.abs(res_r.data["msub"][:, 0, :]).mean(axis=0)
    assert np.max(np.abs(mc - mr)) < 0.04
