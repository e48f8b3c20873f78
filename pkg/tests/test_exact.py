import numpy as np
import pytest

from ktsim.pimc import degeneracy_at, exact_diag
from ktsim.schedule import model_from_couplers


def test_single_spin_symmetry():
    for bG, beta in ((0.5, 1.0), (2.0, 3.0)):
        m = model_from_couplers(1, [], beta_Gamma=bG, beta=beta)
        res = exact_diag(m)
        assert abs(res.sz[0]) < 1e-12
        assert res.sx[0] == pytest.approx(np.tanh(bG))


def test_single_spin_closed_form():
    m = model_from_couplers(1, [], beta_Gamma=1.0, beta=1.0, beta_h=np.array([1.0]))
    res = exact_diag(m)
    E = np.sqrt(2.0)
    assert res.sz[0] == pytest.approx(-(1.0 / E) * np.tanh(E), abs=1e-12)
    assert res.sz[0] == pytest.approx(-0.6282, abs=5e-5)


def test_afm_pair_closed_form_classical():
    beta = 1.3
    m = model_from_couplers(2, [(0, 1, beta)], beta_Gamma=0.0, beta=beta)
    res = exact_diag(m)
    assert res.pair(0, 1) == pytest.approx(-np.tanh(beta), abs=1e-12)


def test_triangle_quasi_degeneracy():
    # J=1, Gamma=0.1, large beta: six low-lying states split at order Gamma,
    # separated from the magnetized doublet by a gap of order 4J
    beta = 30.0
    m = model_from_couplers(
        3,
        [(0, 1, beta), (1, 2, beta), (0, 2, beta)],
        beta_Gamma=0.1 * beta,
        beta=beta,
    )
    assert degeneracy_at(m, tol=0.5) == 6
    # classical case: exactly six degenerate ground states
    m0 = model_from_couplers(
        3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], beta_Gamma=0.0, beta=1.0
    )
    assert exact_diag(m0).degeneracy == 6


def test_size_limit():
    m = model_from_couplers(13, [], beta_Gamma=1.0)
    with pytest.raises(ValueError, match="12"):
        exact_diag(m)


def test_beta_consistency():
    """Same physics expressed at different beta conventions agrees."""
    m1 = model_from_couplers(2, [(0, 1, 2.0)], beta_Gamma=1.0, beta=1.0)
    m2 = model_from_couplers(2, [(0, 1, 2.0)], beta_Gamma=1.0, beta=2.0)
    r1, r2 = exact_diag(m1), exact_diag(m2)
    assert r1.pair(0, 1) == pytest.approx(r2.pair(0, 1), abs=1e-12)
    assert r1.sx[0] == pytest.approx(r2.sx[0], abs=1e-12)
