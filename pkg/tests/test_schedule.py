import io

import numpy as np
import pytest

from ktsim.cli import bundled_schedule_path
from ktsim.lattice import build_lattice
from ktsim.schedule import (
    KB_GHZ_PER_MK,
    ScheduleError,
    ScheduleTable,
    model_at,
    dimensionless_model,
    schedule_lookup,
)


def small_table():
    return ScheduleTable(
        s=np.array([0.2, 0.3]),
        J_GHz=np.array([1.0, 2.0]),
        Gamma_GHz=np.array([4.0, 2.0]),
    )


def test_lookup_interpolates_linearly():
    assert schedule_lookup(small_table(), 0.25) == (1.5, 3.0)


def test_lookup_exact_knot():
    assert schedule_lookup(small_table(), 0.3) == (2.0, 2.0)


def test_lookup_out_of_range():
    with pytest.raises(ScheduleError, match="outside"):
        schedule_lookup(small_table(), 0.5)


def test_table_validation():
    with pytest.raises(ScheduleError, match="strictly increasing"):
        ScheduleTable(np.array([0.3, 0.2]), np.array([1.0, 2.0]), np.array([2.0, 1.0]))
    with pytest.raises(ScheduleError, match="nondecreasing"):
        ScheduleTable(np.array([0.2, 0.3]), np.array([2.0, 1.0]), np.array([2.0, 1.0]))
    with pytest.raises(ScheduleError, match="nonincreasing"):
        ScheduleTable(np.array([0.2, 0.3]), np.array([1.0, 2.0]), np.array([1.0, 2.0]))


def test_csv_round_trip_and_strictness():
    table = small_table()
    again = ScheduleTable.from_csv(io.StringIO(table.to_csv()))
    assert np.allclose(again.s, table.s)
    with pytest.raises(ScheduleError, match="header"):
        ScheduleTable.from_csv(io.StringIO("a,b,c\n1,2,3\n"))
    with pytest.raises(ScheduleError, match="non-numeric"):
        ScheduleTable.from_csv(io.StringIO("s,J_GHz,Gamma_GHz\n0.1,x,3\n0.2,1,2\n"))


def test_bundled_synthetic_schedule_parses():
    table = ScheduleTable.from_csv(str(bundled_schedule_path()))
    assert table.s[0] == 0.0 and table.s[-1] == 1.0


def test_model_at_unit_definition():
    # J = Gamma = kB * 1mK at T=1mK gives beta*J = beta*Gamma = 1
    table = ScheduleTable(
        s=np.array([0.0, 1.0]),
        J_GHz=np.array([KB_GHZ_PER_MK, KB_GHZ_PER_MK]),
        Gamma_GHz=np.array([KB_GHZ_PER_MK, KB_GHZ_PER_MK]),
    )
    lat = build_lattice("triangular", 3, "toroidal")
    m = model_at(lat, table, 0.5, 1.0)
    assert np.isclose(m.beta_Gamma, 1.0)
    assert np.isclose(np.abs(m.beta_J).max(), 1.0)


def test_doubling_temperature_halves_betas():
    table = small_table()
    lat = build_lattice("triangular", 3, "toroidal")
    m1 = model_at(lat, table, 0.25, 10.0)
    m2 = model_at(lat, table, 0.25, 20.0)
    assert np.allclose(m2.beta_J, m1.beta_J / 2)
    assert np.isclose(m2.beta_Gamma, m1.beta_Gamma / 2)


def test_scale_covariance():
    lat = build_lattice("triangular", 3, "toroidal")
    t1 = small_table()
    factor = 3.7
    t2 = ScheduleTable(t1.s, t1.J_GHz * factor, t1.Gamma_GHz * factor)
    m1 = model_at(lat, t1, 0.22, 8.4)
    m2 = model_at(lat, t2, 0.22, 8.4 * factor)
    assert np.allclose(m1.beta_J, m2.beta_J)
    assert np.isclose(m1.beta_Gamma, m2.beta_Gamma)


def test_dimensionless_passthrough():
    lat = build_lattice("square_octagonal", 2, "toroidal")
    m = dimensionless_model(lat, beta_J=1.7, beta_Gamma=0.9)
    assert m.beta == 1.0
    assert np.isclose(m.beta_Gamma, 0.9)
    afm = m.beta_J[lat.afm_slice]
    fm = m.beta_J[: lat.num_fm]
    assert np.allclose(afm, 1.7)
    assert np.allclose(fm, -1.8 * 1.7)


def test_nonpositive_temperature_rejected():
    lat = build_lattice("triangular", 3, "toroidal")
    with pytest.raises(ScheduleError, match="positive"):
        model_at(lat, small_table(), 0.25, 0.0)
