"""Calibrate the local-quench |psi| shift on near-critical L=12 cylinders."""
import json
import sys
import time

import numpy as np

sys.path.insert(0, "/root/pkg/src")
from ktsim.lattice import build_lattice, clock_state
from ktsim.schedule import dimensionless_model
from ktsim.pimc import run_qmc
from ktsim.observables import classical_energy, order_parameter, snapshot_hook
from ktsim.quench import QuenchTables, local_quench

L = 12
POINTS = [(1.0, 0.35), (1.0, 0.42), (1.0, 0.50), (0.7, 0.32), (0.7, 0.40)]

lat = build_lattice("square_octagonal", L, "cylindrical")
tables = QuenchTables(lat)
out = []
for G, T in POINTS:
    t0 = time.time()
    beta = 1.0 / T
    model = dimensionless_model(lat, beta_J=beta, beta_Gamma=G * beta, beta=beta)
    res = run_qmc(
        model, 4000, seed=int(1000 * G + 100 * T), init=clock_state(lat),
        hooks={"snap": snapshot_hook(0.0)}, burn=1500, thin=10,
    )
    snaps = res.data["snap"][:, 0, :].astype(np.int8)
    rng = np.random.default_rng(77)
    d_e, d_m = [], []
    for s in snaps:
        e0 = classical_energy(s, lat)
        m0 = order_parameter(s, lat).m
        q = local_quench(s, lat, rng, tables)
        d_e.append(classical_energy(q.values, lat) - e0)
        d_m.append(order_parameter(q.values, lat).m - m0)
    rec = {
        "Gamma": G,
        "T": T,
        "n_snaps": len(snaps),
        "dE_mean": float(np.mean(d_e)),
        "dm_mean": float(np.mean(d_m)),
        "dm_se": float(np.std(d_m) / np.sqrt(len(d_m))),
        "m_mean": float(np.mean([order_parameter(s, lat).m for s in snaps])),
    }
    out.append(rec)
    print(rec, f"({time.time()-t0:.0f}s)", flush=True)
    with open("/root/pkg/calib/quench_scan.json", "w") as fh:
        json.dump(out, fh, indent=1)
print("quench calibration complete")
