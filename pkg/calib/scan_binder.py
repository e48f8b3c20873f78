"""Calibration: Binder cumulant vs Gamma at beta = 3.5 L / Gamma on tori."""
import json
import sys
import time

import numpy as np

sys.path.insert(0, "/root/pkg/src")
from ktsim.lattice import build_lattice, clock_state
from ktsim.schedule import dimensionless_model
from ktsim.pimc import make_ladder, run_qmc
from ktsim.pimc.tempering import MODE_FIXED_GAMMA_OVER_T
from ktsim.observables import PSI_WEIGHTS, sublattice_magnetization_hook

GAMMAS = np.array([1.40, 1.55, 1.70, 1.85, 2.00, 2.15])
SIZES = [3, 6]
SWEEPS = {3: 30000, 6: 16000, 9: 9000}
BURN = {3: 5000, 6: 3000, 9: 2000}

out = {}
for L in SIZES:
    t0 = time.time()
    lat = build_lattice("square_octagonal", L, "toroidal")
    models = []
    for G in GAMMAS:
        beta = 3.5 * L / G
        models.append(
            dimensionless_model(lat, beta_J=beta, beta_Gamma=3.5 * L, beta=beta)
        )
    ladder = make_ladder(
        models, MODE_FIXED_GAMMA_OVER_T, seed=2000 + L, init=clock_state(lat)
    )
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    res = run_qmc(ladder, SWEEPS[L], seed=700 + L, hooks=hooks, burn=BURN[L], thin=4)
    msub = res.data["msub"]
    m = np.abs(msub @ PSI_WEIGHTS)
    rec = []
    for k, G in enumerate(GAMMAS):
        mk = m[:, k]
        m2 = float((mk**2).mean())
        m4 = float((mk**4).mean())
        U = 2.0 * (1.0 - m4 / (2.0 * m2**2))
        rec.append({"L": L, "Gamma": float(G), "U": U, "m2": m2, "m4": m4, "n": len(mk)})
    out[str(L)] = rec
    print(f"L={L} done in {time.time()-t0:.0f}s; swaps {np.round(ladder.swap_rate(),2)}",
          flush=True)
    with open("/root/pkg/calib/binder_scan.json", "w") as fh:
        json.dump(out, fh, indent=1)
print("binder scan complete")
