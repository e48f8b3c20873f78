"""Calibration scan: temperature sweeps at Gamma=1 on tori, L in {3,6,9,12}.

Produces moments tables used to pin acceptance-test operating points.
"""
import json
import sys
import time

import numpy as np

sys.path.insert(0, "/root/pkg/src")
from ktsim.lattice import build_lattice, clock_state
from ktsim.schedule import dimensionless_model
from ktsim.pimc import make_ladder, run_qmc
from ktsim.pimc.tempering import MODE_FIXED_GAMMA
from ktsim.observables import PSI_WEIGHTS, sublattice_magnetization_hook

GAMMA = 1.0
TEMPS = np.array([0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.57, 0.65, 0.75, 0.90])
SIZES = [3, 6, 9, 12]
SWEEPS = {3: 24000, 6: 20000, 9: 14000, 12: 10000}
BURN = {3: 4000, 6: 4000, 9: 3000, 12: 2500}

out = {}
for L in SIZES:
    t0 = time.time()
    lat = build_lattice("square_octagonal", L, "toroidal")
    models = []
    for T in TEMPS:
        beta = 1.0 / T
        models.append(
            dimensionless_model(lat, beta_J=beta, beta_Gamma=beta * GAMMA, beta=beta)
        )
    # ladder ordered cold -> hot or hot -> cold; monotone either way
    ladder = make_ladder(models, MODE_FIXED_GAMMA, seed=1000 + L, init=clock_state(lat))
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    res = run_qmc(ladder, SWEEPS[L], seed=500 + L, hooks=hooks, burn=BURN[L], thin=4)
    msub = res.data["msub"]  # (n_emit, n_T, 3)
    psi = msub @ PSI_WEIGHTS
    m = np.abs(psi)
    rec = []
    for k, T in enumerate(TEMPS):
        mk = m[:, k]
        beta = 1.0 / T
        rec.append(
            {
                "L": L,
                "T": float(T),
                "m_mean": float(mk.mean()),
                "m2": float((mk**2).mean()),
                "m4": float((mk**4).mean()),
                "chi": float(lat.num_sites * beta * (mk**2).mean()),
                "n": len(mk),
            }
        )
    out[str(L)] = rec
    print(f"L={L} done in {time.time()-t0:.0f}s; swap rates {np.round(ladder.swap_rate(),2)}",
          flush=True)
    with open("/root/pkg/calib/gamma1_scan.json", "w") as fh:
        json.dump(out, fh, indent=1)
print("scan complete")
