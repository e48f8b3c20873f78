"""Calibration v2: dual-init temperature scans at Gamma=1, denser + longer."""
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
TEMPS = np.array([0.22, 0.25, 0.28, 0.32, 0.36, 0.41, 0.47, 0.54, 0.62, 0.71, 0.82, 0.95])
SIZES = [3, 6, 9, 12]
SWEEPS = {3: 60000, 6: 40000, 9: 28000, 12: 20000}

out = {}
for L in SIZES:
    lat = build_lattice("square_octagonal", L, "toroidal")
    models = [
        dimensionless_model(lat, beta_J=1.0 / T, beta_Gamma=GAMMA / T, beta=1.0 / T)
        for T in TEMPS
    ]
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    recs = {str(float(T)): {"L": L, "T": float(T)} for T in TEMPS}
    for init_name, init_seed in (("clock", 11), ("random", 22)):
        t0 = time.time()
        models_i = [m.with_temperature(1.0) for m in models]  # fresh copies
        init = clock_state(lat) if init_name == "clock" else "random"
        ladder = make_ladder(models_i, MODE_FIXED_GAMMA, seed=init_seed * 100 + L, init=init)
        res = run_qmc(
            ladder,
            SWEEPS[L],
            seed=init_seed * 1000 + L,
            hooks=hooks,
            burn=SWEEPS[L] // 4,
            thin=8,
        )
        m = np.abs(res.data["msub"] @ PSI_WEIGHTS)
        for k, T in enumerate(TEMPS):
            mk = m[:, k]
            beta = 1.0 / T
            recs[str(float(T))][init_name] = {
                "m_mean": float(mk.mean()),
                "m2": float((mk**2).mean()),
                "m4": float((mk**4).mean()),
                "chi": float(lat.num_sites * beta * (mk**2).mean()),
                "n": len(mk),
            }
        print(
            f"L={L} {init_name}: {time.time()-t0:.0f}s swaps "
            f"{np.round(ladder.swap_rate(), 2)}",
            flush=True,
        )
    out[str(L)] = list(recs.values())
    with open("/root/pkg/calib/gamma1_scan_v2.json", "w") as fh:
        json.dump(out, fh, indent=1)
print("v2 scan complete")
