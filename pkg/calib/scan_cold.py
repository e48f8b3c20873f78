import json, sys, time
import numpy as np
sys.path.insert(0, "/root/pkg/src")
from ktsim.lattice import build_lattice, clock_state
from ktsim.schedule import dimensionless_model
from ktsim.pimc import run_qmc
from ktsim.observables import PSI_WEIGHTS, sublattice_magnetization_hook

TEMPS = [0.20, 0.17, 0.14]
SWEEPS = {3: 30000, 6: 24000, 9: 18000, 12: 12000}
out = {}
for L in (3, 6, 9, 12):
    lat = build_lattice("square_octagonal", L, "toroidal")
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    rec = []
    for T in TEMPS:
        t0 = time.time()
        beta = 1.0 / T
        model = dimensionless_model(lat, beta_J=beta, beta_Gamma=beta, beta=beta)
        res = run_qmc(model, SWEEPS[L], seed=int(L * 1000 + T * 100),
                      init=clock_state(lat), hooks=hooks,
                      burn=SWEEPS[L] // 4, thin=8)
        m = np.abs(res.data["msub"][:, 0, :] @ PSI_WEIGHTS)
        blocks = m[: len(m) // 4 * 4].reshape(4, -1).mean(axis=1)
        rec.append({"T": T, "m": float(m.mean()), "blocks": blocks.tolist()})
        print(f"L={L} T={T}: m={m.mean():.4f} blocks={np.round(blocks,3)} ({time.time()-t0:.0f}s)", flush=True)
    out[str(L)] = rec
    with open("/root/pkg/calib/cold_scan.json", "w") as fh:
        json.dump(out, fh, indent=1)
print("cold scan done")
