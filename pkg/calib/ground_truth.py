import sys, time
import numpy as np
sys.path.insert(0, "/root/pkg/src")
from ktsim.lattice import build_lattice, clock_state
from ktsim.schedule import dimensionless_model
from ktsim.pimc import run_qmc
from ktsim.observables import PSI_WEIGHTS, sublattice_magnetization_hook

for L in (9, 12):
    lat = build_lattice("square_octagonal", L, "toroidal")
    hooks = {"msub": sublattice_magnetization_hook(lat)}
    for T in (0.24, 0.28):
        beta = 1.0 / T
        model = dimensionless_model(lat, beta_J=beta, beta_Gamma=beta, beta=beta)
        for init_name, init, seed in (("clock", clock_state(lat), 3), ("random", "random", 4)):
            t0 = time.time()
            res = run_qmc(model, 50000, seed=seed + L, init=init, hooks=hooks,
                          burn=15000, thin=10)
            m = np.abs(res.data["msub"][:, 0, :] @ PSI_WEIGHTS)
            blocks = m[: len(m) // 5 * 5].reshape(5, -1).mean(axis=1)
            print(f"L={L} T={T} {init_name}: m={m.mean():.4f} "
                  f"blocks={np.round(blocks, 3)} ({time.time()-t0:.0f}s)", flush=True)
