"""Background-susceptibility forward map and compensation.

Every spin mediates an effective coupling between its neighbors: for spins
i, j, k with couplers J_ij and J_jk, a term chi_b * J_ij * J_jk is added to
J_ik (creating next-nearest-neighbor couplers where none were programmed).
`chi_forward` applies this map; `chi_compensate` inverts it approximately for
the square-octagonal lattice, finding programmed couplers J_QA such that the
effective Hamiltonian is alpha * J_ideal at the level of the two constraint
families that matter for chain-based spins:

1. every cell-level bond keeps its total inter-chain coupling (alpha for bulk
   bonds, alpha/2 on the halved open boundary), and
2. every single-break chain configuration keeps its total frustrated
   intra-chain coupling at -1.8 * alpha,

with the mean programmed magnitude of bulk AFM couplers pinned to rho.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import KIND_SQUARE_OCTAGONAL, Lattice

CouplerMap = dict[tuple[int, int], float]


class CompensationError(RuntimeError):
    """Raised when the compensation iteration fails to converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class ChiBParams:
    """Bundle of susceptibility-compensation parameters.

    chi_b is the unitless normalized background susceptibility (negative on
    hardware), rho the target mean programmed AFM magnitude, alpha the overall
    output scale determined by the compensation.
    """

    chi_b: float
    rho: float
    alpha: float = 1.0

    def __post_init__(self):
        if abs(self.chi_b) >= 0.2:
            raise ValueError(f"|chi_b| must be < 0.2, got {self.chi_b}")
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")


def _normalize(pairs: CouplerMap) -> CouplerMap:
    out: CouplerMap = {}
    for (i, j), v in pairs.items():
        if i == j:
            raise ValueError("self-couplers are not allowed")
        key = (i, j) if i < j else (j, i)
        out[key] = out.get(key, 0.0) + float(v)
    return out


def chi_forward(J: CouplerMap, chi_b: float) -> CouplerMap:
    """Apply the background-susceptibility map to a coupler dictionary.

    Output contains J_ik + chi_b * sum_j J_ij * J_jk for every pair sharing a
    common neighbor, including freshly created next-nearest-neighbor pairs.
    """
    J = _normalize(J)
    eff: CouplerMap = dict(J)
    if chi_b == 0.0:
        return eff
    adjacency: dict[int, list[tuple[int, float]]] = {}
    for (i, j), v in J.items():
        adjacency.setdefault(i, []).append((j, v))
        adjacency.setdefault(j, []).append((i, v))
    for mid, nbrs in adjacency.items():
        n = len(nbrs)
        for a in range(n):
            i, vi = nbrs[a]
            for b in range(a + 1, n):
                k, vk = nbrs[b]
                key = (i, k) if i < k else (k, i)
                eff[key] = eff.get(key, 0.0) + chi_b * vi * vk
    return eff


def _chain_pair_sums(lattice: Lattice, eff: CouplerMap):
    """Aggregate an effective coupler map by cell-level bond and chain break.

    Returns (bond_sums, break_sums): bond_sums[b] is the total coupling
    between the two chains of AFM bond b (indexed like lattice AFM couplers);
    break_sums[q, p-1] is the total intra-chain coupling of chain q crossing a
    single domain wall at position p in 1..3.
    """
    n_afm = lattice.num_afm
    chain_of = np.repeat(np.arange(lattice.n_chains), 4)
    offset = np.tile(np.arange(4), lattice.n_chains)

    bond_index: dict[tuple[int, int], int] = {}
    for b in range(n_afm):
        e = lattice.num_fm + b
        ca = int(chain_of[lattice.coupler_i[e]])
        cb = int(chain_of[lattice.coupler_j[e]])
        key = (ca, cb) if ca < cb else (cb, ca)
        bond_index[key] = b

    bond_sums = np.zeros(n_afm)
    break_sums = np.zeros((lattice.n_chains, 3))
    for (i, j), v in eff.items():
        ci_, cj_ = int(chain_of[i]), int(chain_of[j])
        if ci_ == cj_:
            u, w = int(offset[i]), int(offset[j])
            if u > w:
                u, w = w, u
            for p in range(u + 1, w + 1):
                break_sums[ci_, p - 1] += v
        else:
            key = (ci_, cj_) if ci_ < cj_ else (cj_, ci_)
            b = bond_index.get(key)
            if b is not None:
                bond_sums[b] += v
    return bond_sums, break_sums


def compensation_residuals(
    lattice: Lattice, J_QA: np.ndarray, chi_b: float, alpha: float
) -> dict[str, float]:
    """Max violations of both constraint families under chi_forward."""
    pairs = {
        (int(i), int(j)): float(v)
        for i, j, v in zip(lattice.coupler_i, lattice.coupler_j, J_QA)
    }
    eff = chi_forward(pairs, chi_b)
    bond_sums, break_sums = _chain_pair_sums(lattice, eff)
    afm_strength = lattice.coupler_strength[lattice.afm_slice]
    bond_res = np.max(np.abs(bond_sums - alpha * afm_strength))
    break_res = np.max(np.abs(break_sums - (-1.8 * alpha)))
    return {"bond": float(bond_res), "break": float(break_res)}


def chi_compensate(
    lattice: Lattice,
    chi_b: float,
    rho: float,
    tol: float = 1e-9,
    max_iter: int = 1000,
    damping: float = 0.5,
) -> tuple[np.ndarray, float]:
    """Find programmed couplers J_QA and scale alpha compensating chi_b.

    Returns (J_QA, alpha) with J_QA aligned with the lattice coupler order.
    Damped fixed-point iteration: each round nudges every direct AFM coupler
    against its bond-sum residual, every FM coupler against its break-sum
    residual, and alpha against the bulk-AFM-mean constraint.
    """
    params = ChiBParams(chi_b=chi_b, rho=rho)
    if lattice.kind != KIND_SQUARE_OCTAGONAL:
        raise ValueError("chi compensation is defined for square-octagonal lattices")

    ideal = lattice.coupler_strength.copy()
    afm = lattice.afm_slice
    afm_strength = ideal[afm]
    bulk = afm_strength == np.max(afm_strength)

    x = ideal * rho
    alpha = rho
    for iteration in range(max_iter):
        pairs = {
            (int(i), int(j)): float(v)
            for i, j, v in zip(lattice.coupler_i, lattice.coupler_j, x)
        }
        eff = chi_forward(pairs, chi_b)
        bond_sums, break_sums = _chain_pair_sums(lattice, eff)

        bond_res = alpha * afm_strength - bond_sums
        x[afm] += damping * bond_res

        # FM coupler for break position p lives at chain offset p-1
        target = -1.8 * alpha
        break_res = target - break_sums
        fm = x[: lattice.num_fm].reshape(lattice.n_chains, 3)
        fm += damping * break_res
        x[: lattice.num_fm] = fm.ravel()

        mean_bulk = float(np.mean(np.abs(x[afm][bulk])))
        alpha *= 1.0 + damping * (rho / mean_bulk - 1.0)

        worst = max(
            float(np.max(np.abs(bond_res))),
            float(np.max(np.abs(break_res))),
            abs(mean_bulk - rho),
        )
        if worst < tol:
            params.alpha = alpha
            return x, alpha
    raise CompensationError(
        f"compensation did not converge in {max_iter} iterations", worst
    )
