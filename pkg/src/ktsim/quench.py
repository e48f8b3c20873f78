"""Local classical quench: greedy repair of single-site and chain excitations.

Models the fast pre-readout quench as strict classical descent: sweeps in
random order over single-site flips and whole-chain flips, applying every
move that strictly lowers the classical energy, until a full sweep changes
nothing.  Zero-energy moves are skipped so the descent terminates.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .lattice import Lattice
from .pimc.worldlines import SpinSample

_EPS = 1e-12


@njit(cache=True)
def _quench_kernel(
    spins, adj_nbr, adj_J, adj_off, chains, ext_in, ext_out, ext_J, ext_off, h, seed
):
    np.random.seed(seed & 0x7FFFFFFF)
    n = spins.shape[0]
    n_chains = chains.shape[0]
    total = n + n_chains
    changed = True
    while changed:
        changed = False
        order = np.random.permutation(total)
        for t in range(total):
            mv = order[t]
            if mv < n:
                i = mv
                f = h[i]
                for e in range(adj_off[i], adj_off[i + 1]):
                    f += adj_J[e] * spins[adj_nbr[e]]
                dE = -2.0 * spins[i] * f
                if dE < -_EPS:
                    spins[i] = -spins[i]
                    changed = True
            else:
                q = mv - n
                dE = 0.0
                for e in range(ext_off[q], ext_off[q + 1]):
                    dE += -2.0 * ext_J[e] * spins[ext_in[e]] * spins[ext_out[e]]
                for k in range(4):
                    s = chains[q, k]
                    if h[s] != 0.0:
                        dE += -2.0 * h[s] * spins[s]
                if dE < -_EPS:
                    for k in range(4):
                        spins[chains[q, k]] = -spins[chains[q, k]]
                    changed = True
    return spins


class QuenchTables:
    """Adjacency and chain-boundary tables reused across many snapshots."""

    def __init__(self, lattice: Lattice, h: np.ndarray | None = None):
        self.lattice = lattice
        n = lattice.num_sites
        ci, cj, J = lattice.coupler_arrays()
        deg = np.zeros(n, dtype=np.int64)
        np.add.at(deg, ci, 1)
        np.add.at(deg, cj, 1)
        self.adj_off = np.concatenate([[0], np.cumsum(deg)])
        self.adj_nbr = np.empty(self.adj_off[-1], dtype=np.int64)
        self.adj_J = np.empty(self.adj_off[-1], dtype=np.float64)
        cursor = self.adj_off[:-1].copy()
        for a, b, v in zip(ci, cj, J):
            self.adj_nbr[cursor[a]] = b
            self.adj_J[cursor[a]] = v
            cursor[a] += 1
            self.adj_nbr[cursor[b]] = a
            self.adj_J[cursor[b]] = v
            cursor[b] += 1

        self.chains = lattice.chains.astype(np.int64)
        n_chains = len(self.chains)
        chain_of = np.full(n, -1, dtype=np.int64)
        for q, sites in enumerate(self.chains):
            chain_of[sites] = q
        per_chain: list[list[tuple[int, int, float]]] = [[] for _ in range(n_chains)]
        for a, b, v in zip(ci, cj, J):
            qa, qb = chain_of[a], chain_of[b]
            if qa == qb:
                continue
            if qa >= 0:
                per_chain[qa].append((int(a), int(b), float(v)))
            if qb >= 0:
                per_chain[qb].append((int(b), int(a), float(v)))
        counts = np.array([len(v) for v in per_chain], dtype=np.int64)
        self.ext_off = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        total = int(self.ext_off[-1])
        self.ext_in = np.empty(total, dtype=np.int64)
        self.ext_out = np.empty(total, dtype=np.int64)
        self.ext_J = np.empty(total, dtype=np.float64)
        w = 0
        for v in per_chain:
            for a, b, val in v:
                self.ext_in[w], self.ext_out[w], self.ext_J[w] = a, b, val
                w += 1
        self.h = np.zeros(n) if h is None else np.asarray(h, dtype=np.float64)


def local_quench(
    sample,
    lattice: Lattice,
    rng: np.random.Generator,
    tables: QuenchTables | None = None,
) -> SpinSample:
    """Descend to a state with no improving single-site or chain flip."""
    values = np.asarray(getattr(sample, "values", sample))
    if len(values) != lattice.num_sites:
        raise ValueError(
            f"sample length {len(values)} does not match lattice {lattice.num_sites}"
        )
    t = tables or QuenchTables(lattice)
    spins = values.astype(np.int8).copy()
    seed = int(rng.integers(1 << 31))
    _quench_kernel(
        spins,
        t.adj_nbr,
        t.adj_J,
        t.adj_off,
        t.chains,
        t.ext_in,
        t.ext_out,
        t.ext_J,
        t.ext_off,
        t.h,
        seed,
    )
    return SpinSample(values=spins, origin="local_quench")


def improving_moves(sample, lattice: Lattice, tables: QuenchTables | None = None):
    """All strictly-improving single-site and chain flips (for post-checks)."""
    values = np.asarray(getattr(sample, "values", sample)).astype(np.float64)
    t = tables or QuenchTables(lattice)
    moves = []
    for i in range(lattice.num_sites):
        f = t.h[i]
        sl = slice(t.adj_off[i], t.adj_off[i + 1])
        f += float(np.dot(t.adj_J[sl], values[t.adj_nbr[sl]]))
        dE = -2.0 * values[i] * f
        if dE < -_EPS:
            moves.append(("site", i, dE))
    for q in range(len(t.chains)):
        sl = slice(t.ext_off[q], t.ext_off[q + 1])
        dE = float(
            np.sum(-2.0 * t.ext_J[sl] * values[t.ext_in[sl]] * values[t.ext_out[sl]])
        )
        chain_sites = t.chains[q]
        dE += float(np.sum(-2.0 * t.h[chain_sites] * values[chain_sites]))
        if dE < -_EPS:
            moves.append(("chain", q, dE))
    return moves
