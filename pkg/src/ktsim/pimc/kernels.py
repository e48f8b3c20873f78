"""Numba kernels for the continuous-time worldline engine.

Worldlines are piecewise-constant ±1 trajectories on the imaginary-time
circle [0, beta), stored as a spin at tau=0 plus sorted kink times, flattened
across sites (`kink_t` with CSR-style `kink_off`).  All randomness inside a
kernel derives from the integer seed passed in, so sweeps are reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def overlap(spins0, kink_t, kink_off, i, j, beta):
    """Integral of sigma_i(tau) * sigma_j(tau) over the time circle."""
    ai, bi = kink_off[i], kink_off[i + 1]
    aj, bj = kink_off[j], kink_off[j + 1]
    p = spins0[i] * spins0[j]
    t_prev = 0.0
    acc = 0.0
    ki, kj = ai, aj
    while ki < bi or kj < bj:
        if kj >= bj or (ki < bi and kink_t[ki] <= kink_t[kj]):
            t = kink_t[ki]
            ki += 1
        else:
            t = kink_t[kj]
            kj += 1
        acc += p * (t - t_prev)
        p = -p
        t_prev = t
    acc += p * (beta - t_prev)
    return acc


@njit(cache=True)
def signed_time(spins0, kink_t, kink_off, i, beta):
    """Integral of sigma_i(tau) over the time circle."""
    a, b = kink_off[i], kink_off[i + 1]
    s = spins0[i]
    t_prev = 0.0
    acc = 0.0
    for k in range(a, b):
        acc += s * (kink_t[k] - t_prev)
        s = -s
        t_prev = kink_t[k]
    acc += s * (beta - t_prev)
    return acc


@njit(cache=True)
def site_time_averages(spins0, kink_t, kink_off, beta):
    """Per-site time-averaged spin, (1/beta) * integral sigma_i dtau."""
    N = spins0.shape[0]
    out = np.empty(N, np.float64)
    for i in range(N):
        out[i] = signed_time(spins0, kink_t, kink_off, i, beta) / beta
    return out


@njit(cache=True)
def compute_action(spins0, kink_t, kink_off, ci, cj, cJ, h, beta):
    """Diagonal action S = sum_e J_e O_e + sum_i h_i T_i."""
    S = 0.0
    for e in range(ci.shape[0]):
        if cJ[e] != 0.0:
            S += cJ[e] * overlap(spins0, kink_t, kink_off, ci[e], cj[e], beta)
    for i in range(spins0.shape[0]):
        if h[i] != 0.0:
            S += h[i] * signed_time(spins0, kink_t, kink_off, i, beta)
    return S


@njit(cache=True)
def pair_overlaps(spins0, kink_t, kink_off, pi, pj, beta):
    """Overlap integrals for an explicit list of site pairs."""
    out = np.empty(pi.shape[0], np.float64)
    for e in range(pi.shape[0]):
        out[e] = overlap(spins0, kink_t, kink_off, pi[e], pj[e], beta)
    return out


@njit(cache=True)
def project_spins(spins0, kink_t, kink_off, tau):
    """Classical spins at time slice tau (right-continuous trajectories)."""
    N = spins0.shape[0]
    out = np.empty(N, np.int8)
    for i in range(N):
        a, b = kink_off[i], kink_off[i + 1]
        flips = np.searchsorted(kink_t[a:b], tau, side="right")
        out[i] = spins0[i] if flips % 2 == 0 else -spins0[i]
    return out


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra != rb:
        parent[rb] = ra


@njit(cache=True)
def _segment_at(bt, b_off, nb, s_off, i, t):
    """Global segment id containing time t on site i.

    Segment k of a site starts at its k-th boundary; the wrap segment (index
    nb-1) covers [last boundary, beta) plus [0, first boundary).
    """
    m = nb[i]
    if m == 0:
        return s_off[i]
    o = b_off[i]
    idx = np.searchsorted(bt[o : o + m], t, side="right") - 1
    if idx < 0:
        idx = m - 1
    return s_off[i] + idx


@njit(cache=True)
def cluster_sweep(spins0, kink_t, kink_off, ci, cj, cJ, h, gamma, beta, seed):
    """One Swendsen-Wang cluster update of the worldline configuration.

    Segment boundaries are the existing kinks plus Poisson cuts of rate gamma;
    couplers connect segments by Poisson links of rate 2|J| on satisfied
    stretches; connected components flip with probability 1/2 (components
    attached to the longitudinal-field ghost stay fixed); kinks are rebuilt
    from the flipped segment spins.  Returns the new configuration arrays.
    """
    np.random.seed(seed & 0x7FFFFFFF)
    N = spins0.shape[0]
    E = ci.shape[0]

    # --- segment boundaries: kinks + fresh cuts, sorted per site ---
    nb = np.empty(N, np.int64)
    for i in range(N):
        n_kinks = kink_off[i + 1] - kink_off[i]
        n_cuts = np.random.poisson(gamma * beta) if gamma > 0.0 else 0
        nb[i] = n_kinks + n_cuts
    b_off = np.zeros(N + 1, np.int64)
    for i in range(N):
        b_off[i + 1] = b_off[i] + nb[i]
    bt = np.empty(b_off[N], np.float64)
    b_is_kink = np.zeros(b_off[N], np.uint8)
    for i in range(N):
        o = b_off[i]
        a, b = kink_off[i], kink_off[i + 1]
        m_k = b - a
        for k in range(m_k):
            bt[o + k] = kink_t[a + k]
            b_is_kink[o + k] = 1
        for k in range(m_k, nb[i]):
            bt[o + k] = np.random.random() * beta
        if nb[i] > 1:
            order = np.argsort(bt[o : o + nb[i]])
            bt[o : o + nb[i]] = bt[o : o + nb[i]][order]
            b_is_kink[o : o + nb[i]] = b_is_kink[o : o + nb[i]][order]

    # --- segment spins (cuts do not flip, kinks do) ---
    s_off = np.zeros(N + 1, np.int64)
    for i in range(N):
        s_off[i + 1] = s_off[i] + (nb[i] if nb[i] > 0 else 1)
    M = s_off[N]
    seg_spin = np.empty(M, np.int8)
    for i in range(N):
        so = s_off[i]
        m = nb[i]
        if m == 0:
            seg_spin[so] = spins0[i]
            continue
        seg_spin[so + m - 1] = spins0[i]  # wrap segment holds sigma(0)
        s = spins0[i]
        o = b_off[i]
        for k in range(m - 1):
            if b_is_kink[o + k] == 1:
                s = -s
            seg_spin[so + k] = s

    use_ghost = False
    for i in range(N):
        if h[i] != 0.0:
            use_ghost = True
            break
    size = M + 1 if use_ghost else M
    parent = np.arange(size)

    # --- coupler links on satisfied stretches ---
    for e in range(E):
        Jv = cJ[e]
        if Jv == 0.0:
            continue
        i = ci[e]
        j = cj[e]
        rate = 2.0 * abs(Jv)
        ai, bi_ = kink_off[i], kink_off[i + 1]
        aj, bj_ = kink_off[j], kink_off[j + 1]
        p = spins0[i] * spins0[j]
        t_prev = 0.0
        ki, kj = ai, aj
        while True:
            if ki < bi_ or kj < bj_:
                if kj >= bj_ or (ki < bi_ and kink_t[ki] <= kink_t[kj]):
                    t = kink_t[ki]
                    ki += 1
                else:
                    t = kink_t[kj]
                    kj += 1
                last = False
            else:
                t = beta
                last = True
            if Jv * p < 0.0:
                span = t - t_prev
                if span > 0.0:
                    n_links = np.random.poisson(rate * span)
                    for _ in range(n_links):
                        tl = t_prev + np.random.random() * span
                        _union(
                            parent,
                            _segment_at(bt, b_off, nb, s_off, i, tl),
                            _segment_at(bt, b_off, nb, s_off, j, tl),
                        )
            if last:
                break
            p = -p
            t_prev = t

    # --- longitudinal-field links to the frozen ghost ---
    if use_ghost:
        ghost = M
        for i in range(N):
            hv = h[i]
            if hv == 0.0:
                continue
            rate = 2.0 * abs(hv)
            a, b = kink_off[i], kink_off[i + 1]
            s = spins0[i]
            t_prev = 0.0
            k = a
            while True:
                if k < b:
                    t = kink_t[k]
                    k += 1
                    last = False
                else:
                    t = beta
                    last = True
                if hv * s < 0.0:
                    span = t - t_prev
                    if span > 0.0:
                        n_links = np.random.poisson(rate * span)
                        for _ in range(n_links):
                            tl = t_prev + np.random.random() * span
                            _union(
                                parent,
                                _segment_at(bt, b_off, nb, s_off, i, tl),
                                ghost,
                            )
                if last:
                    break
                s = -s
                t_prev = t

    # --- flip components with probability 1/2 ---
    flip = np.zeros(size, np.uint8)
    for x in range(size):
        if parent[x] == x and np.random.random() < 0.5:
            flip[x] = 1
    if use_ghost:
        flip[_find(parent, M)] = 0
    for x in range(M):
        if flip[_find(parent, x)] == 1:
            seg_spin[x] = -seg_spin[x]

    # --- rebuild kinks: boundaries between opposite-spin segments ---
    new_counts = np.zeros(N, np.int64)
    for i in range(N):
        m = nb[i]
        if m == 0:
            continue
        so = s_off[i]
        for k in range(m):
            prev = so + (k - 1 if k > 0 else m - 1)
            if seg_spin[prev] != seg_spin[so + k]:
                new_counts[i] += 1
    new_off = np.zeros(N + 1, np.int64)
    for i in range(N):
        new_off[i + 1] = new_off[i] + new_counts[i]
    new_kt = np.empty(new_off[N], np.float64)
    new_spins = np.empty(N, np.int8)
    for i in range(N):
        m = nb[i]
        so = s_off[i]
        new_spins[i] = seg_spin[so + (m - 1 if m > 0 else 0)]
        if m == 0:
            continue
        o = b_off[i]
        w = new_off[i]
        for k in range(m):
            prev = so + (k - 1 if k > 0 else m - 1)
            if seg_spin[prev] != seg_spin[so + k]:
                new_kt[w] = bt[o + k]
                w += 1
    return new_spins, new_kt, new_off


@njit(cache=True)
def chain_sweep(
    spins0,
    kink_t,
    kink_off,
    chains,
    ext_in,
    ext_out,
    ext_J,
    ext_off,
    h,
    beta,
    seed,
):
    """Metropolis whole-worldline flips of every 4-site chain, random order.

    The action change comes only from couplers leaving the chain (plus any
    longitudinal fields on its sites); intra-chain action and kink weights are
    invariant.  Mutates spins0 in place; returns (dS_total, n_accepted).
    """
    np.random.seed(seed & 0x7FFFFFFF)
    n_chains = chains.shape[0]
    order = np.random.permutation(n_chains)
    dS_total = 0.0
    n_accepted = 0
    for idx in range(n_chains):
        q = order[idx]
        dS = 0.0
        for e in range(ext_off[q], ext_off[q + 1]):
            dS += -2.0 * ext_J[e] * overlap(
                spins0, kink_t, kink_off, ext_in[e], ext_out[e], beta
            )
        for k in range(4):
            site = chains[q, k]
            if h[site] != 0.0:
                dS += -2.0 * h[site] * signed_time(spins0, kink_t, kink_off, site, beta)
        if dS <= 0.0 or np.random.random() < np.exp(-dS):
            for k in range(4):
                spins0[chains[q, k]] = -spins0[chains[q, k]]
            dS_total += dS
            n_accepted += 1
    return dS_total, n_accepted
