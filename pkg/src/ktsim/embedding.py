"""Embedding of the cylindrical square-octagonal lattice into a Chimera graph.

The Chimera graph is a grid of K4,4 unit cells: each cell holds four
"vertical" qubits (orientation u=0) and four "horizontal" qubits (u=1),
completely coupled across orientations within the cell; vertical qubits
couple to the same-index vertical qubit in the cells above/below, horizontal
qubits to the same-index horizontal qubit left/right.  Linear qubit index:
``q = 8*(cell_row*n_cols + cell_col) + 4*u + k``.

The cylinder is laid out as two interleaved square sheets closed at the top
and bottom.  Ring position ``c < L`` (sheet 0) homes at cell row ``c`` and
spurs its vertical end upward; ring position ``c >= L`` (sheet 1) homes at
cell row ``2L - c`` and spurs downward.  Cell column ``j`` carries lattice
row ``j``; every chain is two qubits in its home cell plus one qubit in each
of two adjacent cells.  This makes every lattice coupler an intra-cell or
same-index inter-cell Chimera edge with no special cases at the sheet seams,
and uses exactly ``8 L^2`` qubits of an ``(L+1) x (L+1)`` cell block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .lattice import (
    BOUNDARY_CYLINDRICAL,
    KIND_SQUARE_OCTAGONAL,
    Lattice,
    LatticeError,
)


@dataclass
class EmbeddingMap:
    """Site -> physical qubit map plus per-coupler physical edges."""

    grid_rows: int
    grid_cols: int
    site_to_qubit: np.ndarray  # (num_sites,) int64
    coupler_to_qubits: np.ndarray  # (num_couplers, 2) int64

    def to_json(self) -> str:
        return json.dumps(
            {
                "grid": [self.grid_rows, self.grid_cols],
                "site_to_qubit": self.site_to_qubit.tolist(),
                "coupler_to_qubits": self.coupler_to_qubits.tolist(),
            },
            indent=1,
        )

    @staticmethod
    def from_json(text: str) -> "EmbeddingMap":
        doc = json.loads(text)
        return EmbeddingMap(
            grid_rows=doc["grid"][0],
            grid_cols=doc["grid"][1],
            site_to_qubit=np.array(doc["site_to_qubit"], dtype=np.int64),
            coupler_to_qubits=np.array(doc["coupler_to_qubits"], dtype=np.int64),
        )


def chimera_index(cell_row: int, cell_col: int, u: int, k: int, n_cols: int) -> int:
    return 8 * (cell_row * n_cols + cell_col) + 4 * u + k


def chimera_coords(q: int, n_cols: int) -> tuple[int, int, int, int]:
    cell, rem = divmod(q, 8)
    u, k = divmod(rem, 4)
    return cell // n_cols, cell % n_cols, u, k


def is_chimera_edge(q1: int, q2: int, n_rows: int, n_cols: int) -> bool:
    """Whether two linear qubit indices are coupled in the Chimera graph."""
    if q1 == q2:
        return False
    r1, c1, u1, k1 = chimera_coords(q1, n_cols)
    r2, c2, u2, k2 = chimera_coords(q2, n_cols)
    for r, c in ((r1, c1), (r2, c2)):
        if not (0 <= r < n_rows and 0 <= c < n_cols):
            return False
    if (r1, c1) == (r2, c2):
        return u1 != u2  # K4,4 inside the cell
    if u1 != u2 or k1 != k2:
        return False
    if u1 == 0:  # vertical qubits couple along columns
        return c1 == c2 and abs(r1 - r2) == 1
    return r1 == r2 and abs(c1 - c2) == 1


def embed_chimera(lattice: Lattice, grid: tuple[int, int] = (16, 16)) -> EmbeddingMap:
    """Embed a cylindrical square-octagonal lattice into a Chimera cell grid."""
    if lattice.kind != KIND_SQUARE_OCTAGONAL or lattice.boundary != BOUNDARY_CYLINDRICAL:
        raise LatticeError("embedding supports cylindrical square-octagonal lattices only")
    n_rows, n_cols = grid
    L = lattice.L
    need = L + 1
    if n_rows < need or n_cols < need:
        raise LatticeError(
            f"grid too small: embedding L={L} needs at least {need}x{need} unit cells, "
            f"got {n_rows}x{n_cols}"
        )

    site_to_qubit = np.empty(lattice.num_sites, dtype=np.int64)
    C = lattice.cols
    for cell in range(lattice.n_cells):
        r, c = divmod(cell, C)
        j = r
        if c < L:  # sheet 0, ring ascends with the cell row, spur up
            i, spur = c, +1
            kv, kh = i % 2, j % 2
        else:  # sheet 1, ring descends, spur down
            i, spur = 2 * L - c, -1
            kv, kh = 2 + i % 2, 2 + j % 2
        s0, s1, s2, s3 = lattice.chains[cell]
        site_to_qubit[s0] = chimera_index(i + spur, j, 0, kv, n_cols)
        site_to_qubit[s1] = chimera_index(i, j, 0, kv, n_cols)
        site_to_qubit[s2] = chimera_index(i, j, 1, kh, n_cols)
        site_to_qubit[s3] = chimera_index(i, j + 1, 1, kh, n_cols)

    coupler_to_qubits = np.stack(
        [site_to_qubit[lattice.coupler_i], site_to_qubit[lattice.coupler_j]], axis=1
    )
    return EmbeddingMap(
        grid_rows=n_rows,
        grid_cols=n_cols,
        site_to_qubit=site_to_qubit,
        coupler_to_qubits=coupler_to_qubits,
    )


def validate_embedding(emap: EmbeddingMap, lattice: Lattice) -> list[dict]:
    """Check an embedding; returns a list of violations (empty iff valid)."""
    report: list[dict] = []
    n_rows, n_cols = emap.grid_rows, emap.grid_cols

    qubits, counts = np.unique(emap.site_to_qubit, return_counts=True)
    for q in qubits[counts > 1]:
        sites = np.flatnonzero(emap.site_to_qubit == q)
        report.append(
            {"kind": "injectivity", "qubit": int(q), "sites": [int(s) for s in sites]}
        )

    for idx, (qa, qb) in enumerate(emap.coupler_to_qubits):
        if not is_chimera_edge(int(qa), int(qb), n_rows, n_cols):
            report.append(
                {"kind": "membership", "coupler": idx, "qubits": [int(qa), int(qb)]}
            )

    expect = np.stack(
        [emap.site_to_qubit[lattice.coupler_i], emap.site_to_qubit[lattice.coupler_j]],
        axis=1,
    )
    mismatched = np.flatnonzero(np.any(expect != emap.coupler_to_qubits, axis=1))
    for idx in mismatched:
        report.append({"kind": "coupler_site_mismatch", "coupler": int(idx)})

    edges = {}
    for idx, (qa, qb) in enumerate(emap.coupler_to_qubits):
        key = (min(int(qa), int(qb)), max(int(qa), int(qb)))
        if key in edges:
            report.append(
                {"kind": "duplicate_physical_coupler", "couplers": [edges[key], idx]}
            )
        else:
            edges[key] = idx

    for chain_idx, chain in enumerate(lattice.chains):
        cells = [chimera_coords(int(emap.site_to_qubit[s]), n_cols)[:2] for s in chain]
        uniq = sorted(set(cells))
        counts = {cell: cells.count(cell) for cell in uniq}
        home = [cell for cell, n in counts.items() if n == 2]
        singles = [cell for cell, n in counts.items() if n == 1]
        ok = len(uniq) == 3 and len(home) == 1 and len(singles) == 2
        if ok:
            hr, hc = home[0]
            ok = all(abs(hr - r) + abs(hc - c) == 1 for r, c in singles)
        if not ok:
            report.append(
                {
                    "kind": "chain_shape",
                    "chain": int(chain_idx),
                    "cells": [list(c) for c in cells],
                }
            )
    return report
