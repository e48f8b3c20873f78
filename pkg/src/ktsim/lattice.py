"""Frustrated lattice construction.

Both lattice kinds are organized around the same triangular "cell" graph:
``L`` rows of cells along the open dimension and ``2L`` columns around the
periodic dimension.  Cell ``(r, c)`` is adjacent to ``(r, c±1)`` (ring bonds),
``(r±1, c)`` (straight bonds) and ``(r+1, c-1)`` / ``(r-1, c+1)`` (diagonal
bonds).  For the triangular kind the cells are the sites themselves; for the
square-octagonal kind each cell is a ferromagnetic chain of four sites and
every cell-level bond is realized by exactly one antiferromagnetic coupler
between specific chain sites, giving a 3-regular site graph whose faces are
squares and octagons.

Site-level AFM attachment (square-octagonal), uniform over the lattice:

- ring bond     (r,c)-(r,c+1):  site0 of (r,c)  <-> site2 of (r,c+1)
- straight bond (r,c)-(r+1,c):  site3 of (r,c)  <-> site1 of (r+1,c)
- diagonal bond (r,c)-(r+1,c-1): site3 of (r,c) <-> site0 of (r+1,c-1)

Sublattice labels follow ``((c - r) mod 3) + 1``, which is a proper
3-coloring of the cell graph exactly when the ring length ``2L`` is a
multiple of 3 (i.e. ``L % 3 == 0``); the constructor records this in
``Lattice.proper_coloring``.  Structural operations (counts, symmetry
classes, embedding) work for any ``L >= 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

FM_STRENGTH = -1.8
AFM_STRENGTH = 1.0
BOUNDARY_AFM_STRENGTH = 0.5

KIND_SQUARE_OCTAGONAL = "square_octagonal"
KIND_TRIANGULAR = "triangular"
BOUNDARY_CYLINDRICAL = "cylindrical"
BOUNDARY_TOROIDAL = "toroidal"

# cell-level bond types
BOND_RING = 0
BOND_STRAIGHT = 1
BOND_DIAGONAL = 2
BOND_TYPE_NAMES = ("ring", "straight", "diagonal")


class LatticeError(ValueError):
    """Raised for invalid lattice construction requests."""


@dataclass
class Lattice:
    """A frustrated lattice with its chain, sublattice and plaquette structure.

    Coupler arrays run FM couplers first (square-octagonal only), then AFM
    couplers.  Per-AFM metadata (`afm_row`, `afm_col`, `afm_type`) records the
    cell-level bond each AFM coupler realizes; `afm_col` is the column of the
    bond's base cell ``(r, c)`` in the conventions above.
    """

    kind: str
    L: int
    boundary: str
    num_sites: int
    coupler_i: np.ndarray
    coupler_j: np.ndarray
    coupler_strength: np.ndarray
    num_fm: int
    chains: np.ndarray  # (n_chains, 4) int32, empty for triangular
    sublattice: np.ndarray  # (num_sites,) int8 in {1,2,3}
    plaq_cells: np.ndarray  # (n_plaq, 3) cell indices
    plaq_row: np.ndarray
    plaq_col: np.ndarray
    plaq_orient: np.ndarray  # 0 = up, 1 = down
    afm_row: np.ndarray
    afm_col: np.ndarray
    afm_type: np.ndarray
    proper_coloring: bool = True
    h: np.ndarray | None = field(default=None, repr=False)

    @property
    def rows(self) -> int:
        return self.L

    @property
    def cols(self) -> int:
        return 2 * self.L

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @property
    def num_couplers(self) -> int:
        return len(self.coupler_i)

    @property
    def num_afm(self) -> int:
        return self.num_couplers - self.num_fm

    @property
    def afm_slice(self) -> slice:
        return slice(self.num_fm, self.num_couplers)

    @property
    def n_plaquettes(self) -> int:
        return len(self.plaq_cells)

    def cell_index(self, r: int, c: int) -> int:
        return (r % self.rows) * self.cols + (c % self.cols)

    def cell_sublattice(self, cell: int) -> int:
        r, c = divmod(cell, self.cols)
        return ((c - r) % 3) + 1

    def cell_sites(self, cell: int) -> np.ndarray:
        """Sites belonging to a cell (the chain, or the single site)."""
        if self.kind == KIND_SQUARE_OCTAGONAL:
            return self.chains[cell]
        return np.array([cell], dtype=np.int32)

    def couplers(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(s))
            for i, j, s in zip(self.coupler_i, self.coupler_j, self.coupler_strength)
        ]

    def coupler_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.coupler_i, self.coupler_j, self.coupler_strength

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "L": self.L,
            "boundary": self.boundary,
            "num_sites": self.num_sites,
            "couplers": [[int(i), int(j), float(s)] for i, j, s in self.couplers()],
            "num_fm": self.num_fm,
            "chains": self.chains.tolist(),
            "sublattice": self.sublattice.tolist(),
            "plaquettes": [
                {
                    "row": int(r),
                    "col": int(c),
                    "orientation": int(o),
                    "members": [int(m) for m in cells],
                }
                for r, c, o, cells in zip(
                    self.plaq_row, self.plaq_col, self.plaq_orient, self.plaq_cells
                )
            ],
            "proper_coloring": self.proper_coloring,
        }
        return json.dumps(doc, indent=1)

    @staticmethod
    def from_json(text: str) -> "Lattice":
        doc = json.loads(text)
        lat = build_lattice(doc["kind"], doc["L"], doc["boundary"])
        if lat.to_json() != json.dumps(doc, indent=1):
            # accept re-serialized documents from older runs as long as the
            # structural fields agree
            rebuilt = json.loads(lat.to_json())
            for key in ("couplers", "chains", "sublattice", "num_sites"):
                if rebuilt[key] != doc[key]:
                    raise LatticeError(
                        f"lattice JSON does not match deterministic construction ({key})"
                    )
        return lat


@dataclass
class SymmetryClasses:
    """Partition of AFM couplers into rotation-equivalence classes.

    Each class collects, for one cell-level bond type and row, the couplers
    related by rotating the cylinder one period around the ring.  Global spin
    flip is a separate symmetry and is tracked only as a flag.
    """

    lattice_L: int
    classes: list[np.ndarray]  # AFM coupler indices (into the full coupler list)
    labels: list[tuple[str, int]]  # (bond type name, row)
    spin_flip_symmetric: bool = True

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_of(self) -> dict[int, int]:
        """Map coupler index -> class id."""
        out: dict[int, int] = {}
        for k, members in enumerate(self.classes):
            for m in members:
                out[int(m)] = k
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "L": self.lattice_L,
                "classes": [
                    {"type": t, "row": r, "members": members.tolist()}
                    for (t, r), members in zip(self.labels, self.classes)
                ],
            },
            indent=1,
        )


def _cell_bonds(L: int, boundary: str) -> list[tuple[int, int, int, int, float]]:
    """Enumerate cell-level bonds as (type, row, col, partner_cell, strength).

    The base cell of a bond of type t at (row, col) is ``row*C + col``; the
    partner follows the conventions in the module docstring.  Boundary halving
    applies to ring bonds in the two open-edge rows of a cylinder.
    """
    R, C = L, 2 * L
    toroidal = boundary == BOUNDARY_TOROIDAL
    bonds = []
    for r in range(R):
        for c in range(C):
            # ring bond (r,c)-(r,c+1)
            strength = AFM_STRENGTH
            if not toroidal and r in (0, R - 1):
                strength = BOUNDARY_AFM_STRENGTH
            bonds.append((BOND_RING, r, c, r * C + (c + 1) % C, strength))
    row_max = R if toroidal else R - 1
    for r in range(row_max):
        for c in range(C):
            bonds.append((BOND_STRAIGHT, r, c, ((r + 1) % R) * C + c, AFM_STRENGTH))
    for r in range(row_max):
        for c in range(C):
            bonds.append((BOND_DIAGONAL, r, c, ((r + 1) % R) * C + (c - 1) % C, AFM_STRENGTH))
    return bonds


def build_lattice(kind: str, L: int, boundary: str) -> Lattice:
    """Construct a fully-frustrated lattice of width L.

    Cylinders have ``L`` rows of cells along the open dimension and a periodic
    ring of ``2L`` cells; tori close both dimensions.  Square-octagonal
    lattices carry ``8 L^2`` sites in ``2 L^2`` four-site FM chains; triangular
    lattices use the cells as sites directly.
    """
    if kind not in (KIND_SQUARE_OCTAGONAL, KIND_TRIANGULAR):
        raise LatticeError(f"unsupported lattice kind {kind!r}")
    if boundary not in (BOUNDARY_CYLINDRICAL, BOUNDARY_TOROIDAL):
        raise LatticeError(f"unsupported boundary {boundary!r}")
    if L < 2:
        raise LatticeError(
            f"L={L} is below the minimum width 2 (need at least two rows of cells)"
        )

    R, C = L, 2 * L
    n_cells = R * C
    bonds = _cell_bonds(L, boundary)

    if kind == KIND_SQUARE_OCTAGONAL:
        num_sites = 4 * n_cells
        chains = np.arange(num_sites, dtype=np.int32).reshape(n_cells, 4)
        fm_i, fm_j = [], []
        for q in range(n_cells):
            base = 4 * q
            for k in range(3):
                fm_i.append(base + k)
                fm_j.append(base + k + 1)
        # site offsets within the base and partner chain per bond type
        site_of_base = {BOND_RING: 0, BOND_STRAIGHT: 3, BOND_DIAGONAL: 3}
        site_of_partner = {BOND_RING: 2, BOND_STRAIGHT: 1, BOND_DIAGONAL: 0}
    else:
        num_sites = n_cells
        chains = np.empty((0, 4), dtype=np.int32)
        fm_i, fm_j = [], []
        site_of_base = {t: 0 for t in (BOND_RING, BOND_STRAIGHT, BOND_DIAGONAL)}
        site_of_partner = dict(site_of_base)

    afm_i, afm_j, afm_s = [], [], []
    afm_row, afm_col, afm_type = [], [], []
    for t, r, c, partner, strength in bonds:
        base = r * C + c
        if kind == KIND_SQUARE_OCTAGONAL:
            i = 4 * base + site_of_base[t]
            j = 4 * partner + site_of_partner[t]
        else:
            i, j = base, partner
        afm_i.append(i)
        afm_j.append(j)
        afm_s.append(strength)
        afm_row.append(r)
        afm_col.append(c)
        afm_type.append(t)

    num_fm = len(fm_i)
    coupler_i = np.array(fm_i + afm_i, dtype=np.int32)
    coupler_j = np.array(fm_j + afm_j, dtype=np.int32)
    coupler_strength = np.concatenate(
        [np.full(num_fm, FM_STRENGTH), np.array(afm_s, dtype=np.float64)]
    )

    cell_color = np.empty(n_cells, dtype=np.int8)
    for r in range(R):
        for c in range(C):
            cell_color[r * C + c] = ((c - r) % 3) + 1
    if kind == KIND_SQUARE_OCTAGONAL:
        sublattice = np.repeat(cell_color, 4)
    else:
        sublattice = cell_color

    # plaquettes: row-major around the ring, up then down per (row, col)
    plaq_cells, plaq_row, plaq_col, plaq_orient = [], [], [], []
    prow_max = R if boundary == BOUNDARY_TOROIDAL else R - 1
    for r in range(prow_max):
        r1 = (r + 1) % R
        for c in range(C):
            c1 = (c + 1) % C
            plaq_cells.append((r * C + c, r * C + c1, r1 * C + c))
            plaq_row.append(r)
            plaq_col.append(c)
            plaq_orient.append(0)
            plaq_cells.append((r * C + c1, r1 * C + c, r1 * C + c1))
            plaq_row.append(r)
            plaq_col.append(c)
            plaq_orient.append(1)

    return Lattice(
        kind=kind,
        L=L,
        boundary=boundary,
        num_sites=num_sites,
        coupler_i=coupler_i,
        coupler_j=coupler_j,
        coupler_strength=coupler_strength,
        num_fm=num_fm,
        chains=chains,
        sublattice=sublattice,
        plaq_cells=np.array(plaq_cells, dtype=np.int32),
        plaq_row=np.array(plaq_row, dtype=np.int32),
        plaq_col=np.array(plaq_col, dtype=np.int32),
        plaq_orient=np.array(plaq_orient, dtype=np.int8),
        afm_row=np.array(afm_row, dtype=np.int32),
        afm_col=np.array(afm_col, dtype=np.int32),
        afm_type=np.array(afm_type, dtype=np.int8),
        proper_coloring=(L % 3 == 0),
    )


def symmetry_classes(lattice: Lattice) -> SymmetryClasses:
    """Group AFM couplers into classes equivalent under ring rotation.

    Only defined on cylinders; the toroidal automorphism group is richer and
    out of scope here.
    """
    if lattice.boundary != BOUNDARY_CYLINDRICAL:
        raise LatticeError("symmetry classes are defined for cylindrical lattices only")
    n_afm = lattice.num_afm
    keys = {}
    for local_idx in range(n_afm):
        t = int(lattice.afm_type[local_idx])
        r = int(lattice.afm_row[local_idx])
        keys.setdefault((t, r), []).append(lattice.num_fm + local_idx)
    labels = sorted(keys)
    classes = [np.array(keys[k], dtype=np.int64) for k in labels]
    expected = 2 * lattice.L
    for (t, r), members in zip(labels, classes):
        if len(members) != expected:
            raise LatticeError(
                f"class ({BOND_TYPE_NAMES[t]}, row {r}) has {len(members)} members, "
                f"expected {expected}"
            )
    return SymmetryClasses(
        lattice_L=lattice.L,
        classes=classes,
        labels=[(BOND_TYPE_NAMES[t], r) for t, r in labels],
    )


def rotate_cell(lattice: Lattice, cell: int, shift: int = 1) -> int:
    """Image of a cell under rotating the ring by `shift` periods."""
    r, c = divmod(cell, lattice.cols)
    return r * lattice.cols + (c + shift) % lattice.cols


def rotate_site(lattice: Lattice, site: int, shift: int = 1) -> int:
    """Image of a site under the ring rotation (site offsets preserved)."""
    if lattice.kind == KIND_TRIANGULAR:
        return rotate_cell(lattice, site, shift)
    cell, k = divmod(site, 4)
    return 4 * rotate_cell(lattice, cell, shift) + k


def clock_state(lattice: Lattice, rng: np.random.Generator | None = None) -> np.ndarray:
    """A fully-magnetized classical clock ground state.

    Sublattices 1, 2, 3 take values +1, -1, +1; every plaquette then has
    exactly one frustrated AFM coupler.
    """
    values = np.where(lattice.sublattice == 2, -1, 1).astype(np.int8)
    return values
