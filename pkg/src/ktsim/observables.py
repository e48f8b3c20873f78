"""Pseudospin fields, order parameter, correlations, winding charts, energies.

Each plaquette combines its three cells (chains, or sites on the triangular
lattice) with cube-roots-of-unity weights ordered by sublattice label,

    psi_j = (v_1 + v_2 w + v_3 w^2) / sqrt(3),   w = exp(2 pi i / 3),

where a chain's value is the mean of its four site values.  The 1/sqrt(3)
normalization puts classical clock plaquettes at magnitude 2/sqrt(3) and
quantum clock plaquettes (one cell at zero) at magnitude 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import BOUNDARY_TOROIDAL, KIND_SQUARE_OCTAGONAL, Lattice

OMEGA = np.exp(2j * np.pi / 3.0)
PSI_WEIGHTS = np.array([1.0, OMEGA, OMEGA**2]) / np.sqrt(3.0)
PSI_MAX_ABS = 2.0 / np.sqrt(3.0)
ZERO_TOL = 1e-12


@dataclass
class PseudospinField:
    """One complex value per plaquette, indexed like lattice.plaq_*."""

    values: np.ndarray  # complex, (n_plaquettes,)
    lattice: Lattice = field(repr=False, default=None)
    source: str = "snapshot"

    def __len__(self):
        return len(self.values)

    def at(self, row: int, col: int, orient: int) -> complex:
        return self.values[plaq_index(self.lattice, row, col, orient)]


@dataclass
class OrderParameterStats:
    """Sublattice magnetizations and the derived complex order parameter."""

    m1: float
    m2: float
    m3: float
    psi: complex
    m: float
    mean_m: float | None = None
    m2_moment: float | None = None
    m4_moment: float | None = None
    binder_u: float | None = None
    chi_L: float | None = None
    n_samples: int = 1


@dataclass
class VortexChart:
    """Winding numbers at dual vertices (cells with six surrounding plaquettes)."""

    cells: np.ndarray  # dual-vertex cell indices
    winding: np.ndarray  # int per dual vertex
    defined: np.ndarray  # bool per dual vertex
    zero_plaquettes: np.ndarray  # plaquette indices with |psi| ~ 0

    @property
    def n_vortices(self) -> int:
        return int(np.sum(self.winding[self.defined] == 1))

    @property
    def n_antivortices(self) -> int:
        return int(np.sum(self.winding[self.defined] == -1))

    def total_winding(self) -> int:
        return int(np.sum(self.winding[self.defined]))


@dataclass
class CorrelationProfile:
    """Ring-distance correlation C(x) of the pseudospin field."""

    x: np.ndarray
    C: np.ndarray
    n_samples: int
    fit_exponent: float | None = None
    fit_prefactor: float | None = None
    fit_rms: float | None = None


def plaq_index(lattice: Lattice, row: int, col: int, orient: int) -> int:
    C = lattice.cols
    return (row * C + (col % C)) * 2 + orient


def cell_values(values: np.ndarray, lattice: Lattice) -> np.ndarray:
    """Per-cell value: chain mean for square-octagonal, site value otherwise."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) != lattice.num_sites:
        raise ValueError(
            f"got {len(values)} site values for a lattice of {lattice.num_sites}"
        )
    if lattice.kind == KIND_SQUARE_OCTAGONAL:
        return values[lattice.chains].mean(axis=1)
    return values


def _plaq_members_by_sublattice(lattice: Lattice) -> np.ndarray:
    cached = getattr(lattice, "_plaq_by_subl", None)
    if cached is not None:
        return cached
    if not lattice.proper_coloring:
        raise ValueError(
            "pseudospin fields need the three-sublattice structure; "
            f"L={lattice.L} is not a multiple of 3"
        )
    colors = np.array(
        [lattice.cell_sublattice(c) for c in range(lattice.n_cells)], dtype=np.int64
    )
    member_colors = colors[lattice.plaq_cells]  # (F, 3) values in {1,2,3}
    order = np.argsort(member_colors, axis=1)
    out = np.take_along_axis(lattice.plaq_cells, order, axis=1)
    lattice._plaq_by_subl = out
    return out


def pseudospin_field(values, lattice: Lattice, source: str = "snapshot") -> PseudospinField:
    """Complex pseudospin per plaquette from per-site values in [-1, 1]."""
    cv = cell_values(values, lattice)
    members = _plaq_members_by_sublattice(lattice)
    psi = cv[members] @ PSI_WEIGHTS
    return PseudospinField(values=psi, lattice=lattice, source=source)


def order_parameter(values, lattice: Lattice) -> OrderParameterStats:
    """Sublattice magnetizations and psi = (m1 + m2 w + m3 w^2)/sqrt(3)."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) != lattice.num_sites:
        raise ValueError(
            f"got {len(values)} site values for a lattice of {lattice.num_sites}"
        )
    ms = np.array(
        [values[lattice.sublattice == k].mean() for k in (1, 2, 3)]
    )
    psi = complex(ms @ PSI_WEIGHTS)
    return OrderParameterStats(
        m1=float(ms[0]), m2=float(ms[1]), m3=float(ms[2]), psi=psi, m=abs(psi)
    )


def sublattice_masks(lattice: Lattice) -> list[np.ndarray]:
    return [lattice.sublattice == k for k in (1, 2, 3)]


def magnetization_triples_to_psi(triples: np.ndarray) -> np.ndarray:
    """(n, 3) sublattice magnetizations -> complex psi values."""
    triples = np.asarray(triples, dtype=np.float64)
    return triples @ PSI_WEIGHTS


def ensemble_stats(
    entries,
    n_sites: int | None = None,
    beta: float | None = None,
) -> OrderParameterStats:
    """Ensemble moments, Binder cumulant and susceptibility proxy.

    `entries` may be per-sample m magnitudes, complex psi values, or (n, 3)
    sublattice-magnetization triples.  chi_L = N <m^2> / T is attached when
    both n_sites and beta are supplied; U is None when <m^2> vanishes.
    """
    arr = np.asarray(entries)
    if arr.ndim == 2 and arr.shape[1] == 3:
        psi = magnetization_triples_to_psi(arr)
        m = np.abs(psi)
    elif np.iscomplexobj(arr):
        psi = arr.ravel()
        m = np.abs(psi)
    else:
        m = np.asarray(arr, dtype=np.float64).ravel()
        psi = None
    if len(m) < 2:
        raise ValueError("ensemble statistics need at least two entries")
    m2 = float(np.mean(m**2))
    m4 = float(np.mean(m**4))
    if m2 > 0.0:
        binder = float(2.0 * (1.0 - m4 / (2.0 * m2**2)))
    else:
        binder = None
    chi = float(n_sites * beta * m2) if (n_sites is not None and beta is not None) else None
    mean_psi = complex(np.mean(psi)) if psi is not None else 0j
    return OrderParameterStats(
        m1=np.nan,
        m2=np.nan,
        m3=np.nan,
        psi=mean_psi,
        m=float(np.mean(m)),
        mean_m=float(np.mean(m)),
        m2_moment=m2,
        m4_moment=m4,
        binder_u=binder,
        chi_L=chi,
        n_samples=len(m),
    )


def correlation_profile(fields, lattice: Lattice) -> CorrelationProfile:
    """C(x) = <Re(psi_i psi_{i+x}^*)> along the ring in the central row.

    References run over both orientations of the central plaquette row; the
    partner sits x same-orientation steps around the periodic dimension,
    x in 0..L.
    """
    if isinstance(fields, PseudospinField):
        fields = [fields]
    if len(fields) == 0:
        raise ValueError("correlation profile needs at least one field")
    C = lattice.cols
    n_prow = lattice.rows if lattice.boundary == BOUNDARY_TOROIDAL else lattice.rows - 1
    r0 = (n_prow - 1) // 2
    base = np.array(
        [[plaq_index(lattice, r0, c, o) for c in range(C)] for o in (0, 1)]
    )
    xs = np.arange(lattice.L + 1)
    acc = np.zeros(len(xs))
    for f in fields:
        vals = f.values[base]  # (2, C)
        for xi, x in enumerate(xs):
            shifted = np.conj(np.roll(vals, -x, axis=1))
            acc[xi] += np.mean(np.real(vals * shifted))
    return CorrelationProfile(x=xs, C=acc / len(fields), n_samples=len(fields))


def _dual_vertex_rings(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """Cells with all six surrounding plaquettes, and those plaquettes in
    clockwise traversal order."""
    cached = getattr(lattice, "_dual_rings", None)
    if cached is not None:
        return cached
    R, C = lattice.rows, lattice.cols
    toroidal = lattice.boundary == BOUNDARY_TOROIDAL
    rows = range(R) if toroidal else range(1, R - 1)
    cells, rings = [], []
    for r in rows:
        for c in range(C):
            rm = (r - 1) % R
            cm = (c - 1) % C
            ring = [
                plaq_index(lattice, rm, c, 1),
                plaq_index(lattice, rm, c, 0),
                plaq_index(lattice, rm, cm, 1),
                plaq_index(lattice, r, cm, 0),
                plaq_index(lattice, r, cm, 1),
                plaq_index(lattice, r, c, 0),
            ]
            cells.append(r * C + c)
            rings.append(ring)
    out = (np.array(cells, dtype=np.int64), np.array(rings, dtype=np.int64))
    lattice._dual_rings = out
    return out


def winding_chart(field: PseudospinField, lattice: Lattice | None = None) -> VortexChart:
    """Winding number of the pseudospin phase around every dual vertex.

    Phase increments are accumulated clockwise and wrapped to (-pi, pi];
    a clockwise-rotating phase counts as a vortex (w = +1).  Vertices
    touching a zero-magnitude plaquette are undefined.
    """
    lattice = lattice or field.lattice
    cells, rings = _dual_vertex_rings(lattice)
    psi = field.values
    ring_vals = psi[rings]  # (n_vertices, 6)
    mag = np.abs(ring_vals)
    nxt = np.roll(ring_vals, -1, axis=1)
    safe_nxt = np.where(np.abs(nxt) > ZERO_TOL, nxt, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        increments = np.angle(ring_vals / safe_nxt)
    # exactly anti-aligned neighbors (common for clock-valued fields) leave
    # the wrapped increment ambiguous: the winding is undefined there, like
    # at zero-magnitude plaquettes
    defined = np.all(mag > ZERO_TOL, axis=1) & np.all(
        np.abs(increments) < np.pi - 1e-9, axis=1
    )
    total = increments.sum(axis=1)
    winding = np.where(defined, np.rint(total / (2 * np.pi)), 0).astype(np.int64)
    zero = np.flatnonzero(np.abs(psi) <= ZERO_TOL)
    return VortexChart(
        cells=cells, winding=winding, defined=defined, zero_plaquettes=zero
    )


def classical_energy(sample, lattice_or_couplers, h: np.ndarray | None = None) -> float:
    """Classical energy per spin, (sum_ij J_ij s_i s_j + sum_i h_i s_i)/N."""
    values = np.asarray(getattr(sample, "values", sample))
    if isinstance(lattice_or_couplers, Lattice):
        lat = lattice_or_couplers
        if len(values) != lat.num_sites:
            raise ValueError(
                f"sample length {len(values)} does not match lattice {lat.num_sites}"
            )
        ci, cj, J = lat.coupler_arrays()
        if h is None and lat.h is not None:
            h = lat.h
    else:
        ci, cj, J = lattice_or_couplers
    e = float(np.sum(J * values[ci] * values[cj]))
    if h is not None:
        e += float(np.dot(h, values))
    return e / len(values)


def sublattice_magnetization_hook(lattice: Lattice):
    """Engine hook emitting time-averaged sublattice magnetizations (m1,m2,m3)."""
    masks = sublattice_masks(lattice)

    def hook(config, model):
        ta = config.site_time_averages()
        return np.array([ta[m].mean() for m in masks])

    return hook


def order_magnitude_hook(lattice: Lattice):
    """Engine hook emitting m = |psi| from time-averaged magnetizations."""
    masks = sublattice_masks(lattice)

    def hook(config, model):
        ta = config.site_time_averages()
        triple = np.array([ta[m].mean() for m in masks])
        return np.abs(triple @ PSI_WEIGHTS)

    return hook


def snapshot_hook(tau: float = 0.0):
    """Engine hook emitting the classical projection at a fixed time slice."""
    from .pimc.worldlines import project

    def hook(config, model):
        return project(config, tau).values.astype(np.float64)

    return hook


def field_to_rows(field: PseudospinField, lattice: Lattice | None = None):
    """Rows of (row, col, orientation, re, im) for CSV export."""
    lattice = lattice or field.lattice
    return [
        (int(r), int(c), int(o), float(v.real), float(v.imag))
        for r, c, o, v in zip(
            lattice.plaq_row, lattice.plaq_col, lattice.plaq_orient, field.values
        )
    ]


def chart_to_rows(chart: VortexChart, lattice: Lattice):
    """Rows of (row, col, winding, defined) at dual vertices."""
    C = lattice.cols
    return [
        (int(cell // C), int(cell % C), int(w), int(d))
        for cell, w, d in zip(chart.cells, chart.winding, chart.defined)
    ]
