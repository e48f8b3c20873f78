"""Annealing schedules and dimensionless model construction.

A schedule table maps the annealing parameter s to the Ising and
transverse-field energy scales in GHz.  Everything downstream of this module
works purely in the dimensionless products (beta*J, beta*Gamma); physical
units enter only here, through k_B * (1 mK) = 0.02084 GHz.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

KB_GHZ_PER_MK = 0.02084  # k_B * 1 mK expressed in GHz

SCHEDULE_HEADER = ["s", "J_GHz", "Gamma_GHz"]


class ScheduleError(ValueError):
    """Raised for malformed schedule tables or out-of-range lookups."""


@dataclass
class ScheduleTable:
    """Rows of (s, J_GHz, Gamma_GHz) with strictly increasing s."""

    s: np.ndarray
    J_GHz: np.ndarray
    Gamma_GHz: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=np.float64)
        self.J_GHz = np.asarray(self.J_GHz, dtype=np.float64)
        self.Gamma_GHz = np.asarray(self.Gamma_GHz, dtype=np.float64)
        if not (len(self.s) == len(self.J_GHz) == len(self.Gamma_GHz)):
            raise ScheduleError("schedule columns must have equal length")
        if len(self.s) < 2:
            raise ScheduleError("schedule needs at least two rows")
        if np.any(np.diff(self.s) <= 0):
            raise ScheduleError("schedule s column must be strictly increasing")
        if np.any(np.diff(self.J_GHz) < 0):
            raise ScheduleError("J_GHz must be nondecreasing in s")
        if np.any(np.diff(self.Gamma_GHz) > 0):
            raise ScheduleError("Gamma_GHz must be nonincreasing in s")
        if not (np.all(np.isfinite(self.J_GHz)) and np.all(np.isfinite(self.Gamma_GHz))):
            raise ScheduleError("schedule entries must be finite")

    @staticmethod
    def from_csv(path_or_text) -> "ScheduleTable":
        """Parse a `s,J_GHz,Gamma_GHz` CSV (path, file object, or text)."""
        if hasattr(path_or_text, "read"):
            fh = path_or_text
            rows = list(csv.reader(fh))
        else:
            text = str(path_or_text)
            if "\n" in text or "," in text:
                rows = list(csv.reader(io.StringIO(text)))
            else:
                with open(text, newline="") as fh:
                    rows = list(csv.reader(fh))
        rows = [r for r in rows if r and not r[0].lstrip().startswith("#")]
        if not rows or [c.strip() for c in rows[0]] != SCHEDULE_HEADER:
            raise ScheduleError(
                f"schedule CSV must start with header {','.join(SCHEDULE_HEADER)!r}"
            )
        body = rows[1:]
        try:
            data = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
        except ValueError as exc:
            raise ScheduleError(f"non-numeric schedule entry: {exc}") from exc
        if data.shape[1] != 3:
            raise ScheduleError("schedule rows must have exactly 3 columns")
        return ScheduleTable(data[:, 0], data[:, 1], data[:, 2])

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(SCHEDULE_HEADER)
        for row in zip(self.s, self.J_GHz, self.Gamma_GHz):
            writer.writerow([f"{v:.9g}" for v in row])
        return out.getvalue()


def schedule_lookup(table: ScheduleTable, s: float) -> tuple[float, float]:
    """Piecewise-linear interpolation of (J_GHz, Gamma_GHz) at s."""
    if not (table.s[0] <= s <= table.s[-1]):
        raise ScheduleError(
            f"s={s} outside schedule range [{table.s[0]}, {table.s[-1]}]"
        )
    J = float(np.interp(s, table.s, table.J_GHz))
    G = float(np.interp(s, table.s, table.Gamma_GHz))
    return J, G


@dataclass
class TFIMModel:
    """A dimensionless transverse-field Ising model instance.

    `beta_J` holds the product beta * J_ij per coupler and `beta_Gamma` the
    product beta * Gamma; `beta` fixes the length of the imaginary-time circle
    worldline configurations live on (1.0 in dimensionless mode).  Optional
    longitudinal fields are beta * h_i.
    """

    num_sites: int
    coupler_i: np.ndarray
    coupler_j: np.ndarray
    beta_J: np.ndarray
    beta_Gamma: float
    beta: float = 1.0
    beta_h: np.ndarray | None = None
    lattice: object = None
    T_mK: float | None = None
    s: float | None = None

    def __post_init__(self):
        self.coupler_i = np.asarray(self.coupler_i, dtype=np.int32)
        self.coupler_j = np.asarray(self.coupler_j, dtype=np.int32)
        self.beta_J = np.asarray(self.beta_J, dtype=np.float64)
        if self.beta_Gamma < 0:
            raise ValueError("beta_Gamma must be nonnegative")
        if not np.all(np.isfinite(self.beta_J)):
            raise ValueError("couplings must be finite")
        if self.beta_h is None:
            self.beta_h = np.zeros(self.num_sites, dtype=np.float64)
        else:
            self.beta_h = np.asarray(self.beta_h, dtype=np.float64)
            if len(self.beta_h) != self.num_sites:
                raise ValueError("beta_h length must match number of sites")

    @property
    def J(self) -> np.ndarray:
        """Couplings per unit imaginary time on the [0, beta) circle."""
        return self.beta_J / self.beta

    @property
    def Gamma(self) -> float:
        return self.beta_Gamma / self.beta

    @property
    def h(self) -> np.ndarray:
        return self.beta_h / self.beta

    def with_temperature(self, factor: float) -> "TFIMModel":
        """Model at temperature scaled by `factor` (beta divided by it)."""
        return TFIMModel(
            num_sites=self.num_sites,
            coupler_i=self.coupler_i,
            coupler_j=self.coupler_j,
            beta_J=self.beta_J / factor,
            beta_Gamma=self.beta_Gamma / factor,
            beta=self.beta / factor,
            beta_h=self.beta_h / factor,
            lattice=self.lattice,
            T_mK=None if self.T_mK is None else self.T_mK * factor,
            s=self.s,
        )


def dimensionless_model(
    lattice,
    beta_J: float,
    beta_Gamma: float,
    beta: float = 1.0,
    beta_h: np.ndarray | None = None,
) -> TFIMModel:
    """Model from a lattice with couplings scaled by a common beta*J factor."""
    ci, cj, strength = lattice.coupler_arrays()
    return TFIMModel(
        num_sites=lattice.num_sites,
        coupler_i=ci,
        coupler_j=cj,
        beta_J=strength * beta_J,
        beta_Gamma=beta_Gamma,
        beta=beta,
        beta_h=beta_h,
        lattice=lattice,
    )


def model_from_couplers(
    num_sites: int,
    couplers: list[tuple[int, int, float]],
    beta_Gamma: float,
    beta: float = 1.0,
    beta_h: np.ndarray | None = None,
) -> TFIMModel:
    """Ad-hoc model over an explicit coupler list (beta*J values)."""
    if couplers:
        ci = np.array([c[0] for c in couplers], dtype=np.int32)
        cj = np.array([c[1] for c in couplers], dtype=np.int32)
        bJ = np.array([c[2] for c in couplers], dtype=np.float64)
    else:
        ci = np.empty(0, dtype=np.int32)
        cj = np.empty(0, dtype=np.int32)
        bJ = np.empty(0, dtype=np.float64)
    return TFIMModel(
        num_sites=num_sites,
        coupler_i=ci,
        coupler_j=cj,
        beta_J=bJ,
        beta_Gamma=beta_Gamma,
        beta=beta,
        beta_h=beta_h,
    )


def model_at(lattice, table: ScheduleTable, s: float, T_mK: float) -> TFIMModel:
    """Dimensionless model at annealing parameter s and temperature T (mK).

    beta*J = J_GHz(s) / (k_B T) with k_B * (1 mK) = 0.02084 GHz; coupler signs
    and magnitudes come from the lattice, the time circle length is the
    physical beta in 1/GHz units.
    """
    if T_mK <= 0:
        raise ScheduleError(f"temperature must be positive, got {T_mK} mK")
    J_GHz, Gamma_GHz = schedule_lookup(table, s)
    kT = KB_GHZ_PER_MK * T_mK
    ci, cj, strength = lattice.coupler_arrays()
    return TFIMModel(
        num_sites=lattice.num_sites,
        coupler_i=ci,
        coupler_j=cj,
        beta_J=strength * (J_GHz / kT),
        beta_Gamma=Gamma_GHz / kT,
        beta=1.0 / kT,
        lattice=lattice,
        T_mK=T_mK,
        s=s,
    )
