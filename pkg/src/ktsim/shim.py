"""Degeneracy shim: gradient-descent nulling of magnetization and
frustration-probability asymmetries.

The lattice symmetries dictate zero mean magnetization per site and equal
frustration probability within each rotation-equivalence class of AFM
couplers.  The shim iteratively nudges per-site offset knobs against measured
magnetizations and per-coupler scale knobs against within-class frustration
deviations on any sampler that exposes such knobs additively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice, SymmetryClasses


@dataclass
class ShimReport:
    offsets: np.ndarray
    coupler_scale: np.ndarray
    max_abs_magnetization: list[float]  # per round, before adjustments
    class_spread: list[float]  # max within-class frustration spread per round
    converged: bool
    warning: str | None = None


class KnobbedSampler:
    """Contract for shimmable samplers.

    `draw(offsets, coupler_scale, n_samples, rng)` returns (n_samples, N)
    ±1 arrays produced under per-site offset fields and per-coupler scale
    factors applied to the nominal couplers.
    """

    def draw(self, offsets, coupler_scale, n_samples, rng):  # pragma: no cover
        raise NotImplementedError


def frustration_probability(samples: np.ndarray, lattice: Lattice) -> np.ndarray:
    """Per-coupler probability that the coupler is frustrated (J s s > 0)."""
    ci, cj, J = lattice.coupler_arrays()
    prod = samples[:, ci] * samples[:, cj]
    return np.mean(np.sign(J)[None, :] * prod > 0, axis=0)


def degeneracy_shim(
    sampler: KnobbedSampler,
    lattice: Lattice,
    classes: SymmetryClasses,
    rng: np.random.Generator,
    rounds: int = 20,
    step: float = 0.5,
    samples_per_round: int = 512,
) -> ShimReport:
    """Iteratively null sampler bias; returns knobs plus a residual report.

    Offsets move against measured magnetizations (target <s_i> = 0); coupler
    scales move against within-class frustration-probability deviations.
    With step 0 this is the identity.  If the magnetization residual stops
    improving before the round cap, the best knobs seen are returned with a
    warning.
    """
    n = lattice.num_sites
    offsets = np.zeros(n)
    scale = np.ones(lattice.num_couplers)
    mag_history: list[float] = []
    spread_history: list[float] = []
    best = None

    for round_idx in range(rounds):
        samples = sampler.draw(offsets, scale, samples_per_round, rng)
        mags = samples.mean(axis=0)
        frus = frustration_probability(samples, lattice)

        spreads = []
        for members in classes.classes:
            f = frus[members]
            spreads.append(float(f.max() - f.min()))
        mag_history.append(float(np.max(np.abs(mags))))
        spread_history.append(float(np.max(spreads)))

        if best is None or mag_history[-1] <= best[0]:
            best = (mag_history[-1], offsets.copy(), scale.copy())

        offsets = offsets - step * mags
        for members in classes.classes:
            f = frus[members]
            mean_f = f.mean()
            # under-frustrated couplers are too strong relative to their class
            scale[members] = scale[members] * (1.0 + step * (f - mean_f))

    samples = sampler.draw(offsets, scale, samples_per_round, rng)
    mags = samples.mean(axis=0)
    final_mag = float(np.max(np.abs(mags)))
    if best is not None and final_mag > best[0]:
        _, offsets, scale = best
        return ShimReport(
            offsets=offsets,
            coupler_scale=scale,
            max_abs_magnetization=mag_history + [final_mag],
            class_spread=spread_history,
            converged=False,
            warning="magnetization residual stopped improving; returning best knobs",
        )
    return ShimReport(
        offsets=offsets,
        coupler_scale=scale,
        max_abs_magnetization=mag_history + [final_mag],
        class_spread=spread_history,
        converged=True,
    )
