import numpy as np
import pytest

from ktsim.lattice import build_lattice, symmetry_classes
from ktsim.shim import KnobbedSampler, degeneracy_shim, frustration_probability


class BiasedIndependentSampler(KnobbedSampler):
    """Independent spins with P(+) = sigmoid of (bias + offset); coupler
    knobs feed a per-coupler correlated jitter used for the spread test."""

    def __init__(self, lattice, bias, coupler_disorder=None):
        self.lattice = lattice
        self.bias = bias
        self.disorder = coupler_disorder

    def draw(self, offsets, coupler_scale, n_samples, rng):
        field = self.bias + offsets
        p_up = 1.0 / (1.0 + np.exp(-2.0 * field))
        samples = np.where(
            rng.random((n_samples, self.lattice.num_sites)) < p_up, 1, -1
        ).astype(np.int8)
        if self.disorder is not None:
            # correlated pair tweaks: align a coupler's endpoints with rate set
            # by its disorder/scale so frustration probabilities vary in-class
            ci, cj, J = self.lattice.coupler_arrays()
            eff = self.disorder * coupler_scale
            for e in np.flatnonzero(np.abs(eff - 1.0) > 1e-9):
                strength = np.clip(0.5 * (eff[e] - 1.0), -0.49, 0.49)
                mask = rng.random(n_samples) < abs(strength)
                sgn = -int(np.sign(J[e]) * np.sign(strength))
                samples[mask, cj[e]] = sgn * samples[mask, ci[e]]
        return samples


def test_unbiased_sampler_is_noop():
    lat = build_lattice("square_octagonal", 2, "cylindrical")
    classes = symmetry_classes(lat)
    sampler = BiasedIndependentSampler(lat, np.zeros(lat.num_sites))
    rng = np.random.default_rng(0)
    report = degeneracy_shim(sampler, lat, classes, rng, rounds=4,
                             samples_per_round=1024)
    assert np.max(np.abs(report.offsets)) < 0.08
    assert report.max_abs_magnetization[-1] < 0.12


def test_step_zero_is_identity():
    lat = build_lattice("square_octagonal", 2, "cylindrical")
    classes = symmetry_classes(lat)
    bias = np.full(lat.num_sites, 0.4)
    sampler = BiasedIndependentSampler(lat, bias)
    report = degeneracy_shim(
        sampler, lat, classes, np.random.default_rng(1), rounds=3, step=0.0,
        samples_per_round=256,
    )
    assert np.all(report.offsets == 0.0)
    assert np.all(report.coupler_scale == 1.0)


def test_injected_bias_is_nulled():
    lat = build_lattice("square_octagonal", 3, "cylindrical")
    classes = symmetry_classes(lat)
    rng = np.random.default_rng(2)
    bias = rng.uniform(0.25, 0.5, lat.num_sites) * rng.choice([-1, 1], lat.num_sites)
    sampler = BiasedIndependentSampler(lat, bias)
    report = degeneracy_shim(sampler, lat, classes, rng, rounds=25,
                             samples_per_round=4096)
    assert report.max_abs_magnetization[0] >= 0.2  # by construction
    assert report.max_abs_magnetization[-1] < 0.05


def test_class_spread_decreases_on_disordered_sampler():
    lat = build_lattice("square_octagonal", 2, "cylindrical")
    classes = symmetry_classes(lat)
    rng = np.random.default_rng(3)
    disorder = np.ones(lat.num_couplers)
    afm = np.arange(lat.num_fm, lat.num_couplers)
    disorder[afm] = 1.0 + rng.uniform(-0.5, 0.5, len(afm))
    sampler = BiasedIndependentSampler(lat, np.zeros(lat.num_sites), disorder)
    report = degeneracy_shim(sampler, lat, classes, rng, rounds=12,
                             samples_per_round=8192)
    assert report.class_spread[-1] < report.class_spread[0]


def test_knobs_outside_exposed_sets_untouched():
    lat = build_lattice("square_octagonal", 2, "cylindrical")
    classes = symmetry_classes(lat)
    sampler = BiasedIndependentSampler(lat, np.zeros(lat.num_sites))
    report = degeneracy_shim(sampler, lat, classes, np.random.default_rng(4),
                             rounds=3, samples_per_round=512)
    # FM couplers are not in any rotation class: their scale stays exactly 1
    assert np.all(report.coupler_scale[: lat.num_fm] == 1.0)


def test_frustration_probability_shape():
    lat = build_lattice("square_octagonal", 2, "cylindrical")
    rng = np.random.default_rng(5)
    samples = rng.choice(np.array([-1, 1], dtype=np.int8),
                         size=(64, lat.num_sites))
    f = frustration_probability(samples, lat)
    assert f.shape == (lat.num_couplers,)
    assert np.all((0 <= f) & (f <= 1))
