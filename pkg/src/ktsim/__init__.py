"""Simulation toolkit for topological (Kosterlitz-Thouless) phenomena in
frustrated transverse-field Ising models.

Subsystems:

- ``lattice`` / ``embedding``: frustrated square-octagonal and triangular
  lattices, symmetry classes, Chimera qubit-graph embedding.
- ``schedule`` / ``susceptibility``: annealing-schedule tables, dimensionless
  model construction, background-susceptibility forward map and compensation.
- ``pimc``: continuous-time path-integral quantum Monte Carlo with
  Swendsen-Wang cluster updates, whole-chain updates, parallel tempering and
  an exact-diagonalization oracle.
- ``observables`` / ``quench``: pseudospin fields, complex order parameter,
  correlations, vortex winding charts, classical energies, local quench.
- ``estimators`` / ``shim``: chained-evolution sampling harness, dual-init
  estimates, bootstrap confidence intervals, degeneracy shim.
- ``scaling``: power-law fits, KT collapses, Binder crossing, phase diagram.
- ``cli``: configuration-driven experiment runner.
"""

__version__ = "0.1.0"

from .lattice import Lattice, build_lattice, symmetry_classes
from .schedule import ScheduleTable, TFIMModel, model_at, schedule_lookup
from .susceptibility import chi_forward, chi_compensate

__all__ = [
    "Lattice",
    "build_lattice",
    "symmetry_classes",
    "ScheduleTable",
    "TFIMModel",
    "model_at",
    "schedule_lookup",
    "chi_forward",
    "chi_compensate",
]
