"""Exact energy-momentum spectra of Galilean-boosted Bose gases.

Submodules
----------
exact         Laurent polynomials in pi with exact sign decisions
lattice       momentum lattices, velocity snapping, box sequences
points        energy-momentum points and their JSON/CSV encodings
girardeau     hard-core bosons via free fermions: closed forms and oracle
hyl           Huang-Yang-Luttinger and mean-field occupation models
metastability Landau velocity, subspace filters, NESS and superfluid verdicts
thermolimit   sweeps, label-matched trajectories, limit points
verify        the desk-scale verification suite
"""
from .exact import PI, Exact
from .lattice import (
    BoxSpec,
    DensitySpec,
    LatticeMomentum,
    LatticeVelocity,
    lattice_momenta,
    snap_velocity,
    thermo_sequence,
)
from .points import EigenPoint

__all__ = [
    "PI",
    "Exact",
    "BoxSpec",
    "DensitySpec",
    "LatticeMomentum",
    "LatticeVelocity",
    "lattice_momenta",
    "snap_velocity",
    "thermo_sequence",
    "EigenPoint",
]

__version__ = "0.1.0"
