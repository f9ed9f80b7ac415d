"""Exactly solvable position-dependent-mass Schrodinger equations.

A mass ``M(x) = f(x)^-2`` with ``f = 1 + g`` turns the kinetic operator
into ``-(sqrt(f) d/dx sqrt(f))^2``. When ``g`` is chosen inside one of
three superpotential classes, a deformed shape-invariance condition still
closes, giving closed-form spectra and wavefunctions. This package builds
those objects, catalogs the solvable models, and checks every claim
against an independent finite-difference eigensolver.

Modules
-------
deformation      ambiguity parameters, ``f``, ``M``, ordering correction
superpotential   the three function classes and their deforming functions
si_engine        coefficient-matched shape-invariance stepping, energies
wavefunctions    polynomials, integrating factor, assembled ``psi_n``
catalog          the ten solvable models and three excluded ones
numeric          flat-coordinate Sturm-bisection oracle
cli              ``pdm`` command-line interface
"""
from .catalog import ACTIVE_MODELS, EXCLUDED_MODELS, PotentialModel, get_model, list_models
from .deformation import AmbiguityParams, DeformationSpec, Interval
from .errors import (
    ConstructionError,
    DomainError,
    NoSuchLevelError,
    ParameterError,
    PDMError,
    PositivityError,
    SIUnsolvableError,
)
from .numeric import numeric_spectrum, verify_model
from .si_engine import SIParameterTrack, SpectrumResult, energy_from_track
from .wavefunctions import WavefunctionBundle, assemble_psi

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_MODELS",
    "EXCLUDED_MODELS",
    "AmbiguityParams",
    "ConstructionError",
    "DeformationSpec",
    "DomainError",
    "Interval",
    "NoSuchLevelError",
    "ParameterError",
    "PDMError",
    "PositivityError",
    "PotentialModel",
    "SIParameterTrack",
    "SIUnsolvableError",
    "SpectrumResult",
    "WavefunctionBundle",
    "assemble_psi",
    "energy_from_track",
    "get_model",
    "list_models",
    "numeric_spectrum",
    "verify_model",
]
