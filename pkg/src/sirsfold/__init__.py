"""Equilibrium, stability and saddle-node analysis of an SIRS model with capped treatment."""

from .model import RawParams, Regime, ScaledSat, ScaledSub, nondimensionalize, load_params, ParameterError
from .equilibria import Equilibrium, EquilibriumCatalog, Multiplicity, ExistenceCase, catalog
from .stability import Label, StabilityReport, classify, dulac_certificate
from .bifurcation import e_sn, sotomayor, scan
from .simulate import integrate, Trajectory

__all__ = [
    "RawParams",
    "Regime",
    "ScaledSat",
    "ScaledSub",
    "nondimensionalize",
    "load_params",
    "ParameterError",
    "Equilibrium",
    "EquilibriumCatalog",
    "Multiplicity",
    "ExistenceCase",
    "catalog",
    "Label",
    "StabilityReport",
    "classify",
    "dulac_certificate",
    "e_sn",
    "sotomayor",
    "scan",
    "integrate",
    "Trajectory",
]
