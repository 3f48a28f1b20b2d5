"""Exact wave-packet-train states of the 1D harmonic oscillator, with numerical checks."""
from .oscillator import InvalidParametersError, OscillatorParams, conserved, pure_soliton
from .packet import ComplexField, TrainSpec, energy_level, psi_axial, psi_full

__version__ = "0.1.0"

__all__ = [
    "ComplexField",
    "InvalidParametersError",
    "OscillatorParams",
    "TrainSpec",
    "conserved",
    "energy_level",
    "psi_axial",
    "psi_full",
    "pure_soliton",
]
