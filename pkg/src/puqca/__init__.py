"""Partitioned unitary quantum cellular automata for density classification."""

from .dct import ClassifierSpec, FitnessReport, classical_bound, fitness, majority
from .kernels import BACKEND
from .model import (
    IDENTITY_RULE,
    FermionRule,
    GateParams,
    PUQCARule,
    gate_matrix,
    parse_rule,
    serialize_rule,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClassifierSpec",
    "FermionRule",
    "FitnessReport",
    "GateParams",
    "IDENTITY_RULE",
    "PUQCARule",
    "classical_bound",
    "fitness",
    "gate_matrix",
    "majority",
    "parse_rule",
    "serialize_rule",
]
