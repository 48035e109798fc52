"""Painleve II-VI: Hamiltonians, linear problems and generalized Okubo data."""

from .builders import (
    OkuboData,
    coalescence_table,
    default_state,
    gauge_distance,
    okubo_data,
    okubo_frame,
    okubo_path,
    pv_time_dictionary,
    time_direction,
)
from .core import KINDS, PainleveState, flow, gradient, hamiltonian
from .linear import linear_problem, mobius_twist, pvi_residues, random_pvi_residues, rank4_problem

__all__ = [
    "KINDS",
    "PainleveState",
    "hamiltonian",
    "gradient",
    "flow",
    "linear_problem",
    "rank4_problem",
    "mobius_twist",
    "pvi_residues",
    "random_pvi_residues",
    "OkuboData",
    "okubo_data",
    "okubo_frame",
    "okubo_path",
    "time_direction",
    "gauge_distance",
    "pv_time_dictionary",
    "coalescence_table",
    "default_state",
]
