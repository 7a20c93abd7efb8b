"""Retrieval of unrecorded-measurement data for odd-prime qudits."""
from .collective import MesFamily, MesLabel, gamma_basis, mes_state
from .mub import COMPUTATIONAL, Computational, MubIndex, Shifted, k_op, mub_basis, mub_vector
from .protocol import (
    ComputationalBasis,
    ControlOutcome,
    ShiftedBasis,
    Undetermined,
    UrmRecord,
    control_measure,
    infer_basis,
    infer_outcome,
    run_urm,
)
from .zmod import FieldElem, PrimeModulus, half

__version__ = "0.1.0"

__all__ = [
    "COMPUTATIONAL", "Computational", "ComputationalBasis", "ControlOutcome", "FieldElem",
    "MesFamily", "MesLabel", "MubIndex", "PrimeModulus", "Shifted", "ShiftedBasis",
    "Undetermined", "UrmRecord", "control_measure", "gamma_basis", "half", "infer_basis",
    "infer_outcome", "k_op", "mes_state", "mub_basis", "mub_vector", "run_urm",
]
