"""Simulation of the quantum cheque scheme on a small statevector engine."""

from .errors import (
    LedgerLookupError,
    MatrixError,
    ProtocolStateError,
    QChequeError,
    QubitIndexError,
    RegistryError,
    ShapeError,
    SizeError,
    UnitarityError,
)
from .gates import Circuit, CNOT, Gate1, Measure, circuit_unitary, gate_matrix
from .noise import NoiseParams, default_params, noisy_sample
from .simulator import sample_shots
from .statevector import ShotHistogram, StateVector, init_register

__version__ = "0.1.0"
