"""Pauli-twirled gate noise and readout error on top of the shot simulator."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .gates import CNOT, Circuit, Gate1, embed_op
from .simulator import execute, histogram
from .statevector import ShotHistogram


@dataclass(frozen=True)
class NoiseParams:
    """Depolarizing probability after 1q gates (``p1``) and on both wires after a
    CNOT (``p2``), plus a per-bit readout flip probability (``p_read``)."""

    p1: float = 0.0
    p2: float = 0.0
    p_read: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def is_ideal(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.p_read == 0

    def to_dict(self) -> dict:
        return asdict(self)


# Frozen output of scripts/calibrate_noise.py (grid fit to the hardware rows of
# the cheque-generation and swap-test tables).
_DEFAULT = NoiseParams(p1=0.018, p2=0.020, p_read=0.01)


def default_params() -> NoiseParams:
    return _DEFAULT


def load_params(path: str | Path) -> NoiseParams:
    """Read ``p1``, ``p2``, ``p_read`` from a flat ``key = value`` text file."""
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key in ("p1", "p2", "p_read"):
            values[key] = float(value)
    return NoiseParams(**values)


def noisy_sample(
    circuit: Circuit,
    measured: Iterable[int],
    shots: int,
    seed: int,
    params: NoiseParams,
    initial=None,
) -> ShotHistogram:
    """Trajectory simulation with a random Pauli after every gate and readout flips."""
    bits = execute(circuit, measured, shots, seed, initial, params.p1, params.p2, params.p_read)
    return histogram(bits)


# --- exact channel evolution (calibration target and test oracle) -------------


def _pauli_channel(rho: np.ndarray, q: int, n: int, p: float) -> np.ndarray:
    if p == 0:
        return rho
    out = (1 - p) * rho
    for name in ("X", "Y", "Z"):
        e = embed_op(Gate1(name, q), n)
        out = out + (p / 3) * (e @ rho @ e.conj().T)
    return out


def expected_p0(circuit: Circuit, qubit: int, params: NoiseParams, initial=None) -> float:
    """Exact P(final readout of ``qubit`` = 0) under ``params`` via density-matrix evolution.

    Only measurement-free circuits are supported.
    """
    if circuit.has_measurements:
        raise ValueError("expected_p0 needs a measurement-free circuit")
    n = circuit.n_qubits
    if initial is None:
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1
    else:
        psi = initial.amps
    rho = np.outer(psi, psi.conj())
    for op in circuit.ops:
        u = embed_op(op, n)
        rho = u @ rho @ u.conj().T
        if isinstance(op, Gate1):
            rho = _pauli_channel(rho, op.q, n, params.p1)
        elif isinstance(op, CNOT):
            rho = _pauli_channel(rho, op.control, n, params.p2)
            rho = _pauli_channel(rho, op.target, n, params.p2)
    diag = np.real(np.diag(rho)).reshape((2,) * n)
    p0 = float(np.take(diag, 0, axis=qubit).sum())
    return (1 - params.p_read) * p0 + params.p_read * (1 - p0)
