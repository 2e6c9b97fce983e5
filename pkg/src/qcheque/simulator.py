"""Shot-based circuit execution.

All shots are simulated together as one batch of statevectors. The random
streams for a run are the three children of ``SeedSequence(seed)``:

* child 0 - measurement outcomes, drawn up front as a ``(shots, n_bits)``
  uniform array (shot-major, then measurement order);
* child 1 - gate errors, one ``shots``-long uniform vector per noisy wire per op;
* child 2 - readout flips, one ``(shots, n_bits)`` uniform array.

Keeping the streams separate makes the noiseless limit of a noisy run draw
exactly the same measurement uniforms as an ideal run.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import QubitIndexError
from .gates import CNOT, Circuit, Gate1, Measure, gate_matrix
from .statevector import (
    BASIS_CHANGE,
    ShotHistogram,
    StateVector,
    apply_1q_tensor,
    apply_cnot_tensor,
    collapse_tensor,
    prob_one_tensor,
)

# Probabilities below this are treated as exact zeros (float dust from T/H products).
PROB_FLOOR = 1e-14

_PAULIS = [gate_matrix("X"), gate_matrix("Y"), gate_matrix("Z")]


def _streams(seed: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def _depolarize(t: np.ndarray, q: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Apply X, Y or Z (each with probability p/3) to wire q, independently per shot."""
    u = rng.random(t.shape[0])
    if p <= 0:
        return t
    kind = np.where(u < p, np.minimum((u / (p / 3)).astype(int), 2), -1)
    for k, pauli in enumerate(_PAULIS):
        rows = np.nonzero(kind == k)[0]
        if rows.size:
            t[rows] = apply_1q_tensor(t[rows], pauli, q)
    return t


def _sample_marginal(t: np.ndarray, qubits: list[int], u: np.ndarray) -> np.ndarray:
    """Sequentially sample ``qubits`` (in order) from each row of ``t``.

    ``t`` may hold one row (broadcast to every shot) or one row per shot.
    Bit k of shot s is 1 iff ``u[s, k] < P(bit k = 1 | earlier bits)``.
    """
    shots = u.shape[0]
    n = t.ndim - 1
    probs = np.abs(t) ** 2
    others = tuple(a + 1 for a in range(n) if a not in qubits)
    table = probs.sum(axis=others) if others else probs
    # order the remaining axes as in ``qubits``
    kept = sorted(qubits)
    table = np.moveaxis(table, [1 + kept.index(q) for q in qubits], list(range(1, len(qubits) + 1)))
    table = table.reshape(table.shape[0], -1)
    table = np.where(table < PROB_FLOOR, 0.0, table)
    rows = np.arange(shots) if table.shape[0] == shots else np.zeros(shots, dtype=int)
    bits = np.zeros((shots, len(qubits)), dtype=np.int8)
    cur = table[rows] if table.shape[0] == shots else table
    for k in range(len(qubits)):
        cur = cur.reshape(cur.shape[0], 2, -1)
        mass = cur.sum(axis=2)
        total = mass.sum(axis=1)
        p1 = np.divide(mass[:, 1], total, out=np.zeros_like(total), where=total > 0)
        if cur.shape[0] == 1:
            p1 = np.broadcast_to(p1, (shots,))
        b = (u[:, k] < p1).astype(np.int8)
        bits[:, k] = b
        if cur.shape[0] == 1:
            cur = cur[np.zeros(shots, dtype=int), b]
        else:
            cur = cur[np.arange(shots), b]
    return bits


def execute(
    circuit: Circuit,
    measured: Iterable[int],
    shots: int,
    seed: int,
    initial: StateVector | None = None,
    p1: float = 0.0,
    p2: float = 0.0,
    p_read: float = 0.0,
) -> np.ndarray:
    """Run ``shots`` trajectories; returns a ``(shots, n_bits)`` int8 array.

    Recorded bits are the in-circuit ``Measure`` results in program order,
    followed by a final computational readout of ``measured`` (ascending).
    """
    if not isinstance(shots, (int, np.integer)) or shots <= 0:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    n = circuit.n_qubits
    final = sorted(set(measured))
    for q in final:
        if not 0 <= q < n:
            raise QubitIndexError(f"measured qubit {q} outside {n}-qubit circuit")
    if initial is None:
        t = np.zeros((1,) + (2,) * n, dtype=complex)
        t.flat[0] = 1
    else:
        if initial.n_qubits != n:
            raise QubitIndexError(f"initial state has {initial.n_qubits} qubits, circuit has {n}")
        t = initial.amps.reshape((1,) + (2,) * n).copy()

    n_mid = sum(isinstance(op, Measure) for op in circuit.ops)
    n_bits = n_mid + len(final)
    rng_meas, rng_noise, rng_read = _streams(seed)
    u = rng_meas.random((shots, n_bits))
    noisy_gates = p1 > 0 or p2 > 0
    if noisy_gates:
        t = np.repeat(t, shots, axis=0)

    bits = np.zeros((shots, n_bits), dtype=np.int8)
    col = 0
    for op in circuit.ops:
        if isinstance(op, Gate1):
            t = apply_1q_tensor(t, op.matrix, op.q)
            if noisy_gates:
                t = _depolarize(t, op.q, p1, rng_noise)
        elif isinstance(op, CNOT):
            t = apply_cnot_tensor(t, op.control, op.target)
            if noisy_gates:
                t = _depolarize(t, op.control, p2, rng_noise)
                t = _depolarize(t, op.target, p2, rng_noise)
        elif isinstance(op, Measure):
            if t.shape[0] != shots:
                t = np.repeat(t, shots, axis=0)
            change = BASIS_CHANGE[op.basis]
            t = apply_1q_tensor(t, change, op.q)
            pone = prob_one_tensor(t, op.q)
            pone = np.where(pone < PROB_FLOOR, 0.0, np.where(pone > 1 - PROB_FLOOR, 1.0, pone))
            b = (u[:, col] < pone).astype(np.int8)
            t = collapse_tensor(t, op.q, b, pone)
            t = apply_1q_tensor(t, change.conj().T, op.q)
            bits[:, col] = b
            col += 1
        else:
            raise TypeError(f"unsupported op {op!r}")

    if final:
        bits[:, col:] = _sample_marginal(t, final, u[:, col:])
    if p_read > 0:
        flips = rng_read.random((shots, n_bits)) < p_read
        bits ^= flips.astype(np.int8)
    return bits


def histogram(bits: np.ndarray) -> ShotHistogram:
    shots = bits.shape[0]
    if bits.shape[1] == 0:
        return ShotHistogram(shots, {"": shots})
    weights = 1 << np.arange(bits.shape[1] - 1, -1, -1)
    codes = bits.astype(np.int64) @ weights
    values, counts = np.unique(codes, return_counts=True)
    width = bits.shape[1]
    return ShotHistogram(shots, {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, counts)})


def sample_shots(
    circuit: Circuit,
    measured: Iterable[int],
    shots: int,
    seed: int,
    initial: StateVector | None = None,
) -> ShotHistogram:
    """Ideal execution of ``shots`` independent runs of ``circuit``.

    Deterministic for a fixed ``(circuit, measured, shots, seed, initial)``.
    """
    return histogram(execute(circuit, measured, shots, seed, initial))
