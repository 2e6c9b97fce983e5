"""Dense statevector register.

Basis convention: qubit 0 is the most significant bit of a basis label, so the
amplitude of ``|q0 q1 ... q(n-1)>`` sits at index ``int("q0q1...", 2)``.
Internally a register is viewed as a tensor of shape ``(2,) * n`` with axis
``q`` belonging to qubit ``q``; batched kernels prepend one leading axis.

Randomness: every sampling routine takes a ``numpy.random.Generator`` (PCG64).
Integer seeds are turned into generators through ``numpy.random.SeedSequence``;
see :func:`derive_seed` for the rule used to split one seed into sub-seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import QubitIndexError, ShapeError, SizeError, UnitarityError

MAX_QUBITS = 24
ALGEBRA_TOL = 1e-10

# Basis changes applied before a computational readout, outcome 0 <-> |+>, |+i>, |0>.
_INV_SQRT2 = 1 / np.sqrt(2)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
BASIS_CHANGE = {
    "computational": np.eye(2, dtype=complex),
    "hadamard": _H,
    "ybasis": _H @ _SDG,
}
BASIS_ALIASES = {"Z": "computational", "X": "hadamard", "Y": "ybasis"}


def canonical_basis(basis: str) -> str:
    name = BASIS_ALIASES.get(basis, basis)
    if name not in BASIS_CHANGE:
        raise ValueError(f"unknown measurement basis {basis!r}")
    return name


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic 63-bit sub-seed for the child ``path`` of ``seed``.

    Uses ``SeedSequence(seed, spawn_key=path)``, i.e. the same tree numpy builds
    with ``SeedSequence(seed).spawn``.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def check_unitary(u: np.ndarray, tol: float = ALGEBRA_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise UnitarityError(f"gate matrix must be square, got shape {u.shape}")
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > tol:
        raise UnitarityError(f"gate matrix is not unitary (max deviation {dev:.3g})")
    return u


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes of an ``n_qubits`` register."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise SizeError(f"register width must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n_qubits:
            raise ShapeError(f"expected {2**self.n_qubits} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > ALGEBRA_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.shape[0]))) if amps.shape[0] else 0
        if 2**n != amps.shape[0]:
            raise ShapeError(f"amplitude count {amps.shape[0]} is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def basis_state(cls, bits: str) -> "StateVector":
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(len(bits), amps)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n_qubits)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def kron(self, other: "StateVector") -> "StateVector":
        """``self ⊗ other``; ``other``'s qubits are appended after ``self``'s."""
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amps, other.amps))

    def __repr__(self):
        nz = [f"{a:.4g}|{i:0{self.n_qubits}b}>" for i, a in enumerate(self.amps) if abs(a) > 1e-12]
        return f"StateVector({' + '.join(nz)})"


def _check_qubit(n: int, q: int) -> int:
    if not isinstance(q, (int, np.integer)) or not 0 <= q < n:
        raise QubitIndexError(f"qubit index {q!r} out of range for {n}-qubit register")
    return int(q)


def _check_distinct(n: int, *qs: int) -> None:
    for q in qs:
        _check_qubit(n, q)
    if len(set(qs)) != len(qs):
        raise QubitIndexError(f"qubit indices must be distinct, got {qs}")


# --- batched tensor kernels -------------------------------------------------
# ``t`` has shape (B, 2, ..., 2); axis q + 1 belongs to qubit q.


def apply_1q_tensor(t: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    out = np.tensordot(u, t, axes=([1], [q + 1]))
    return np.moveaxis(out, 0, q + 1)


def apply_cnot_tensor(t: np.ndarray, control: int, target: int) -> np.ndarray:
    out = t.copy()
    idx = [slice(None)] * t.ndim
    idx[control + 1] = 1
    idx = tuple(idx)
    # axis of the target inside the control=1 slice
    axis = target + 1 if target < control else target
    out[idx] = np.flip(t[idx], axis=axis)
    return out


def prob_one_tensor(t: np.ndarray, q: int) -> np.ndarray:
    """P(qubit q = 1) for every batch row."""
    p = np.abs(np.take(t, 1, axis=q + 1)) ** 2
    return p.reshape(p.shape[0], -1).sum(axis=1)


def collapse_tensor(t: np.ndarray, q: int, bits: np.ndarray, p_one: np.ndarray) -> np.ndarray:
    """Project row ``b`` onto ``qubit q = bits[b]`` and renormalize."""
    shape = [1] * t.ndim
    shape[0] = t.shape[0]
    shape[q + 1] = 2
    keep = np.zeros((t.shape[0], 2), dtype=bool)
    keep[np.arange(t.shape[0]), bits.astype(int)] = True
    prob = np.where(bits == 1, p_one, 1 - p_one)
    scale = np.where(prob > 0, 1 / np.sqrt(np.where(prob > 0, prob, 1)), 0)
    return t * keep.reshape(shape) * scale.reshape((-1,) + (1,) * (t.ndim - 1))


# --- single-state operations -------------------------------------------------


def init_register(n: int) -> StateVector:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise SizeError(f"register width must be in [1, {MAX_QUBITS}], got {n!r}")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1
    return StateVector(int(n), amps)


def apply_1q(state: StateVector, u, q: int) -> StateVector:
    u = check_unitary(u)
    if u.shape != (2, 2):
        raise UnitarityError(f"single-qubit gate must be 2x2, got {u.shape}")
    q = _check_qubit(state.n_qubits, q)
    t = apply_1q_tensor(state.tensor()[None], u, q)
    return StateVector(state.n_qubits, t.reshape(-1))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_distinct(state.n_qubits, control, target)
    t = apply_cnot_tensor(state.tensor()[None], control, target)
    return StateVector(state.n_qubits, t.reshape(-1))


def prob_one(state: StateVector, q: int) -> float:
    q = _check_qubit(state.n_qubits, q)
    return float(prob_one_tensor(state.tensor()[None], q)[0])


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective Z measurement. One uniform draw: outcome 1 iff ``u < P(1)``."""
    q = _check_qubit(state.n_qubits, q)
    t = state.tensor()[None]
    p1 = prob_one_tensor(t, q)
    bit = int(rng.random() < p1[0])
    post = collapse_tensor(t, q, np.array([bit]), p1)
    return bit, StateVector(state.n_qubits, post.reshape(-1))


def measure_in_basis(state: StateVector, q: int, basis: str, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Measure in the Z, X (``hadamard``) or Y (``ybasis``) eigenbasis.

    Outcome 0 means |0>, |+> or |+i>. The post-measurement state is returned in
    the original frame, i.e. the measured qubit is left in the observed eigenstate.
    """
    change = BASIS_CHANGE[canonical_basis(basis)]
    rotated = apply_1q(state, change, q)
    bit, post = measure_qubit(rotated, q, rng)
    return bit, apply_1q(post, change.conj().T, q)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"width mismatch: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amps, b.amps))


def reduced_density_1q(state: StateVector, q: int) -> np.ndarray:
    """Partial trace over every qubit except ``q``; a 2x2 complex matrix."""
    q = _check_qubit(state.n_qubits, q)
    m = np.moveaxis(state.tensor(), q, 0).reshape(2, -1)
    return m @ m.conj().T


def phase_normalized(state: StateVector) -> np.ndarray:
    """Amplitudes with the phase of the largest-magnitude amplitude divided out."""
    k = int(np.argmax(np.abs(state.amps)))
    a = state.amps[k]
    return state.amps * (abs(a) / a)


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = ALGEBRA_TOL) -> bool:
    if a.n_qubits != b.n_qubits:
        return False
    return bool(np.max(np.abs(phase_normalized(a) - phase_normalized(b))) < tol)


@dataclass(frozen=True)
class ShotHistogram:
    """Outcome counts keyed by classical bitstrings (one character per recorded bit)."""

    shots: int
    counts: Mapping[str, int]

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative count")

    def probability(self, key: str) -> float:
        return self.counts.get(key, 0) / self.shots

    def marginal(self, position: int, bit: str = "0") -> float:
        """Frequency of ``bit`` at character ``position`` of the key."""
        hits = sum(c for k, c in self.counts.items() if k[position] == bit)
        return hits / self.shots

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": dict(sorted(self.counts.items()))}
