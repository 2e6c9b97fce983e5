"""Gate set, circuit container and the circuit constructions used by the cheque scheme."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import QubitIndexError, SizeError
from .statevector import (
    StateVector,
    _check_distinct,
    apply_cnot,
    apply_1q,
    canonical_basis,
    measure_qubit,
)

FIXED_GATES = ("I", "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg")
ROTATION_GATES = ("RY", "RZ")

_S2 = 1 / np.sqrt(2)
_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "Tdg": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}
for _m in _MATRICES.values():
    _m.setflags(write=False)


def gate_matrix(name: str, angle: float | None = None) -> np.ndarray:
    """2x2 matrix of a named gate. ``RY``/``RZ`` take an angle in radians."""
    if name in _MATRICES:
        return _MATRICES[name]
    if name == "RY":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "RZ":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)
    raise ValueError(f"unknown gate {name!r}")


@dataclass(frozen=True)
class Gate1:
    name: str
    q: int
    angle: float | None = None

    def __post_init__(self):
        if self.name in ROTATION_GATES:
            if self.angle is None:
                raise ValueError(f"{self.name} needs an angle")
        elif self.name not in FIXED_GATES:
            raise ValueError(f"unknown gate {self.name!r}")

    @property
    def qubits(self):
        return (self.q,)

    @property
    def matrix(self) -> np.ndarray:
        return gate_matrix(self.name, self.angle)


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise QubitIndexError("CNOT control and target must differ")

    @property
    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True)
class Measure:
    q: int
    basis: str = "computational"

    def __post_init__(self):
        object.__setattr__(self, "basis", canonical_basis(self.basis))

    @property
    def qubits(self):
        return (self.q,)


GateOp = Union[Gate1, CNOT, Measure]

_BASIS_TAG = {"computational": "Z", "hadamard": "X", "ybasis": "Y"}


@dataclass(frozen=True)
class Circuit:
    """An immutable ordered list of operations on ``n_qubits`` wires."""

    n_qubits: int
    ops: tuple = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise SizeError("a circuit needs at least one qubit")
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.n_qubits:
                    raise QubitIndexError(f"{op} touches qubit {q} outside {self.n_qubits}-qubit circuit")

    @classmethod
    def build(cls, ops: Iterable[GateOp], n_qubits: int | None = None) -> "Circuit":
        ops = tuple(ops)
        width = max((q for op in ops for q in op.qubits), default=0) + 1
        return cls(max(width, n_qubits or 1), ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.n_qubits, other.n_qubits), self.ops + other.ops)

    def __len__(self):
        return len(self.ops)

    def widen(self, n_qubits: int) -> "Circuit":
        return Circuit(max(n_qubits, self.n_qubits), self.ops)

    def relabel(self, mapping: dict[int, int], n_qubits: int | None = None) -> "Circuit":
        """Move wire ``k`` to ``mapping[k]``."""

        def move(op):
            if isinstance(op, Gate1):
                return Gate1(op.name, mapping[op.q], op.angle)
            if isinstance(op, CNOT):
                return CNOT(mapping[op.control], mapping[op.target])
            return Measure(mapping[op.q], op.basis)

        return Circuit.build((move(op) for op in self.ops), n_qubits)

    @property
    def has_measurements(self) -> bool:
        return any(isinstance(op, Measure) for op in self.ops)

    def to_text(self) -> str:
        lines = []
        for op in self.ops:
            if isinstance(op, Gate1):
                tail = f" {op.angle!r}" if op.angle is not None else ""
                lines.append(f"{op.name} {op.q}{tail}")
            elif isinstance(op, CNOT):
                lines.append(f"CNOT {op.control} {op.target}")
            else:
                lines.append(f"MEASURE {op.q} {_BASIS_TAG[op.basis]}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "Circuit":
        ops = []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split("#", 1)[0].split()
            if not parts:
                continue
            head, args = parts[0], parts[1:]
            try:
                if head == "CNOT":
                    c, t = args
                    ops.append(CNOT(int(c), int(t)))
                elif head == "MEASURE":
                    q, *basis = args
                    ops.append(Measure(int(q), basis[0] if basis else "Z"))
                elif head in ROTATION_GATES:
                    q, angle = args
                    ops.append(Gate1(head, int(q), float(angle)))
                else:
                    (q,) = args
                    ops.append(Gate1(head, int(q)))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {line!r}: {exc}") from None
        return cls.build(ops, n_qubits)


def run_unitary(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Apply a measurement-free circuit to ``state`` (default |0...0>)."""
    if circuit.has_measurements:
        raise ValueError("run_unitary needs a circuit without measurements")
    if state is None:
        amps = np.zeros(2**circuit.n_qubits, dtype=complex)
        amps[0] = 1
        state = StateVector(circuit.n_qubits, amps)
    for op in circuit.ops:
        if isinstance(op, Gate1):
            state = apply_1q(state, op.matrix, op.q)
        else:
            state = apply_cnot(state, op.control, op.target)
    return state


# --- constructions ------------------------------------------------------------


def reversed_cnot_circuit(control: int, target: int) -> Circuit:
    """CNOT(control -> target) built from the opposite-direction CNOT and four Hadamards."""
    if control == target:
        raise QubitIndexError("control and target must differ")
    return Circuit.build([
        Gate1("H", control), Gate1("H", target),
        CNOT(target, control),
        Gate1("H", control), Gate1("H", target),
    ])


def swap_circuit(a: int, b: int) -> Circuit:
    if a == b:
        raise QubitIndexError("swap needs two distinct qubits")
    return Circuit.build([CNOT(a, b), CNOT(b, a), CNOT(a, b)])


def toffoli_ops(a: int, b: int, c: int) -> list:
    """Toffoli(a, b -> c) with 6 CNOTs and 7 T/T-dagger gates."""
    return [
        Gate1("H", c),
        CNOT(b, c), Gate1("Tdg", c),
        CNOT(a, c), Gate1("T", c),
        CNOT(b, c), Gate1("Tdg", c),
        CNOT(a, c), Gate1("T", b), Gate1("T", c),
        Gate1("H", c),
        CNOT(a, b), Gate1("T", a), Gate1("Tdg", b),
        CNOT(a, b),
    ]


def fredkin_circuit(ctrl: int, t1: int, t2: int) -> Circuit:
    """Controlled-SWAP of ``t1`` and ``t2`` from CNOTs and single-qubit gates."""
    if len({ctrl, t1, t2}) != 3:
        raise QubitIndexError(f"fredkin needs three distinct qubits, got {(ctrl, t1, t2)}")
    return Circuit.build([CNOT(t2, t1), *toffoli_ops(ctrl, t1, t2), CNOT(t2, t1)])


def psi_m_prep_circuit(q: int = 0) -> Circuit:
    """H, T, H, S on ``q``: |0> -> cos(pi/8)|0> + sin(pi/8)|1> up to global phase."""
    return Circuit.build([Gate1("H", q), Gate1("T", q), Gate1("H", q), Gate1("S", q)])


def ghz_prep_circuit(q0: int, q1: int, q2: int) -> Circuit:
    if len({q0, q1, q2}) != 3:
        raise QubitIndexError("GHZ preparation needs three distinct qubits")
    return Circuit.build([Gate1("H", q0), CNOT(q0, q1), CNOT(q0, q2)])


def circuit_unitary(c: Circuit, max_qubits: int = 10) -> np.ndarray:
    """Full 2^n x 2^n matrix of a measurement-free circuit, built from Kronecker embeddings."""
    if c.has_measurements:
        raise ValueError("circuit_unitary is undefined for circuits with measurements")
    n = c.n_qubits
    if n > max_qubits:
        raise SizeError(f"circuit too wide for a dense unitary ({n} > {max_qubits})")
    u = np.eye(2**n, dtype=complex)
    for op in c.ops:
        u = embed_op(op, n) @ u
    return u


def embed_op(op: GateOp, n: int) -> np.ndarray:
    if isinstance(op, Gate1):
        m = np.array([[1]], dtype=complex)
        for k in range(n):
            m = np.kron(m, op.matrix if k == op.q else np.eye(2))
        return m
    if isinstance(op, CNOT):
        dim = 2**n
        m = np.zeros((dim, dim), dtype=complex)
        cbit, tbit = 1 << (n - 1 - op.control), 1 << (n - 1 - op.target)
        for i in range(dim):
            j = i ^ tbit if i & cbit else i
            m[j, i] = 1
        return m
    raise ValueError(f"{op} has no unitary")


# --- Bell measurement -----------------------------------------------------------


class BellOutcome(enum.Enum):
    """Bell labels as used by the cheque scheme.

    PSI_PLUS/MINUS = (|00> +/- |11>)/sqrt2 and PHI_PLUS/MINUS = (|01> +/- |10>)/sqrt2.
    This is the reverse of the more common Phi/Psi naming.
    """

    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"
    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"


# (bit on q1 after H, bit on q2) -> label
BELL_FROM_BITS = {
    (0, 0): BellOutcome.PSI_PLUS,
    (1, 0): BellOutcome.PSI_MINUS,
    (0, 1): BellOutcome.PHI_PLUS,
    (1, 1): BellOutcome.PHI_MINUS,
}
BITS_FROM_BELL = {v: k for k, v in BELL_FROM_BITS.items()}

# Pauli applied to the partner wire after each Bell outcome.
BELL_CORRECTION = {
    BellOutcome.PSI_PLUS: "I",
    BellOutcome.PSI_MINUS: "Z",
    BellOutcome.PHI_PLUS: "X",
    BellOutcome.PHI_MINUS: "Y",
}


def bell_rotation(state: StateVector, q1: int, q2: int) -> StateVector:
    """CNOT(q1 -> q2) then H(q1): maps the Bell basis onto the computational basis."""
    _check_distinct(state.n_qubits, q1, q2)
    return apply_1q(apply_cnot(state, q1, q2), gate_matrix("H"), q1)


def bell_measure(state: StateVector, q1: int, q2: int, rng: np.random.Generator) -> tuple[BellOutcome, StateVector]:
    """Bell measurement of (q1, q2); the measured wires are left in |b1 b2>."""
    rotated = bell_rotation(state, q1, q2)
    b1, post = measure_qubit(rotated, q1, rng)
    b2, post = measure_qubit(post, q2, rng)
    return BELL_FROM_BITS[(b1, b2)], post
