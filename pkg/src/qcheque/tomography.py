"""Single-qubit state tomography by linear inversion of Pauli expectations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MatrixError, ShapeError
from .gates import Circuit, Gate1, gate_matrix, run_unitary
from .noise import NoiseParams
from .simulator import execute
from .statevector import StateVector, derive_seed, reduced_density_1q

MATRIX_TOL = 1e-9
MIN_EIGENVALUE = -0.05

_I2 = np.eye(2, dtype=complex)
_X, _Y, _Z = gate_matrix("X"), gate_matrix("Y"), gate_matrix("Z")

# Rotations taking the O eigenbasis onto the computational basis.
BASIS_ROTATIONS = {
    "X": [Gate1("H", 0)],
    "Y": [Gate1("Sdg", 0), Gate1("H", 0)],
    "Z": [],
}


class NonPhysicalWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix2:
    """A 2x2 Hermitian, unit-trace matrix. Slightly negative eigenvalues from
    sampled reconstructions are kept; check :attr:`is_physical`."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise MatrixError(f"expected a 2x2 matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > MATRIX_TOL:
            raise MatrixError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > MATRIX_TOL:
            raise MatrixError(f"density matrix trace is {np.trace(m).real:.6g}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def is_physical(self) -> bool:
        return bool(self.eigenvalues[0] >= -MATRIX_TOL)

    @property
    def bloch(self) -> tuple[float, float, float]:
        m = self.matrix
        return (2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real)

    def to_json(self, digits: int | None = None) -> dict:
        re, im = self.matrix.real, self.matrix.imag
        if digits is not None:
            re, im = np.round(re, digits) + 0.0, np.round(im, digits) + 0.0
        return {"re": re.tolist(), "im": im.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix2":
        return cls(np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float))

    def __repr__(self):
        return f"DensityMatrix2({np.array2string(self.matrix, precision=4)})"


@dataclass(frozen=True)
class PauliExpectations:
    ex: float
    ey: float
    ez: float

    def __post_init__(self):
        for name in ("ex", "ey", "ez"):
            v = getattr(self, name)
            if not -1 - MATRIX_TOL <= v <= 1 + MATRIX_TOL:
                raise ValueError(f"{name} = {v!r} is outside [-1, 1]")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.ex, self.ey, self.ez)


@dataclass(frozen=True)
class Comparison:
    fidelity: float
    trace_distance: float
    max_entry_dev: float

    def to_dict(self) -> dict:
        return {"fidelity": self.fidelity, "trace_distance": self.trace_distance, "max_entry_dev": self.max_entry_dev}


def basis_circuit(prep: Circuit, q: int, axis: str) -> Circuit:
    return prep + Circuit.build([Gate1(g.name, q) for g in BASIS_ROTATIONS[axis]])


def estimate_expectations(
    prep: Circuit,
    q: int,
    shots: int | None,
    seed: int = 0,
    noise: NoiseParams | None = None,
) -> PauliExpectations:
    """<X>, <Y>, <Z> of qubit ``q`` after ``prep``, each as P(0) - P(1).

    ``shots=None`` is exact mode: probabilities come straight from the
    statevector (noise is not supported there). Otherwise each axis is a separate
    experiment of ``shots`` shots seeded with ``derive_seed(seed, axis_index)``.
    """
    if shots is None:
        if noise is not None and not noise.is_ideal:
            raise ValueError("exact mode does not model noise")
        values = []
        for axis in "XYZ":
            state = run_unitary(basis_circuit(prep, q, axis))
            rho = reduced_density_1q(state, q)
            values.append(float((rho[0, 0] - rho[1, 1]).real))
        return PauliExpectations(*values)
    if shots <= 0:
        raise ValueError("shots must be positive")
    noise = noise or NoiseParams()
    values = []
    for k, axis in enumerate("XYZ"):
        bits = execute(basis_circuit(prep, q, axis), [q], shots, derive_seed(seed, k), None, noise.p1, noise.p2, noise.p_read)
        p1 = bits[:, -1].mean()
        values.append(float(1 - 2 * p1))
    return PauliExpectations(*values)


def reconstruct(e: PauliExpectations) -> DensityMatrix2:
    """(I + <X> X + <Y> Y + <Z> Z) / 2, reported as-is even if not positive."""
    for v in e.as_tuple():
        if not -1 - MATRIX_TOL <= v <= 1 + MATRIX_TOL:
            raise ValueError(f"expectation {v!r} is outside [-1, 1]")
    rho = DensityMatrix2((_I2 + e.ex * _X + e.ey * _Y + e.ez * _Z) / 2)
    if not rho.is_physical:
        warnings.warn(f"reconstructed state has eigenvalue {rho.eigenvalues[0]:.4f} < 0", NonPhysicalWarning, stacklevel=2)
    return rho


def theoretical_density(psi: StateVector) -> DensityMatrix2:
    if psi.n_qubits != 1:
        raise ShapeError("theoretical_density expects a single-qubit state")
    return DensityMatrix2(np.outer(psi.amps, psi.amps.conj()))


def fidelity(rho_a: DensityMatrix2, rho_b: DensityMatrix2) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.

    For qubits this equals Tr(ab) + 2 sqrt(det a det b), which avoids the
    square roots of near-zero eigenvalues that cost precision for pure states.
    """
    overlap = float(np.real(np.trace(rho_a.matrix @ rho_b.matrix)))
    dets = float(np.real(np.linalg.det(rho_a.matrix))) * float(np.real(np.linalg.det(rho_b.matrix)))
    return min(max(overlap + 2 * np.sqrt(max(dets, 0.0)), 0.0), 1.0)


def trace_distance(rho_a: DensityMatrix2, rho_b: DensityMatrix2) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho_a.matrix - rho_b.matrix))))


def compare(rho_a: DensityMatrix2, rho_b: DensityMatrix2) -> Comparison:
    for rho in (rho_a, rho_b):
        if rho.eigenvalues[0] < MIN_EIGENVALUE:
            raise MatrixError(f"eigenvalue {rho.eigenvalues[0]:.4f} below {MIN_EIGENVALUE}")
    return Comparison(
        fidelity=fidelity(rho_a, rho_b),
        trace_distance=trace_distance(rho_a, rho_b),
        max_entry_dev=float(np.max(np.abs(rho_a.matrix - rho_b.matrix))),
    )
