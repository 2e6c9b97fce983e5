"""The two hardware experiments (cheque generation and cheque verification) as circuits,
plus the row runners behind the probability tables and the tomography report."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


from .gates import CNOT, Circuit, Gate1, ghz_prep_circuit, psi_m_prep_circuit, run_unitary
from .noise import NoiseParams, default_params
from .simulator import execute
from .statevector import StateVector, derive_seed, reduced_density_1q
from .swap_test import ANCILLA, swap_test_circuit
from .tomography import DensityMatrix2, NonPhysicalWarning, compare, estimate_expectations, reconstruct, theoretical_density

TABLE_SHOTS = (1024, 4096, 8192)

# Wires of the generation circuit. The hardware layout had a fifth, idle qubit; it is not allocated.
AMOUNT, A1, A2, BANK = 0, 1, 2, 3

PSI_M_P0 = math.cos(math.pi / 8) ** 2


def cheque_generation_circuit() -> Circuit:
    """Encode psi_M into the GHZ triple and apply the Bell-outcome corrections.

    The hardware had no classical feed-forward, so the corrections are deferred:
    the X part is a CNOT from the A1 Bell bit, the Z part a CZ from the amount bit.
    Ends before any measurement; the cheque qubit is ``A2``.
    """
    deferred_corrections = Circuit.build([
        CNOT(A1, A2),
        Gate1("H", A2), CNOT(AMOUNT, A2), Gate1("H", A2),
    ])
    bell_rotation = Circuit.build([CNOT(AMOUNT, A1), Gate1("H", AMOUNT)])
    return (
        psi_m_prep_circuit(AMOUNT)
        + ghz_prep_circuit(A1, A2, BANK)
        + bell_rotation
        + deferred_corrections
    )


def cheque_verification_circuit(include_measurement: bool = True) -> Circuit:
    """Swap test with both compared wires left in |0>."""
    c = swap_test_circuit(ANCILLA, 1, 2)
    if not include_measurement:
        c = Circuit(c.n_qubits, c.ops[:-1])
    return c


@dataclass(frozen=True)
class TableRow:
    label: str
    kind: str  # "run" (noisy) or "simulation" (ideal)
    shots: int
    p0: float
    p1: float

    def to_dict(self) -> dict:
        return {"label": self.label, "kind": self.kind, "shots": self.shots, "p0": self.p0, "p1": self.p1}


def _p0(circuit: Circuit, qubit: int, shots: int, seed: int, noise: NoiseParams) -> tuple[float, float]:
    measured = () if circuit.has_measurements else (qubit,)
    bits = execute(circuit, measured, shots, seed, None, noise.p1, noise.p2, noise.p_read)
    ones = int(bits[:, -1].sum())
    return (shots - ones) / shots, ones / shots


def table_rows(which: int, seed: int, noise: NoiseParams | None = None, shots_list=TABLE_SHOTS) -> list[TableRow]:
    """Three noisy ("Run") and three ideal ("Simulation") rows for table 1 or 2."""
    if which == 1:
        circuit, qubit = cheque_generation_circuit(), A2
    elif which == 2:
        circuit, qubit = cheque_verification_circuit(), ANCILLA
    else:
        raise ValueError("which must be 1 or 2")
    noise = default_params() if noise is None else noise
    rows = []
    for k, shots in enumerate(shots_list):
        p0, p1 = _p0(circuit, qubit, shots, derive_seed(seed, which, 0, k), noise)
        rows.append(TableRow(f"Run-{k + 1} ({shots})", "run", shots, p0, p1))
    for k, shots in enumerate(shots_list):
        p0, p1 = _p0(circuit, qubit, shots, derive_seed(seed, which, 1, k), NoiseParams())
        rows.append(TableRow(f"Simulation-{k + 1} ({shots})", "simulation", shots, p0, p1))
    return rows


def ideal_p0(which: int) -> float:
    return PSI_M_P0 if which == 1 else 1.0


def within_band(p_hat: float, p: float, shots: int, sigmas: float = 5.0) -> bool:
    return abs(p_hat - p) <= sigmas * math.sqrt(p * (1 - p) / shots)


# --- tomography targets ----------------------------------------------------------


TOMOGRAPHY_TARGETS = ("cheque", "ancilla")


def tomography_target(target: str) -> tuple[Circuit, int, StateVector]:
    """(preparation circuit, tomographed wire, ideal pure reference state)."""
    if target == "cheque":
        return cheque_generation_circuit(), A2, run_unitary(psi_m_prep_circuit(0))
    if target == "ancilla":
        return cheque_verification_circuit(include_measurement=False), ANCILLA, StateVector.basis_state("0")
    raise ValueError(f"unknown tomography target {target!r}")


def exact_marginal(target: str) -> DensityMatrix2:
    prep, q, _ = tomography_target(target)
    return DensityMatrix2(reduced_density_1q(run_unitary(prep), q))


def tomography_report(target: str, shots: int, seed: int, noise: NoiseParams | None = None) -> dict:
    """Theoretical, ideal-sampled and noisy-sampled density matrices with comparisons."""
    prep, q, reference = tomography_target(target)
    noise = default_params() if noise is None else noise
    rho_t = theoretical_density(reference)
    with warnings.catch_warnings():
        # nonphysical reconstructions are reported through DensityMatrix2.is_physical
        warnings.simplefilter("ignore", NonPhysicalWarning)
        tag = TOMOGRAPHY_TARGETS.index(target)
        rho_s = reconstruct(estimate_expectations(prep, q, shots, derive_seed(seed, tag, 0)))
        rho_r = reconstruct(estimate_expectations(prep, q, shots, derive_seed(seed, tag, 1), noise))
    return {
        "target": target,
        "shots": shots,
        "matrices": {
            "theoretical": rho_t,
            "simulated": rho_s,
            "run": rho_r,
            "exact_marginal": exact_marginal(target),
        },
        "comparisons": {
            "simulated_vs_theoretical": compare(rho_t, rho_s),
            "run_vs_theoretical": compare(rho_t, rho_r),
            "run_vs_simulated": compare(rho_s, rho_r),
        },
    }


