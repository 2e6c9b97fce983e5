import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcheque.errors import QubitIndexError, SizeError
from qcheque.gates import (
    BELL_CORRECTION,
    BellOutcome,
    CNOT,
    Circuit,
    Gate1,
    Measure,
    bell_measure,
    bell_rotation,
    circuit_unitary,
    fredkin_circuit,
    gate_matrix,
    ghz_prep_circuit,
    psi_m_prep_circuit,
    reversed_cnot_circuit,
    run_unitary,
    swap_circuit,
)
from qcheque.statevector import (
    StateVector,
    apply_1q,
    equal_up_to_phase,
    phase_normalized,
    reduced_density_1q,
)

from conftest import COS8, SIN8, bloch_state, cnot_map, cswap_map, permutation_unitary, qubit, swap_map

R2 = 1 / math.sqrt(2)


def test_gate_matrices_textbook():
    assert np.allclose(gate_matrix("H"), np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-12)
    assert np.allclose(gate_matrix("T"), [[1, 0], [0, np.exp(1j * math.pi / 4)]], atol=1e-12)
    assert np.allclose(gate_matrix("Sdg") @ gate_matrix("S"), np.eye(2), atol=1e-12)
    assert np.allclose(gate_matrix("Tdg") @ gate_matrix("T"), np.eye(2), atol=1e-12)
    assert np.allclose(gate_matrix("T") @ gate_matrix("T"), gate_matrix("S"), atol=1e-12)
    assert np.allclose(gate_matrix("Y"), 1j * gate_matrix("X") @ gate_matrix("Z"), atol=1e-12)


@pytest.mark.parametrize("name", ["I", "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg"])
def test_gate_matrices_unitary(name):
    u = gate_matrix(name)
    assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-10


def test_unknown_gate():
    with pytest.raises(ValueError):
        gate_matrix("CZ")
    with pytest.raises(ValueError):
        Gate1("RY", 0)


def test_circuit_validates_indices():
    with pytest.raises(QubitIndexError):
        Circuit(2, (Gate1("H", 2),))
    with pytest.raises(QubitIndexError):
        CNOT(1, 1)


def test_reversed_cnot_identity():
    u = circuit_unitary(reversed_cnot_circuit(0, 1))
    assert np.max(np.abs(u - permutation_unitary(2, cnot_map(0, 1)))) < 1e-10
    assert np.allclose(run_unitary(reversed_cnot_circuit(0, 1), StateVector.basis_state("10")).amps, StateVector.basis_state("11").amps)
    assert np.allclose(run_unitary(reversed_cnot_circuit(0, 1), StateVector.basis_state("01")).amps, StateVector.basis_state("01").amps)
    # the construction really uses the opposite CNOT direction
    assert [op for op in reversed_cnot_circuit(0, 1).ops if isinstance(op, CNOT)] == [CNOT(1, 0)]


def test_swap_identity():
    assert np.allclose(run_unitary(swap_circuit(0, 1), StateVector.basis_state("01")).amps, StateVector.basis_state("10").amps)
    assert np.allclose(run_unitary(swap_circuit(0, 1), StateVector.basis_state("00")).amps, StateVector.basis_state("00").amps)
    # oracle: product of the three explicit CNOT permutation matrices
    cab, cba = permutation_unitary(2, cnot_map(0, 1)), permutation_unitary(2, cnot_map(1, 0))
    assert np.max(np.abs(cab @ cba @ cab - permutation_unitary(2, swap_map(0, 1)))) < 1e-10
    assert np.max(np.abs(circuit_unitary(swap_circuit(0, 1)) - permutation_unitary(2, swap_map(0, 1)))) < 1e-10


def test_fredkin_identity():
    c = fredkin_circuit(0, 1, 2)
    assert all(isinstance(op, CNOT) or op.name in ("H", "T", "Tdg") for op in c.ops)
    assert sum(isinstance(op, CNOT) for op in c.ops) == 8
    assert np.allclose(run_unitary(c, StateVector.basis_state("110")).amps, StateVector.basis_state("101").amps, atol=1e-12)
    assert np.allclose(run_unitary(c, StateVector.basis_state("010")).amps, StateVector.basis_state("010").amps, atol=1e-12)
    assert np.max(np.abs(circuit_unitary(c) - permutation_unitary(3, cswap_map(0, 1, 2)))) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_constructions_for_all_index_tuples(n):
    for a, b in itertools.permutations(range(n), 2):
        cn = reversed_cnot_circuit(a, b).widen(n)
        assert np.max(np.abs(circuit_unitary(cn) - permutation_unitary(n, cnot_map(a, b)))) < 1e-10
        sw = swap_circuit(a, b).widen(n)
        assert np.max(np.abs(circuit_unitary(sw) - permutation_unitary(n, swap_map(a, b)))) < 1e-10
    for c, a, b in itertools.permutations(range(n), 3):
        fr = fredkin_circuit(c, a, b).widen(n)
        assert np.max(np.abs(circuit_unitary(fr) - permutation_unitary(n, cswap_map(c, a, b)))) < 1e-10


def test_construction_index_errors():
    with pytest.raises(QubitIndexError):
        reversed_cnot_circuit(1, 1)
    with pytest.raises(QubitIndexError):
        swap_circuit(0, 0)
    with pytest.raises(QubitIndexError):
        fredkin_circuit(0, 1, 1)
    with pytest.raises(QubitIndexError):
        ghz_prep_circuit(0, 0, 1)


def test_psi_m_preparation():
    # oracle: multiply the four 2x2 matrices directly, then strip the global phase by hand
    m = gate_matrix("S") @ gate_matrix("H") @ gate_matrix("T") @ gate_matrix("H")
    col = m[:, 0]
    col = col * abs(col[0]) / col[0]
    assert np.allclose(col, [math.cos(math.pi / 8), math.sin(math.pi / 8)], atol=1e-12)

    psi = run_unitary(psi_m_prep_circuit(0))
    assert np.allclose(np.abs(psi.amps), [0.92388, 0.38268], atol=1e-5)
    assert abs(psi.amps[0]) ** 2 == pytest.approx(0.85355, abs=1e-5)
    assert np.max(np.abs(phase_normalized(psi) - [math.cos(math.pi / 8), math.sin(math.pi / 8)])) < 1e-10


def test_ghz_preparation():
    ghz = run_unitary(ghz_prep_circuit(0, 1, 2))
    expect = np.zeros(8)
    expect[0] = expect[7] = R2
    assert np.allclose(ghz.amps, expect)
    assert set(np.nonzero(np.abs(ghz.amps) > 1e-12)[0]) == {0, 7}
    for q in range(3):
        assert np.allclose(reduced_density_1q(ghz, q), np.eye(2) / 2)


def test_circuit_unitary_basics():
    assert np.allclose(circuit_unitary(Circuit(2)), np.eye(4))
    assert np.allclose(circuit_unitary(Circuit.build([Gate1("H", 0), Gate1("H", 0)])), np.eye(2))
    with pytest.raises(ValueError):
        circuit_unitary(Circuit.build([Measure(0)]))
    with pytest.raises(SizeError):
        circuit_unitary(Circuit(11))


def test_text_round_trip():
    c = fredkin_circuit(0, 1, 2) + Circuit.build([Gate1("RY", 1, 0.25), Measure(2, "X"), Measure(0)])
    text = c.to_text()
    assert text.splitlines()[0] == "CNOT 2 1"
    assert "MEASURE 2 X" in text and "MEASURE 0 Z" in text
    assert Circuit.from_text(text) == c
    assert Circuit.from_text("H 0\nCNOT 0 1\nMEASURE 2 Z\n").ops == (Gate1("H", 0), CNOT(0, 1), Measure(2))
    with pytest.raises(ValueError):
        Circuit.from_text("CNOT 0")


# --- Bell measurement -----------------------------------------------------------


def _cheque_input(alpha, beta):
    """psi (qubit 0) tensored with GHZ over A1, A2, B (qubits 1..3)."""
    return StateVector(1, [alpha, beta]).kron(run_unitary(ghz_prep_circuit(0, 1, 2)))


def _project(state, bits):
    """Brute-force projection of qubits 0 and 1 onto ``bits``; returns (prob, (A2, B) state)."""
    rotated = bell_rotation(state, 0, 1)
    t = rotated.tensor()[bits[0], bits[1]]
    prob = float(np.sum(np.abs(t) ** 2))
    return prob, StateVector.from_amplitudes(t.reshape(-1), normalize=True)


def test_bell_outcome_branches_from_projection():
    a, b = COS8, SIN8
    state = _cheque_input(a, b)
    expected = {  # remaining (A2, B) states
        BellOutcome.PSI_PLUS: [a, 0, 0, b],
        BellOutcome.PSI_MINUS: [a, 0, 0, -b],
        BellOutcome.PHI_PLUS: [b, 0, 0, a],
        BellOutcome.PHI_MINUS: [b, 0, 0, -a],
    }
    for bits, label in [((0, 0), BellOutcome.PSI_PLUS), ((1, 0), BellOutcome.PSI_MINUS),
                        ((0, 1), BellOutcome.PHI_PLUS), ((1, 1), BellOutcome.PHI_MINUS)]:
        prob, rest = _project(state, bits)
        assert prob == pytest.approx(0.25, abs=1e-12)
        assert equal_up_to_phase(rest, StateVector(2, expected[label]))


def test_bell_measure_samples_all_labels(rng):
    state = _cheque_input(COS8, SIN8)
    seen = set()
    for _ in range(200):
        label, post = bell_measure(state, 0, 1, rng)
        seen.add(label)
        b1, b2 = {BellOutcome.PSI_PLUS: (0, 0), BellOutcome.PSI_MINUS: (1, 0),
                  BellOutcome.PHI_PLUS: (0, 1), BellOutcome.PHI_MINUS: (1, 1)}[label]
        assert np.sum(np.abs(post.tensor()[b1, b2]) ** 2) == pytest.approx(1)
    assert seen == set(BellOutcome)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_bell_plus_correction_teleports_onto_partner(theta, phi):
    """Product state (x) Bell pair; every outcome, corrected, reproduces the input on wire 2."""
    psi = bloch_state(theta, phi)
    pair = StateVector(2, [R2, 0, 0, R2])
    state = psi.kron(pair)
    for bits, label in [((0, 0), BellOutcome.PSI_PLUS), ((1, 0), BellOutcome.PSI_MINUS),
                        ((0, 1), BellOutcome.PHI_PLUS), ((1, 1), BellOutcome.PHI_MINUS)]:
        t = bell_rotation(state, 0, 1).tensor()[bits[0], bits[1]]
        rest = StateVector.from_amplitudes(t, normalize=True)
        fixed = apply_1q(rest, gate_matrix(BELL_CORRECTION[label]), 0)
        assert equal_up_to_phase(fixed, psi)
