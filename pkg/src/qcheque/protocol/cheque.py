"""Gen / Sign / Verify over simulated parties.

A :class:`ChequeSession` owns the shared qubit registry, the message channel and
the one-way state functions. Parties only exchange data through the channel;
the registry re-tags qubit ownership and logs each hand-over.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import LedgerLookupError, ProtocolStateError
from ..gates import BELL_CORRECTION, run_unitary
from ..noise import NoiseParams
from ..statevector import derive_seed
from ..swap_test import DEFAULT_LAMBDA, DEFAULT_REPS, amplified_decision, repeated_swap_tests
from .channel import ALICE, BANK, BOB, MessageChannel
from .crypto import (
    ID_BITS,
    KEY_BITS,
    NONCE_BITS,
    SERIAL_BITS,
    KeyedTagScheme,
    OneWayStates,
    random_bits,
)
from .registry import QubitRegistry

DEFAULT_SHOTS = 512


@dataclass(frozen=True)
class ChequeBookEntry:
    serial: str
    handle_A1: int
    handle_A2: int


@dataclass
class AliceState:
    id: str
    pk: str
    sk: str
    k: str
    cheque_book: list[list[ChequeBookEntry]] = field(default_factory=list)

    @property
    def serials(self) -> list[str]:
        return [leaf[0].serial for leaf in self.cheque_book]


@dataclass
class BankLedgerEntry:
    id: str
    s: str
    handles_B: list[int]
    pk: str
    spent: bool = False


@dataclass
class BankState:
    tags: KeyedTagScheme
    shared_keys: dict[str, str] = field(default_factory=dict)  # customer id -> k
    ledger: dict[str, BankLedgerEntry] = field(default_factory=dict)

    def mark_spent(self, s: str) -> BankLedgerEntry:
        entry = self.ledger.get(s)
        if entry is None:
            raise LedgerLookupError(s)
        if entry.spent:
            raise ProtocolStateError(f"serial {s} already spent")
        entry.spent = True
        return entry


def mark_spent(bank: BankState, s: str) -> BankState:
    bank.mark_spent(s)
    return bank


@dataclass(frozen=True)
class QuantumCheque:
    id: str
    s: str
    r: str
    sigma: str
    M: int
    handles_A2: tuple[int, ...]
    handle_psi_alice: int

    def __post_init__(self):
        if not self.handles_A2:
            raise ValueError("a cheque carries at least one amount qubit")
        handles = list(self.handles_A2) + [self.handle_psi_alice]
        if len(set(handles)) != len(handles):
            raise ValueError("cheque qubit handles must be distinct")
        if self.M < 0:
            raise ValueError("amount must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.handles_A2)

    def to_json(self) -> dict:
        return {
            "id": self.id, "s": self.s, "r": self.r, "sigma": self.sigma, "M": self.M,
            "m": self.m, "handles": list(self.handles_A2), "psi_alice_handle": self.handle_psi_alice,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumCheque":
        if obj["m"] != len(obj["handles"]):
            raise ValueError("m does not match the number of handles")
        return cls(obj["id"], obj["s"], obj["r"], obj["sigma"], int(obj["M"]), tuple(obj["handles"]), obj["psi_alice_handle"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


class Reason(enum.Enum):
    OK = "OK"
    BAD_SIGNATURE = "BadSignature"
    UNKNOWN_SERIAL = "UnknownSerial"
    ALREADY_SPENT = "AlreadySpent"
    SWAP_TEST_ALICE_FAILED = "SwapTestAliceFailed"
    SWAP_TEST_AMOUNT_FAILED = "SwapTestAmountFailed"


@dataclass(frozen=True)
class VerifyOutcome:
    accepted: bool
    reason: Reason
    index: int | None = None  # failing amount state for SwapTestAmountFailed
    p0_alice: float | None = None
    p0_amounts: tuple[float, ...] = ()

    def __post_init__(self):
        if self.accepted and self.reason is not Reason.OK:
            raise ValueError("an accepted cheque must carry reason OK")

    @property
    def label(self) -> str:
        if self.reason is Reason.SWAP_TEST_AMOUNT_FAILED:
            return f"{self.reason.value}({self.index})"
        return self.reason.value

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted, "reason": self.label,
            "p0_alice": self.p0_alice, "p0_amounts": list(self.p0_amounts),
        }


class ChequeSession:
    """One simulated banking session: registry, channel and state functions."""

    def __init__(self, mode: str = "paper"):
        self.channel = MessageChannel()
        self.registry = QubitRegistry(self.channel)
        self.owf = OneWayStates(mode)

    # --- Gen ------------------------------------------------------------------

    def gen(self, m: int, rng: np.random.Generator, cheques: int = 1) -> tuple[AliceState, BankState]:
        """Issue keys and ``cheques`` leaves of ``m`` GHZ triples each."""
        if m < 1 or cheques < 1:
            raise ValueError("m and cheques must be positive")
        bank = BankState(tags=KeyedTagScheme())
        ident = random_bits(rng, ID_BITS)
        k = random_bits(rng, KEY_BITS)
        # k is agreed out of band; only the fact of agreement is logged
        self.channel.send(ALICE, BANK, "key_agreement", {"id": ident, "bits": KEY_BITS})
        pk, sk = bank.tags.keygen(rng)
        self.channel.send(ALICE, BANK, "register_public_key", {"id": ident, "pk": pk})
        bank.shared_keys[ident] = k
        alice = AliceState(id=ident, pk=pk, sk=sk, k=k)
        reg = self.registry
        for _ in range(cheques):
            s = random_bits(rng, SERIAL_BITS)
            while s in bank.ledger:
                s = random_bits(rng, SERIAL_BITS)
            leaf, handles_B = [], []
            for _ in range(m):
                a1, a2, b = (reg.allocate(BANK) for _ in range(3))
                # (|000> + |111>)/sqrt2 over (B, A1, A2)
                reg.apply_gate(BANK, b, "H")
                reg.apply_cnot(BANK, b, a1)
                reg.apply_cnot(BANK, b, a2)
                reg.transfer(a1, BANK, ALICE)
                reg.transfer(a2, BANK, ALICE)
                leaf.append(ChequeBookEntry(s, a1, a2))
                handles_B.append(b)
            bank.ledger[s] = BankLedgerEntry(id=ident, s=s, handles_B=handles_B, pk=pk)
            alice.cheque_book.append(leaf)
            self.channel.send(BANK, ALICE, "cheque_book", {
                "id": ident, "s": s, "handles": [[e.handle_A1, e.handle_A2] for e in leaf],
            })
        return alice, bank

    # --- Sign -----------------------------------------------------------------

    def sign_cheque(self, alice: AliceState, amount: int, rng: np.random.Generator) -> QuantumCheque:
        """Encode the amount states into the next cheque-book leaf and sign its serial."""
        if not alice.cheque_book:
            raise ProtocolStateError("cheque book exhausted")
        leaf = alice.cheque_book.pop(0)
        reg = self.registry
        r = random_bits(rng, NONCE_BITS)
        h_alice = reg.allocate(ALICE, self.owf.f(alice.k, alice.id, r, amount))
        for i, entry in enumerate(leaf):
            h_psi = reg.allocate(ALICE, self.owf.g(r, amount, i))
            outcome = reg.bell_measure(ALICE, h_psi, entry.handle_A1, rng)
            reg.apply_gate(ALICE, entry.handle_A2, BELL_CORRECTION[outcome])
        s = leaf[0].serial
        sigma = KeyedTagScheme.sign(alice.sk, s)
        return QuantumCheque(alice.id, s, r, sigma, amount, tuple(e.handle_A2 for e in leaf), h_alice)

    def issue(self, qc: QuantumCheque, to: str = BOB) -> None:
        self.channel.send(ALICE, to, "issue_cheque", qc.to_json())
        for h in (*qc.handles_A2, qc.handle_psi_alice):
            self.registry.transfer(h, ALICE, to)

    # --- Verify ---------------------------------------------------------------

    def verify_cheque(
        self,
        branch: str,
        qc: QuantumCheque,
        bank: BankState,
        lambda1: float = DEFAULT_LAMBDA,
        lambda2: float = DEFAULT_LAMBDA,
        reps: int = DEFAULT_REPS,
        shots: int = DEFAULT_SHOTS,
        seed: int = 0,
        noise: NoiseParams | None = None,
        holder: str = BOB,
    ) -> VerifyOutcome:
        """Bob presents ``qc`` at ``branch``; the main branch decides.

        Check order: (id, s) in the ledger, spent flag, tag, then the swap tests.
        Hadamard outcomes use ``default_rng(derive_seed(seed, 0))``; swap test j
        (0 = Alice state, 1 + i = amount state i) uses ``derive_seed(seed, 1 + j)``.
        """
        ch, reg = self.channel, self.registry
        ch.send(holder, branch, "present_cheque", qc.to_json())
        ch.send(branch, BANK, "verify_request", {"id": qc.id, "s": qc.s, "sigma": qc.sigma})

        entry = bank.ledger.get(qc.s)
        if entry is None or entry.id != qc.id:
            return self._verdict(branch, holder, VerifyOutcome(False, Reason.UNKNOWN_SERIAL))
        if entry.spent:
            return self._verdict(branch, holder, VerifyOutcome(False, Reason.ALREADY_SPENT))
        if len(entry.handles_B) != qc.m or not bank.tags.verify(entry.pk, qc.sigma, qc.s):
            return self._verdict(branch, holder, VerifyOutcome(False, Reason.BAD_SIGNATURE))
        ch.send(BANK, branch, "signature_ok", {"s": qc.s})

        for h in (*qc.handles_A2, qc.handle_psi_alice):
            reg.transfer(h, holder, branch)
        rng = np.random.default_rng(derive_seed(seed, 0))
        for i, (h_b, h_a2) in enumerate(zip(entry.handles_B, qc.handles_A2)):
            bit = reg.measure(BANK, h_b, "hadamard", rng)
            ch.send(BANK, branch, "hadamard_outcome", {"s": qc.s, "i": i, "bit": bit})
            reg.apply_gate(branch, h_a2, "Z" if bit else "I")
        for h in (*qc.handles_A2, qc.handle_psi_alice):
            reg.transfer(h, branch, BANK)

        k = bank.shared_keys[qc.id]
        ref_alice = run_unitary(self.owf.f(k, qc.id, qc.r, qc.M))
        got_alice = reg.take_state(BANK, qc.handle_psi_alice)
        res = repeated_swap_tests(got_alice, ref_alice, reps, shots, derive_seed(seed, 1), noise, lambda1)
        alice_ok = amplified_decision(res, lambda1, reps)
        p0_alice = sum(r.zeros for r in res) / sum(r.shots for r in res)

        failed_amount, p0_amounts = None, []
        for i, h in enumerate(qc.handles_A2):
            ref = run_unitary(self.owf.g(qc.r, qc.M, i))
            got = reg.take_state(BANK, h)
            res = repeated_swap_tests(got, ref, reps, shots, derive_seed(seed, 2 + i), noise, lambda2)
            p0_amounts.append(sum(r.zeros for r in res) / sum(r.shots for r in res))
            if failed_amount is None and not amplified_decision(res, lambda2, reps):
                failed_amount = i

        stats = dict(p0_alice=p0_alice, p0_amounts=tuple(p0_amounts))
        if failed_amount is not None:
            outcome = VerifyOutcome(False, Reason.SWAP_TEST_AMOUNT_FAILED, failed_amount, **stats)
        elif not alice_ok:
            outcome = VerifyOutcome(False, Reason.SWAP_TEST_ALICE_FAILED, **stats)
        else:
            bank.mark_spent(qc.s)
            outcome = VerifyOutcome(True, Reason.OK, **stats)
        return self._verdict(branch, holder, outcome)

    def _verdict(self, branch: str, holder: str, outcome: VerifyOutcome) -> VerifyOutcome:
        self.channel.send(BANK, branch, "verdict", outcome.to_dict())
        self.channel.send(branch, holder, "verdict", {"accepted": outcome.accepted, "reason": outcome.label})
        return outcome


def run_transaction(
    m: int,
    amount: int,
    seed: int,
    mode: str = "paper",
    tamper: str = "none",
    lambda1: float = DEFAULT_LAMBDA,
    lambda2: float = DEFAULT_LAMBDA,
    reps: int = DEFAULT_REPS,
    shots: int = DEFAULT_SHOTS,
    noise: NoiseParams | None = None,
    branch_name: str = "Branch1",
) -> tuple[list[VerifyOutcome], ChequeSession]:
    """gen -> sign -> issue -> (tamper) -> verify. ``double_spend`` verifies twice."""
    tampers = ("none", "amount", "serial", "signature", "double_spend")
    if tamper not in tampers:
        raise ValueError(f"tamper must be one of {tampers}")
    rng = np.random.default_rng(derive_seed(seed, 0))
    session = ChequeSession(mode)
    alice, bank = session.gen(m, rng)
    qc = session.sign_cheque(alice, amount, rng)
    session.issue(qc)
    if tamper == "amount":
        qc = replace(qc, M=amount + 1)
    elif tamper == "serial":
        qc = replace(qc, s=_flip_bit(qc.s, 0))
    elif tamper == "signature":
        qc = replace(qc, sigma=_flip_bit(qc.sigma, len(qc.sigma) - 1))
    kw = dict(lambda1=lambda1, lambda2=lambda2, reps=reps, shots=shots, noise=noise)
    outcomes = [session.verify_cheque(branch_name, qc, bank, seed=derive_seed(seed, 1), **kw)]
    if tamper == "double_spend":
        outcomes.append(session.verify_cheque(branch_name, qc, bank, seed=derive_seed(seed, 2), **kw))
    return outcomes, session



def _flip_bit(bits: str, pos: int) -> str:
    return bits[:pos] + ("0" if bits[pos] == "1" else "1") + bits[pos + 1:]
