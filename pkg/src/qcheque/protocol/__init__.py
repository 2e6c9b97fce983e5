from .channel import ALICE, BANK, BOB, Message, MessageChannel, branch
from .cheque import (
    AliceState,
    BankLedgerEntry,
    BankState,
    ChequeBookEntry,
    ChequeSession,
    QuantumCheque,
    Reason,
    VerifyOutcome,
    mark_spent,
    run_transaction,
)
from .crypto import KeyedTagScheme, OneWayStates, classical_sign, classical_verify, oneway_f, oneway_g
from .registry import QubitRegistry
