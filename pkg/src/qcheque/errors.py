"""Exception types shared across the package."""


class QChequeError(Exception):
    """Base class for all errors raised by qcheque."""


class SizeError(QChequeError, ValueError):
    """Register or matrix too large or too small."""


class QubitIndexError(QChequeError, IndexError):
    """Qubit index out of range, or repeated where distinct indices are required."""


class UnitarityError(QChequeError, ValueError):
    """A gate matrix is not unitary."""


class ShapeError(QChequeError, ValueError):
    """Operands have incompatible widths."""


class MatrixError(QChequeError, ValueError):
    """A density matrix violates Hermiticity, trace or positivity bounds."""


class RegistryError(QChequeError):
    """Invalid access to the shared qubit registry (dead handle, wrong owner, entangled hand-off)."""


class LedgerLookupError(QChequeError, KeyError):
    """Serial number not present in the bank ledger."""


class ProtocolStateError(QChequeError):
    """Operation not allowed in the current protocol state (spent serial, empty cheque book)."""
