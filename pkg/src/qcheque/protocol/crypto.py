"""Classical plumbing: bit strings, the keyed-tag signature stand-in, and the
one-way state functions f and g."""

from __future__ import annotations

import hashlib
import hmac
import math

import numpy as np

from ..gates import Circuit, Gate1, psi_m_prep_circuit

KEY_BITS = 128
ID_BITS = 64
SERIAL_BITS = 64
NONCE_BITS = 128
AMOUNT_BITS = 64
INDEX_BITS = 32
SECRET_BITS = 256


def random_bits(rng: np.random.Generator, n: int) -> str:
    return "".join("1" if b else "0" for b in rng.integers(0, 2, size=n))


def int_bits(value: int, width: int) -> str:
    if not 0 <= value < 2**width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def _bytes(bits: str) -> bytes:
    # length prefix keeps leading zeros significant
    return len(bits).to_bytes(4, "big") + int(bits or "0", 2).to_bytes((len(bits) + 7) // 8 or 1, "big")


class KeyedTagScheme:
    """HMAC-SHA256 tags standing in for a public-key signature.

    ``pk`` is a fingerprint of ``sk``. Verification needs the secret, so the
    scheme object (held by the bank's main branch) keeps a private pk -> sk table
    filled at key generation; it never leaves the object.
    """

    def __init__(self):
        self._secrets: dict[str, str] = {}

    def keygen(self, rng: np.random.Generator) -> tuple[str, str]:
        sk = random_bits(rng, SECRET_BITS)
        pk = fingerprint(sk)
        self._secrets[pk] = sk
        return pk, sk

    @staticmethod
    def sign(sk: str, s: str) -> str:
        digest = hmac.new(_bytes(sk), _bytes(s), hashlib.sha256).digest()
        return format(int.from_bytes(digest, "big"), "0256b")

    def verify(self, pk: str, sigma: str, s: str) -> bool:
        sk = self._secrets.get(pk)
        if sk is None:
            return False
        return hmac.compare_digest(self.sign(sk, s), sigma)


def fingerprint(sk: str) -> str:
    digest = hashlib.sha256(b"qcheque-pk" + _bytes(sk)).digest()
    return format(int.from_bytes(digest, "big"), "0256b")


def bloch_angles(data: str, domain: bytes) -> tuple[float, float]:
    """theta in [0, pi], phi in [0, 2pi) from two 64-bit words of a keyed BLAKE2b hash."""
    digest = hashlib.blake2b(_bytes(data), key=domain, digest_size=16).digest()
    hi, lo = int.from_bytes(digest[:8], "big"), int.from_bytes(digest[8:], "big")
    return math.pi * hi / (2**64 - 1), 2 * math.pi * lo / 2**64


def bloch_circuit(theta: float, phi: float) -> Circuit:
    """|0> -> cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> up to global phase."""
    return Circuit.build([Gate1("RY", 0, theta), Gate1("RZ", 0, phi)])


class OneWayStates:
    """The state functions f(k||id||r||M) and g(r||M||i).

    ``paper`` mode ignores the input: g gives cos(pi/8)|0> + sin(pi/8)|1> and
    f gives |0>, the states used on hardware. ``hashed`` mode derives Bloch
    angles from a keyed hash so that any change of input changes the state.
    """

    MODES = ("paper", "hashed")

    def __init__(self, mode: str = "paper"):
        if mode not in self.MODES:
            raise ValueError(f"mode must be one of {self.MODES}, got {mode!r}")
        self.mode = mode

    def g(self, r: str, amount: int, i: int) -> Circuit:
        if self.mode == "paper":
            return psi_m_prep_circuit(0)
        data = r + int_bits(amount, AMOUNT_BITS) + int_bits(i, INDEX_BITS)
        return bloch_circuit(*bloch_angles(data, b"qcheque-g"))

    def f(self, k: str, ident: str, r: str, amount: int) -> Circuit:
        if self.mode == "paper":
            return Circuit(1)
        data = k + ident + r + int_bits(amount, AMOUNT_BITS)
        return bloch_circuit(*bloch_angles(data, b"qcheque-f"))


def oneway_g(r: str, amount: int, i: int, mode: str = "paper") -> Circuit:
    return OneWayStates(mode).g(r, amount, i)


def oneway_f(k: str, ident: str, r: str, amount: int, mode: str = "paper") -> Circuit:
    return OneWayStates(mode).f(k, ident, r, amount)


classical_sign = KeyedTagScheme.sign


def classical_verify(scheme: KeyedTagScheme, pk: str, sigma: str, s: str) -> bool:
    return scheme.verify(pk, sigma, s)
