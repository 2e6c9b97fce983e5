import itertools
import math

import numpy as np
import pytest

from qcheque.statevector import StateVector

COS8, SIN8 = math.cos(math.pi / 8), math.sin(math.pi / 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def permutation_unitary(n, mapping):
    """Matrix sending basis |bits> to |mapping(bits)>; bits are tuples, qubit 0 first."""
    dim = 2**n
    u = np.zeros((dim, dim), dtype=complex)
    for bits in itertools.product((0, 1), repeat=n):
        src = int("".join(map(str, bits)), 2)
        dst = int("".join(map(str, mapping(bits))), 2)
        u[dst, src] = 1
    return u


def cnot_map(control, target):
    def f(bits):
        b = list(bits)
        if b[control]:
            b[target] ^= 1
        return tuple(b)

    return f


def swap_map(a, b):
    def f(bits):
        out = list(bits)
        out[a], out[b] = out[b], out[a]
        return tuple(out)

    return f


def cswap_map(c, a, b):
    def f(bits):
        return swap_map(a, b)(bits) if bits[c] else bits

    return f


def qubit(alpha, beta):
    return StateVector.from_amplitudes([alpha, beta], normalize=True)


def bloch_state(theta, phi):
    return StateVector(1, [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def binomial_band(p, shots, sigmas=5.0):
    return sigmas * math.sqrt(p * (1 - p) / shots)


class ScriptedRng:
    """Real generator for bit strings; ``random()`` replays a fixed script to force outcomes."""

    FORCE = {0: 0.999999, 1: 0.0}  # outcome 1 iff u < P(1)

    def __init__(self, bits, seed=0):
        self._gen = np.random.default_rng(seed)
        self._script = [self.FORCE[b] for b in bits]

    def integers(self, *args, **kwargs):
        return self._gen.integers(*args, **kwargs)

    def random(self, *args, **kwargs):
        return self._script.pop(0)
