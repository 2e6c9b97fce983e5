"""Shared qubit registry standing in for quantum state transfer between parties.

Qubits are referenced by integer handles. The registry stores the joint state as a
set of independent groups (tensor factors); a two-qubit gate across groups merges
them and measured qubits are projected out, so the width of any group stays small.
Every handle carries an owner tag and only the owner may act on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import RegistryError
from ..gates import BITS_FROM_BELL, BellOutcome, Circuit, bell_measure, gate_matrix
from ..statevector import (
    BASIS_CHANGE,
    StateVector,
    apply_1q,
    apply_cnot,
    canonical_basis,
    measure_in_basis,
    reduced_density_1q,
)

PURITY_TOL = 1e-10


@dataclass
class _Group:
    state: StateVector
    handles: list[int] = field(default_factory=list)


class QubitRegistry:
    def __init__(self, channel=None):
        self.channel = channel
        self._groups: dict[int, _Group] = {}
        self._group_of: dict[int, int] = {}
        self._owner: dict[int, str] = {}
        self._next_handle = 0
        self._next_group = 0

    # --- bookkeeping ------------------------------------------------------

    def live_handles(self) -> list[int]:
        return sorted(self._group_of)

    def is_live(self, handle: int) -> bool:
        return handle in self._group_of

    def owner(self, handle: int) -> str:
        self._check_live(handle)
        return self._owner[handle]

    def owned_by(self, party: str) -> list[int]:
        return sorted(h for h, o in self._owner.items() if o == party and h in self._group_of)

    def _check_live(self, handle: int) -> None:
        if handle not in self._group_of:
            raise RegistryError(f"qubit handle {handle} is not live")

    def _check_owner(self, actor: str, *handles: int) -> None:
        for h in handles:
            self._check_live(h)
            if self._owner[h] != actor:
                raise RegistryError(f"{actor} does not hold qubit {h} (held by {self._owner[h]})")

    def _locate(self, handle: int) -> tuple[int, _Group, int]:
        gid = self._group_of[handle]
        group = self._groups[gid]
        return gid, group, group.handles.index(handle)

    def _new_group(self, state: StateVector, handles: list[int]) -> int:
        gid = self._next_group
        self._next_group += 1
        self._groups[gid] = _Group(state, list(handles))
        for h in handles:
            self._group_of[h] = gid
        return gid

    def _merge(self, h1: int, h2: int) -> _Group:
        g1, g2 = self._group_of[h1], self._group_of[h2]
        if g1 == g2:
            return self._groups[g1]
        a, b = self._groups.pop(g1), self._groups.pop(g2)
        gid = self._new_group(a.state.kron(b.state), a.handles + b.handles)
        return self._groups[gid]

    def _remove(self, handle: int, bit: int) -> None:
        """Drop a qubit known to sit in the basis state |bit>."""
        gid, group, pos = self._locate(handle)
        del self._group_of[handle]
        if len(group.handles) == 1:
            del self._groups[gid]
            return
        rest = np.take(group.state.tensor(), bit, axis=pos).reshape(-1)
        group.state = StateVector.from_amplitudes(rest, normalize=True)
        group.handles.pop(pos)

    def _factor_out(self, handle: int) -> StateVector:
        """Split a qubit that is in a product state with the rest of its group."""
        gid, group, pos = self._locate(handle)
        if len(group.handles) == 1:
            return group.state
        rho = reduced_density_1q(group.state, pos)
        w, v = np.linalg.eigh(rho)
        if w[-1] < 1 - PURITY_TOL:
            raise RegistryError(f"qubit {handle} is entangled with {[h for h in group.handles if h != handle]}")
        single = v[:, -1]
        # contract the qubit with its own state to obtain the remainder
        rest = np.tensordot(single.conj(), np.moveaxis(group.state.tensor(), pos, 0), axes=(0, 0)).reshape(-1)
        group.handles.pop(pos)
        group.state = StateVector.from_amplitudes(rest, normalize=True)
        return StateVector(1, single)

    # --- operations ---------------------------------------------------------

    def allocate(self, owner: str, prep: Circuit | None = None) -> int:
        h = self._next_handle
        self._next_handle += 1
        self._owner[h] = owner
        self._new_group(StateVector.basis_state("0"), [h])
        if prep is not None:
            self.prepare(owner, h, prep)
        return h

    def prepare(self, actor: str, handle: int, prep: Circuit) -> None:
        if prep.n_qubits != 1 or prep.has_measurements:
            raise ValueError("qubit preparation must be a measurement-free single-qubit circuit")
        for op in prep.ops:
            self.apply_gate(actor, handle, op.name, op.angle)

    def apply_gate(self, actor: str, handle: int, name: str, angle: float | None = None) -> None:
        self._check_owner(actor, handle)
        if name == "I":
            return
        _, group, pos = self._locate(handle)
        group.state = apply_1q(group.state, gate_matrix(name, angle), pos)

    def apply_cnot(self, actor: str, control: int, target: int) -> None:
        self._check_owner(actor, control, target)
        group = self._merge(control, target)
        group.state = apply_cnot(group.state, group.handles.index(control), group.handles.index(target))

    def measure(self, actor: str, handle: int, basis: str, rng: np.random.Generator) -> int:
        """Measure and consume the qubit."""
        self._check_owner(actor, handle)
        _, group, pos = self._locate(handle)
        bit, post = measure_in_basis(group.state, pos, basis, rng)
        # rotate the collapsed qubit onto |bit> before dropping it
        group.state = apply_1q(post, BASIS_CHANGE[canonical_basis(basis)], pos)
        self._remove(handle, bit)
        return bit

    def bell_measure(self, actor: str, h1: int, h2: int, rng: np.random.Generator) -> BellOutcome:
        """Bell measurement of two qubits; both are consumed."""
        self._check_owner(actor, h1, h2)
        group = self._merge(h1, h2)
        p1, p2 = group.handles.index(h1), group.handles.index(h2)
        outcome, post = bell_measure(group.state, p1, p2, rng)
        group.state = post
        b1, b2 = BITS_FROM_BELL[outcome]
        self._remove(h1, b1)
        self._remove(h2, b2)
        return outcome

    def take_state(self, actor: str, handle: int) -> StateVector:
        """Hand the qubit's pure state to a measurement apparatus; consumes the handle.

        Fails if the qubit is still entangled with anything else.
        """
        self._check_owner(actor, handle)
        state = self._factor_out(handle)
        gid = self._group_of.pop(handle)
        if self._groups[gid].handles == [handle]:
            del self._groups[gid]
        return state

    def release(self, actor: str, handle: int) -> None:
        self.take_state(actor, handle)

    def transfer(self, handle: int, sender: str, recipient: str) -> None:
        """Give a qubit to another party; recorded on the channel when one is attached."""
        self._check_owner(sender, handle)
        self._owner[handle] = recipient
        if self.channel is not None:
            self.channel.send(sender, recipient, "qubit_transfer", {"handle": handle})

    # --- inspection (simulator-side only) --------------------------------------

    def peek_state(self, handle: int) -> tuple[StateVector, list[int]]:
        """Joint state of the group containing ``handle`` and the group's handle order."""
        self._check_live(handle)
        _, group, _ = self._locate(handle)
        return group.state, list(group.handles)

    def peek_density(self, handle: int) -> np.ndarray:
        state, handles = self.peek_state(handle)
        return reduced_density_1q(state, handles.index(handle))

