"""Typed classical message channel between the parties, with an append-only log."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

ALICE = "Alice"
BOB = "Bob"
BANK = "BankMain"


def branch(k: int) -> str:
    if k < 1:
        raise ValueError("branch index must be >= 1")
    return f"Branch{k}"


def is_party(name: str) -> bool:
    if name in (ALICE, BOB, BANK):
        return True
    return name.startswith("Branch") and name[6:].isdigit() and int(name[6:]) >= 1


@dataclass(frozen=True)
class Message:
    seq: int
    sender: str
    recipient: str
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "from": self.sender, "to": self.recipient, "kind": self.kind, "payload": self.payload}


@dataclass
class MessageChannel:
    messages: list[Message] = field(default_factory=list)

    def send(self, sender: str, recipient: str, kind: str, payload: dict | None = None) -> Message:
        for p in (sender, recipient):
            if not is_party(p):
                raise ValueError(f"unknown party {p!r}")
        msg = Message(len(self.messages), sender, recipient, kind, dict(payload or {}))
        self.messages.append(msg)
        return msg

    def to(self, party: str) -> list[Message]:
        return [m for m in self.messages if m.recipient == party]

    def of_kind(self, kind: str) -> list[Message]:
        return [m for m in self.messages if m.kind == kind]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(m.to_json(), sort_keys=True) + "\n" for m in self.messages)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_jsonl())
        return path

    @staticmethod
    def read(path: str | Path) -> list[dict]:
        return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
