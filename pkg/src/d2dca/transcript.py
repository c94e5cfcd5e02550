"""Ordered event log of a simulation run, serialized as JSON lines."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional


@dataclass(frozen=True)
class Event:
    t: int
    actor: str
    kind: str
    msg: Optional[str] = None
    detail: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)

    def add(self, t: int, actor: str, kind: str, msg: str | None = None,
            detail: str | None = None, error: str | None = None) -> Event:
        if self.events and t < self.events[-1].t:
            raise ValueError(f"transcript time went backwards: {t} < {self.events[-1].t}")
        if kind == "abort" and not error:
            raise ValueError("abort events need a failure point")
        ev = Event(t, actor, kind, msg, detail, error)
        self.events.append(ev)
        return ev

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
            for e in self.events
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        tr = cls()
        for line in text.splitlines():
            if line.strip():
                tr.events.append(Event(**json.loads(line)))
        return tr
