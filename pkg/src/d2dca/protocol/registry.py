"""Gateway-side database of enrolled edges.

On disk the registry is a JSON object keyed by hex edge-id hash::

    {"<edge_id_hash hex>": {"e_init": "<hex>", "seed": "<hex>", "draw_index": 1}}
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Optional

from ..crypto import Seed
from .errors import DuplicateEnrollment, ProtocolError


@dataclass(frozen=True)
class Credentials:
    e_init: bytes
    seed: Seed


@dataclass
class RegistryEntry:
    current: Credentials
    # pre-rotation credentials, kept until the edge proves it adopted the new ones
    previous: Optional[Credentials] = None

    def advance(self, which: str, draw_index: int) -> None:
        creds = getattr(self, which)
        setattr(self, which, replace(creds, seed=Seed(creds.seed.value, draw_index)))


class Registry:
    def __init__(self) -> None:
        self._entries: dict[bytes, RegistryEntry] = {}
        self._write_lock = threading.Lock()

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        del state["_write_lock"]
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._write_lock = threading.Lock()

    def __contains__(self, edge_id_hash: bytes) -> bool:
        return edge_id_hash in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[bytes]:
        return iter(list(self._entries))

    def get(self, edge_id_hash: bytes) -> Optional[RegistryEntry]:
        return self._entries.get(edge_id_hash)

    def __getitem__(self, edge_id_hash: bytes) -> RegistryEntry:
        return self._entries[edge_id_hash]

    def add(self, edge_id_hash: bytes, e_init: bytes, seed: Seed) -> RegistryEntry:
        with self._write_lock:
            if edge_id_hash in self._entries:
                raise DuplicateEnrollment(edge_id_hash.hex())
            entry = RegistryEntry(Credentials(e_init, seed))
            self._entries[edge_id_hash] = entry
            return entry

    def to_json(self) -> dict:
        return {
            k.hex(): {
                "e_init": e.current.e_init.hex(),
                "seed": e.current.seed.value.hex(),
                "draw_index": e.current.seed.draw_index,
            }
            for k, e in sorted(self._entries.items())
        }

    @classmethod
    def from_json(cls, data: dict) -> "Registry":
        reg = cls()
        try:
            for key, rec in data.items():
                reg.add(
                    bytes.fromhex(key),
                    bytes.fromhex(rec["e_init"]),
                    Seed(bytes.fromhex(rec["seed"]), int(rec["draw_index"])),
                )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ProtocolError(f"bad registry record: {exc}") from exc
        return reg

    def save(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path | str) -> "Registry":
        p = Path(path)
        if not p.exists():
            return cls()
        return cls.from_json(json.loads(p.read_text()))
