from __future__ import annotations

from dataclasses import dataclass

from ..crypto import EXPONENT_MIN, hash_bytes


@dataclass(frozen=True)
class DeviceId:
    raw_id: bytes
    id_hash: bytes

    @classmethod
    def from_raw(cls, raw_id: bytes) -> "DeviceId":
        return cls(raw_id, hash_bytes(raw_id))

    def __post_init__(self) -> None:
        if hash_bytes(self.raw_id) != self.id_hash:
            raise ValueError("id_hash does not match raw_id")


@dataclass(frozen=True)
class SessionConfig:
    """Per-pair session parameters; all times in simulated milliseconds.

    ``resync_window`` bounds how many DRBG positions ahead the gateway searches
    when the edge has consumed draws on handshakes that never reached it.

    ``credential_rollback`` (off by default) lets both sides fall back to the
    pre-rotation credentials until the first completed CA round confirms a
    rotation. It keeps a pair usable after a lost M5, at the cost of
    accepting the old credentials for that short stretch, which a device
    copied before the rotation can exploit. With it off, a lost M5 strands
    the pair until re-enrollment.
    """

    T: int = 10_000
    exponent_max: int = 16
    ca_round_interval: int = 1_000
    resync_window: int = 8
    credential_rollback: bool = False

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError("session duration T must be positive")
        if not 0 < self.ca_round_interval < self.T:
            raise ValueError("ca_round_interval must lie in (0, T)")
        if not EXPONENT_MIN <= self.exponent_max <= 255:
            raise ValueError("exponent_max must lie in [2, 255]")
        if self.resync_window < 1:
            raise ValueError("resync_window must be at least 1")
