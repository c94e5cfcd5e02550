"""Simulated wireless link.

CSI is synthesized per received packet as a hash over the link seed, the two
endpoint names and a per-link sequence number. The channel never touches
protocol keys.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .crypto import hash_bytes

DEFAULT_LINK_SEED = bytes(32)


class Dropped(Exception):
    """Packet lost on the link; the caller treats it as a timeout."""


@dataclass(frozen=True)
class ChannelConfig:
    link_seed: bytes = DEFAULT_LINK_SEED
    loss_rate: float = 0.0
    eavesdropper_decorrelation: bool = True
    latency_ms: int = 0

    def __post_init__(self) -> None:
        if len(self.link_seed) != 32:
            raise ValueError("link_seed must be 32 bytes")
        if not 0.0 <= self.loss_rate <= 1.0:
            raise ValueError("loss_rate must lie in [0, 1]")
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be non-negative")


@dataclass(frozen=True)
class DeliveryEvent:
    message: Any
    csi_at_receiver: bytes
    sim_time: int
    sender: str
    receiver: str
    seq: int


def _name(endpoint: str) -> bytes:
    raw = endpoint.encode()
    return len(raw).to_bytes(4, "big") + raw


def synthesize_csi(link_seed: bytes, sender: str, receiver: str, seq: int) -> bytes:
    """The 32-byte quantized CSI that ``receiver`` measures for packet ``seq``."""
    return hash_bytes(link_seed + _name(sender) + _name(receiver) + seq.to_bytes(8, "big"))


@dataclass
class Channel:
    """One simulated link. Not thread-safe; give each simulation its own."""

    config: ChannelConfig = field(default_factory=ChannelConfig)
    _seqs: dict = field(default_factory=dict, init=False, repr=False)
    _loss_rng: random.Random = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._loss_rng = random.Random(hash_bytes(self.config.link_seed + b"loss"))

    def transmit(self, sender: str, receiver: str, message: Any, sim_time: int) -> DeliveryEvent:
        if sender == receiver:
            raise ValueError("sender and receiver must differ")
        link = (sender, receiver)
        seq = self._seqs.get(link, 0)
        self._seqs[link] = seq + 1
        # always consume one draw so the loss pattern depends only on packet count
        lost = self._loss_rng.random() < self.config.loss_rate
        if lost:
            raise Dropped(f"{sender}->{receiver} seq {seq}")
        return DeliveryEvent(
            message=message,
            csi_at_receiver=synthesize_csi(self.config.link_seed, sender, receiver, seq),
            sim_time=sim_time + self.config.latency_ms,
            sender=sender,
            receiver=receiver,
            seq=seq,
        )

    def observe_as_eavesdropper(self, event: DeliveryEvent, eve: str) -> bytes:
        """CSI an eavesdropper at ``eve`` measures for the packet in ``event``."""
        if eve in (event.sender, event.receiver):
            raise ValueError("eavesdropper must be a third endpoint")
        if not self.config.eavesdropper_decorrelation:
            return event.csi_at_receiver
        return synthesize_csi(self.config.link_seed, event.sender, eve, event.seq)
