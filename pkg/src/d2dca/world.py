"""A self-contained simulated edge/gateway pair.

``World`` owns both state machines, the channel, a simulated clock and a
transcript. Honest runs, scenario runs and attack scripts all drive it
through the same ``send``/``deliver`` path so every packet gets CSI from the
channel and every outcome lands in the transcript.
"""

from __future__ import annotations

import dataclasses
import random
from typing import Callable, Optional

from .channel import Channel, ChannelConfig, DeliveryEvent, Dropped
from .crypto import Seed, hash_bytes
from .protocol import DeviceId, Edge, SessionConfig, decode, encode, enroll
from .protocol.errors import Abort, MalformedMessage, Undecodable
from .protocol.wire import M5, M8, ProtocolMessage, message_name
from .transcript import Transcript

EDGE = "edge"
GATEWAY = "gateway"
DEFAULT_EDGE_RAW = b"edge-0001"
DEFAULT_GW_RAW = b"gateway-01"

Tap = Callable[[DeliveryEvent], None]


def _summary(wire: bytes) -> str:
    return f"{len(wire)}B:{hash_bytes(wire)[:6].hex()}"


class World:
    def __init__(
        self,
        seed: int,
        session: Optional[SessionConfig] = None,
        channel: Optional[ChannelConfig] = None,
        *,
        edge_raw: bytes = DEFAULT_EDGE_RAW,
        gw_raw: bytes = DEFAULT_GW_RAW,
    ) -> None:
        self.seed = seed
        self.session = session or SessionConfig()
        root = random.Random(seed)
        if channel is None:
            channel = ChannelConfig(link_seed=root.randbytes(32))
        else:
            root.randbytes(32)  # keep the remaining streams independent of the choice
        enroll_seed = Seed(root.randbytes(32))
        edge_rng = random.Random(root.getrandbits(64))
        gw_rng = random.Random(root.getrandbits(64))
        self.attacker_rng = random.Random(root.getrandbits(64))
        self.edge_id = DeviceId.from_raw(edge_raw)
        self.gw_id = DeviceId.from_raw(gw_raw)
        self.edge, self.gateway = enroll(
            self.edge_id, self.gw_id, enroll_seed, self.session, edge_rng, gw_rng
        )
        self.channel = Channel(channel)
        self.transcript = Transcript()
        self.now = 0
        self.taps: list[Tap] = []

    # --- clock ---

    def advance(self, ms: int) -> None:
        self.now += ms

    def set_time(self, t: int) -> None:
        if t < self.now:
            raise ValueError("clock cannot run backwards")
        self.now = t

    def log(self, actor: str, kind: str, **kw) -> None:
        self.transcript.add(self.now, actor, kind, **kw)

    # --- packets ---

    def send(self, sender: str, receiver: str, msg: ProtocolMessage | bytes) -> DeliveryEvent:
        """Put a message (or raw wire bytes) on the link. May raise ``Dropped``."""
        wire = msg if isinstance(msg, bytes) else encode(msg)
        name = _wire_name(wire)
        try:
            ev = self.channel.transmit(sender, receiver, wire, self.now)
        except Dropped:
            self.log(sender, "drop", msg=name, detail=f"to {receiver}")
            raise
        self.log(sender, "send", msg=name, detail=f"to {receiver} {_summary(wire)}")
        for tap in self.taps:
            tap(ev)
        return ev

    def deliver(self, ev: DeliveryEvent, edge: Optional[Edge] = None):
        """Hand a delivered packet to its receiver; returns the receiver's reply.

        ``edge`` substitutes the edge object that owns the receiving endpoint
        (a clone sitting on the original's address, say). Rejections are
        logged and re-raised as ``Abort``.
        """
        self.set_time(max(self.now, ev.sim_time))
        receiver = self.gateway if ev.receiver == GATEWAY else (edge or self.edge)
        try:
            msg = decode(ev.message)
        except MalformedMessage as exc:
            err = Undecodable("decode", str(exc))
            self._abort_receiver(ev, receiver, err)
            self.log(ev.receiver, "abort", msg=None, error=err.failure_point)
            raise err from None
        dev = dataclasses.replace(ev, message=msg)
        name = message_name(msg)
        try:
            reply = receiver.handle(dev)
        except Abort as exc:
            self.log(ev.receiver, "abort", msg=name, error=exc.failure_point)
            raise
        self.log(ev.receiver, "recv", msg=name)
        if receiver is self.gateway:
            if isinstance(msg, M5):
                self.log(GATEWAY, "auth_success", detail=f"t_m={self.now}")
            elif isinstance(msg, M8):
                s = self.gateway.session(self.gateway.bindings[ev.sender])
                self.log(GATEWAY, "round_complete", detail=f"ctr={s.ctr_g}")
        return reply

    def _abort_receiver(self, ev: DeliveryEvent, receiver, err: Abort) -> None:
        if receiver is self.gateway:
            edge_hash = self.gateway.bindings.get(ev.sender)
            if edge_hash is not None:
                self.gateway.abort_session(edge_hash, err)
        else:
            receiver.abort(err)

    def exchange(self, sender: str, receiver: str, msg, edge: Optional[Edge] = None):
        return self.deliver(self.send(sender, receiver, msg), edge=edge)

    # --- honest flows ---

    def handshake(self, edge: Optional[Edge] = None, endpoint: str = EDGE) -> dict:
        """Run M1..M5 between ``edge`` (default: the enrolled edge) and the gateway."""
        edge = edge or self.edge
        msgs = {"M1": edge.begin_auth()}
        msgs["M2"] = self.exchange(endpoint, GATEWAY, msgs["M1"])
        msgs["M3"] = self.exchange(GATEWAY, endpoint, msgs["M2"], edge=edge)
        msgs["M4"] = self.exchange(endpoint, GATEWAY, msgs["M3"])
        msgs["M5"] = self.exchange(GATEWAY, endpoint, msgs["M4"], edge=edge)
        self.exchange(endpoint, GATEWAY, msgs["M5"])
        return msgs

    def first_round(self, edge: Optional[Edge] = None, endpoint: str = EDGE) -> dict:
        """Edge opens the CA phase (M6) and the first round completes (M7, M8)."""
        edge = edge or self.edge
        msgs = {"M6": edge.ca_start()}
        msgs["M7"] = self.exchange(endpoint, GATEWAY, msgs["M6"])
        msgs["M8"] = self.exchange(GATEWAY, endpoint, msgs["M7"], edge=edge)
        if msgs["M8"] is not None:
            self.exchange(endpoint, GATEWAY, msgs["M8"])
        return msgs

    def next_round(self, edge: Optional[Edge] = None, endpoint: str = EDGE) -> dict:
        """Gateway loops back to Point X; returns the round's M7 and the edge's reply."""
        edge = edge or self.edge
        msgs = {"M7": self.point_x()}
        msgs["M8"] = self.exchange(GATEWAY, endpoint, msgs["M7"], edge=edge)
        if msgs["M8"] is not None:
            self.exchange(endpoint, GATEWAY, msgs["M8"])
        return msgs

    def point_x(self):
        try:
            m7 = self.gateway.point_x(self.edge_id.id_hash, self.now)
        except Abort as exc:
            self.log(GATEWAY, "abort", error=exc.failure_point)
            raise
        s = self.gateway.session(self.edge_id.id_hash)
        if s.expired:
            self.log(GATEWAY, "expired", detail=f"t_m={s.t_m} t_c={self.now}")
        return m7


def _wire_name(wire: bytes) -> str:
    if wire and 1 <= wire[0] <= 8:
        return f"M{wire[0]}"
    return "??"
