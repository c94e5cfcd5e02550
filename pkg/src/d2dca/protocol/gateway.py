"""Gateway state machine.

A gateway serves many edges. Each enrolled edge has at most one session,
keyed by its id hash; a fresh M1 for an id supersedes whatever session that
id had. Envelope messages (M5, M6, M8) carry no clear identity, so they are
routed through the sender endpoint bound at M1 time.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional

from ..channel import DeliveryEvent
from ..crypto import (
    ZERO_KEY,
    AuthFailure,
    ExponentOutOfBounds,
    Seed,
    TooShort,
    aead_open,
    aead_seal,
    compute_f,
    hmac_tag,
    pad_exponent,
    tags_equal,
    unpad_exponent,
    xor_bytes,
    xor_mask,
)
from .common import DeviceId, SessionConfig
from .errors import (
    AckZero,
    AeadFailure,
    BadExponent,
    CounterMismatch,
    CsiMismatch,
    FunctionMismatch,
    HandshakeTimeout,
    MalformedMessage,
    OutOfPhase,
    TagMismatch,
    Undecodable,
    UnknownEdge,
)
from .registry import Credentials, Registry
from .wire import (
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    M7Plain,
    pack_m7_plain,
    unpack_m5_plain,
    unpack_m6_plain,
    unpack_m8_plain,
)


class GatewayPhase(enum.Enum):
    IDLE = "idle"
    AWAIT_M3 = "await_m3"
    AWAIT_M5 = "await_m5"
    IN_SESSION = "in_session"
    ABORTED = "aborted"


@dataclass
class GatewaySession:
    edge_id_hash: bytes
    phase: GatewayPhase = GatewayPhase.IDLE
    c_i: bytes = ZERO_KEY
    r: bytes = ZERO_KEY
    e_key: bytes = ZERO_KEY
    sn_key: bytes = ZERO_KEY
    a: int = 0
    b: int = 0
    f: int = 0
    ctr_g: int = 0
    t_m: int = 0
    T: int = 0
    awaiting_m8: bool = False
    rounds: int = 0
    expired: bool = False
    last_abort: Optional[str] = None


@dataclass
class Gateway:
    device: DeviceId
    config: SessionConfig
    rng: random.Random = field(repr=False)
    registry: Registry = field(default_factory=Registry)
    sessions: dict = field(default_factory=dict)
    bindings: dict = field(default_factory=dict)

    def _nonce(self, n: int) -> bytes:
        return self.rng.randbytes(n)

    def session(self, edge_id_hash: bytes) -> Optional[GatewaySession]:
        return self.sessions.get(edge_id_hash)

    def _fail(self, s: Optional[GatewaySession], exc):
        if s is not None:
            s.phase = GatewayPhase.ABORTED
            s.sn_key = ZERO_KEY
            s.awaiting_m8 = False
            s.last_abort = exc.failure_point
        return exc

    def _route(self, op: str, ev: DeliveryEvent) -> GatewaySession:
        edge_id_hash = self.bindings.get(ev.sender)
        s = self.sessions.get(edge_id_hash) if edge_id_hash is not None else None
        if s is None:
            raise UnknownEdge(op, f"no session bound to endpoint {ev.sender!r}")
        return s

    def _open(self, op: str, s: GatewaySession, envelope: bytes) -> bytes:
        try:
            return aead_open(s.sn_key, envelope)
        except (AuthFailure, TooShort) as exc:
            raise self._fail(s, AeadFailure(op, str(exc))) from None

    def abort_session(self, edge_id_hash: bytes, exc) -> None:
        self._fail(self.sessions.get(edge_id_hash), exc)

    def timeout(self, edge_id_hash: bytes) -> None:
        """Abort a session whose next expected message never came."""
        s = self.sessions.get(edge_id_hash)
        if s is None:
            return
        op = {
            GatewayPhase.AWAIT_M3: "gw_on_m3",
            GatewayPhase.AWAIT_M5: "gw_on_m5",
        }.get(s.phase, "gw_on_m8" if s.awaiting_m8 else "gw_point_x")
        raise self._fail(s, HandshakeTimeout(op))

    # --- mutual authentication ---

    def on_m1(self, msg: M1, ev: DeliveryEvent) -> M2:
        entry = self.registry.get(msg.edge_id_hash)
        if entry is None:
            # unknown devices have to go through enrollment first
            raise UnknownEdge("gw_on_m1")
        s = GatewaySession(msg.edge_id_hash, phase=GatewayPhase.AWAIT_M3)
        s.c_i = ev.csi_at_receiver
        s.r = entry.current.seed.peek()
        self.sessions[msg.edge_id_hash] = s
        self.bindings[ev.sender] = msg.edge_id_hash
        return M2(self.device.id_hash)

    def _match_m3(self, entry, msg: M3) -> Optional[tuple[str, Credentials, int]]:
        sources = ("current", "previous") if self.config.credential_rollback else ("current",)
        for which in sources:
            creds: Optional[Credentials] = getattr(entry, which)
            if creds is None:
                continue
            start = creds.seed.draw_index
            for idx in range(start, start + self.config.resync_window):
                r = creds.seed.at(idx)
                expected = hmac_tag(creds.e_init, [msg.edge_id_hash, msg.m_a, r])
                if tags_equal(expected, msg.tag):
                    return which, creds, idx
        return None

    def on_m3(self, msg: M3) -> M4:
        op = "gw_on_m3"
        s = self.sessions.get(msg.edge_id_hash)
        if s is None:
            raise UnknownEdge(op)
        if s.phase is not GatewayPhase.AWAIT_M3:
            raise self._fail(s, OutOfPhase(op, f"phase {s.phase.value}"))
        entry = self.registry[msg.edge_id_hash]
        match = self._match_m3(entry, msg)
        if match is None:
            raise self._fail(s, TagMismatch(op))
        which, creds, idx = match
        if which == "previous":
            # the edge rolled back an unconfirmed rotation; follow it
            entry.current = creds
        entry.previous = None
        entry.advance("current", idx + 1)
        s.r = creds.seed.at(idx)
        c_r = xor_mask(msg.m_a, creds.e_init, s.r)
        s.e_key = c_r
        m_b = xor_mask(s.c_i, s.e_key, s.r)
        tag = hmac_tag(s.e_key, [m_b, self.device.id_hash, s.r])
        s.phase = GatewayPhase.AWAIT_M5
        return M4(self.device.id_hash, tag, m_b)

    def on_m5(self, msg: M5, s: GatewaySession, now: int) -> None:
        """Finish mutual authentication; on success the session enters the CA phase."""
        op = "gw_on_m5"
        if s.phase is not GatewayPhase.AWAIT_M5:
            raise self._fail(s, OutOfPhase(op, f"phase {s.phase.value}"))
        s.sn_key = xor_bytes(s.e_key, s.c_i)
        try:
            p = unpack_m5_plain(self._open(op, s, msg.envelope))
        except MalformedMessage as exc:
            raise self._fail(s, Undecodable(op, str(exc))) from None
        if p.ack != 1:
            raise self._fail(s, AckZero(op))
        if not tags_equal(p.c_i, s.c_i):
            raise self._fail(s, CsiMismatch(op))
        entry = self.registry[s.edge_id_hash]
        entry.previous = entry.current if self.config.credential_rollback else None
        entry.current = Credentials(s.sn_key, Seed(p.new_seed, 0))
        s.ctr_g = 1
        s.t_m = now
        s.T = self.config.T
        s.a = 0
        s.awaiting_m8 = False
        s.phase = GatewayPhase.IN_SESSION

    # --- continuous authentication ---

    def on_m6(self, msg: M6, s: GatewaySession, now: int) -> M7:
        op = "gw_point_x"
        if s.phase is not GatewayPhase.IN_SESSION:
            raise self._fail(s, OutOfPhase(op, f"phase {s.phase.value}"))
        try:
            p = unpack_m6_plain(self._open(op, s, msg.envelope))
        except MalformedMessage as exc:
            raise self._fail(s, Undecodable(op, str(exc))) from None
        if s.a:
            raise self._fail(s, OutOfPhase(op, "exponent already exchanged"))
        if not tags_equal(p.edge_id_hash, s.edge_id_hash):
            raise self._fail(s, UnknownEdge(op, "M6 identity differs from session"))
        try:
            s.a = unpad_exponent(xor_mask(p.m_c, s.sn_key, s.r), self.config.exponent_max)
        except ExponentOutOfBounds as exc:
            raise self._fail(s, BadExponent(op, str(exc))) from None
        return self.point_x(s.edge_id_hash, now)

    def point_x(self, edge_id_hash: bytes, now: int) -> M7:
        """Loop head of the CA phase: check expiry, then issue the next challenge."""
        op = "gw_point_x"
        s = self.sessions.get(edge_id_hash)
        if s is None:
            raise UnknownEdge(op)
        if s.phase is not GatewayPhase.IN_SESSION or not s.a or s.awaiting_m8:
            raise self._fail(s, OutOfPhase(op, f"phase {s.phase.value}"))
        elapsed = now - s.t_m
        if elapsed > s.T:
            plain = M7Plain(ack=0, f=0, a=s.a, t=0, m_d=ZERO_KEY, ctr_g=s.ctr_g)
            m7 = M7(aead_seal(s.sn_key, pack_m7_plain(plain), self._nonce))
            s.expired = True
            s.phase = GatewayPhase.IDLE
            s.sn_key = ZERO_KEY
            return m7
        if edge_id_hash not in self.registry:
            raise self._fail(s, UnknownEdge(op))
        s.b = self.rng.randint(2, self.config.exponent_max)
        s.ctr_g += 1
        s.f = compute_f(elapsed, s.a, s.b, self.config.exponent_max)
        m_d = xor_mask(pad_exponent(s.b), s.sn_key, s.r)
        plain = M7Plain(ack=1, f=s.f, a=s.a, t=elapsed, m_d=m_d, ctr_g=s.ctr_g)
        s.awaiting_m8 = True
        return M7(aead_seal(s.sn_key, pack_m7_plain(plain), self._nonce))

    def on_m8(self, msg: M8, s: GatewaySession) -> None:
        """Close a CA round; the caller schedules the next ``point_x``."""
        op = "gw_on_m8"
        if s.phase is not GatewayPhase.IN_SESSION:
            raise self._fail(s, OutOfPhase(op, f"phase {s.phase.value}"))
        try:
            p = unpack_m8_plain(self._open(op, s, msg.envelope))
        except MalformedMessage as exc:
            raise self._fail(s, Undecodable(op, str(exc))) from None
        if not s.awaiting_m8:
            raise self._fail(s, OutOfPhase(op, "no round outstanding"))
        if p.ctr_e != s.ctr_g:
            raise self._fail(s, CounterMismatch(op, f"ctr_g={s.ctr_g} ctr_e={p.ctr_e}"))
        if p.f != s.f:
            raise self._fail(s, FunctionMismatch(op))
        s.awaiting_m8 = False
        s.rounds += 1
        # a completed round proves the edge runs on the rotated credentials
        self.registry[s.edge_id_hash].previous = None

    # --- dispatch ---

    def handle(self, ev: DeliveryEvent):
        msg = ev.message
        if isinstance(msg, M1):
            return self.on_m1(msg, ev)
        if isinstance(msg, M3):
            return self.on_m3(msg)
        if isinstance(msg, M5):
            return self.on_m5(msg, self._route("gw_on_m5", ev), ev.sim_time)
        if isinstance(msg, M6):
            return self.on_m6(msg, self._route("gw_point_x", ev), ev.sim_time)
        if isinstance(msg, M8):
            return self.on_m8(msg, self._route("gw_on_m8", ev))
        raise OutOfPhase("gw_handle", f"unexpected {type(msg).__name__}")
