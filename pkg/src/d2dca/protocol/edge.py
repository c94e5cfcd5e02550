"""Edge-device state machine."""

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
    prng_draw,
    tags_equal,
    unpad_exponent,
    xor_bytes,
    xor_mask,
)
from .common import DeviceId, SessionConfig
from .errors import (
    AeadFailure,
    BadExponent,
    CounterMismatch,
    ExponentEchoMismatch,
    FunctionMismatch,
    HandshakeTimeout,
    MalformedMessage,
    OutOfPhase,
    TagMismatch,
    Undecodable,
    WrongGateway,
)
from .registry import Credentials
from .wire import (
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    M5Plain,
    M6Plain,
    M8Plain,
    pack_m5_plain,
    pack_m6_plain,
    pack_m8_plain,
    unpack_m7_plain,
)


class EdgePhase(enum.Enum):
    INIT = "init"
    AWAIT_M2 = "await_m2"
    AWAIT_M4 = "await_m4"
    AWAIT_M7 = "await_m7"
    # session ran out (ACK=0 received); mutual authentication must rerun
    AUTHENTICATED = "authenticated_expired"
    ABORTED = "aborted"


_RESTARTABLE = {EdgePhase.INIT, EdgePhase.ABORTED, EdgePhase.AUTHENTICATED}


@dataclass
class Edge:
    device: DeviceId
    gw_id_hash: bytes
    e_init: bytes
    seed: Seed
    config: SessionConfig
    rng: random.Random = field(repr=False)

    phase: EdgePhase = EdgePhase.INIT
    sn_key: bytes = ZERO_KEY
    r: bytes = ZERO_KEY
    c_r: bytes = ZERO_KEY
    a: int = 0
    ctr_e: int = 0
    # set between sending M5 and the first authentic M7
    fallback: Optional[Credentials] = None
    last_abort: Optional[str] = None

    # --- helpers ---

    def _fail(self, exc):
        self.phase = EdgePhase.ABORTED
        self.sn_key = ZERO_KEY
        self.last_abort = exc.failure_point
        return exc

    def _expect(self, op: str, *phases: EdgePhase) -> None:
        if self.phase not in phases:
            raise self._fail(OutOfPhase(op, f"phase {self.phase.value}"))

    def _open(self, op: str, envelope: bytes) -> bytes:
        try:
            return aead_open(self.sn_key, envelope)
        except (AuthFailure, TooShort) as exc:
            raise self._fail(AeadFailure(op, str(exc))) from None

    def _nonce(self, n: int) -> bytes:
        return self.rng.randbytes(n)

    def abort(self, exc) -> None:
        """Externally imposed abort."""
        self._fail(exc)

    def timeout(self) -> None:
        """Abort because the expected next message never came."""
        op = {
            EdgePhase.AWAIT_M2: "edge_on_m2",
            EdgePhase.AWAIT_M4: "edge_on_m4",
            EdgePhase.AWAIT_M7: "edge_on_m7",
        }.get(self.phase, "edge_begin_auth")
        raise self._fail(HandshakeTimeout(op))

    # --- mutual authentication ---

    def begin_auth(self) -> M1:
        if self.phase not in _RESTARTABLE:
            raise OutOfPhase("edge_begin_auth", f"phase {self.phase.value}")
        if self.fallback is not None:
            # the gateway never confirmed the last rotation; use what it is known to hold
            self.e_init, self.seed = self.fallback.e_init, self.fallback.seed
            self.fallback = None
        self.sn_key = ZERO_KEY
        self.a = 0
        self.ctr_e = 0
        self.phase = EdgePhase.AWAIT_M2
        return M1(self.device.id_hash)

    def on_m2(self, msg: M2, ev: DeliveryEvent) -> M3:
        op = "edge_on_m2"
        self._expect(op, EdgePhase.AWAIT_M2)
        if not tags_equal(msg.gw_id_hash, self.gw_id_hash):
            raise self._fail(WrongGateway(op))
        self.c_r = ev.csi_at_receiver
        self.r, self.seed = prng_draw(self.seed)
        m_a = xor_mask(self.c_r, self.e_init, self.r)
        tag = hmac_tag(self.e_init, [self.device.id_hash, m_a, self.r])
        self.phase = EdgePhase.AWAIT_M4
        return M3(self.device.id_hash, m_a, tag)

    def on_m4(self, msg: M4) -> M5:
        op = "edge_on_m4"
        self._expect(op, EdgePhase.AWAIT_M4)
        if not tags_equal(msg.gw_id_hash, self.gw_id_hash):
            raise self._fail(WrongGateway(op))
        e_key = self.c_r
        expected = hmac_tag(e_key, [msg.m_b, self.gw_id_hash, self.r])
        if not tags_equal(expected, msg.tag):
            raise self._fail(TagMismatch(op))
        c_i = xor_mask(msg.m_b, e_key, self.r)
        self.sn_key = xor_bytes(self.c_r, c_i)
        if self.config.credential_rollback:
            self.fallback = Credentials(self.e_init, self.seed)
        self.e_init = self.sn_key
        self.seed = Seed(self.rng.randbytes(32), 0)
        self.ctr_e = 1
        self.a = 0
        plain = pack_m5_plain(M5Plain(c_i, self.seed.value, 1))
        self.phase = EdgePhase.AWAIT_M7
        return M5(aead_seal(self.sn_key, plain, self._nonce))

    # --- continuous authentication ---

    def ca_start(self) -> M6:
        op = "edge_ca_start"
        if self.phase is not EdgePhase.AWAIT_M7 or self.a:
            raise OutOfPhase(op, f"phase {self.phase.value}")
        self.a = self.rng.randint(2, self.config.exponent_max)
        m_c = xor_mask(pad_exponent(self.a), self.sn_key, self.r)
        plain = pack_m6_plain(M6Plain(m_c, self.device.id_hash))
        return M6(aead_seal(self.sn_key, plain, self._nonce))

    def on_m7(self, msg: M7) -> Optional[M8]:
        """Answer a gateway round. Returns None when the gateway reports expiry."""
        op = "edge_on_m7"
        self._expect(op, EdgePhase.AWAIT_M7)
        try:
            p = unpack_m7_plain(self._open(op, msg.envelope))
        except MalformedMessage as exc:
            raise self._fail(Undecodable(op, str(exc))) from None
        # anything authentic under sn_key proves the gateway adopted the rotation
        self.fallback = None
        if not self.a:
            raise self._fail(OutOfPhase(op, "continuous phase not started"))
        if p.ack == 0:
            self.phase = EdgePhase.AUTHENTICATED
            self.sn_key = ZERO_KEY
            return None
        if p.ack != 1:
            raise self._fail(Undecodable(op, f"ack byte {p.ack}"))
        if p.a != self.a:
            raise self._fail(ExponentEchoMismatch(op))
        if self.ctr_e + 1 != p.ctr_g:
            raise self._fail(CounterMismatch(op, f"ctr_e={self.ctr_e} ctr_g={p.ctr_g}"))
        self.ctr_e += 1
        try:
            b = unpad_exponent(xor_mask(p.m_d, self.sn_key, self.r), self.config.exponent_max)
            f_local = compute_f(p.t, self.a, b, self.config.exponent_max)
        except ExponentOutOfBounds as exc:
            raise self._fail(BadExponent(op, str(exc))) from None
        if f_local != p.f:
            raise self._fail(FunctionMismatch(op))
        plain = pack_m8_plain(M8Plain(f_local, self.ctr_e))
        return M8(aead_seal(self.sn_key, plain, self._nonce))

    # --- dispatch ---

    def handle(self, ev: DeliveryEvent):
        msg = ev.message
        if isinstance(msg, M2):
            return self.on_m2(msg, ev)
        if isinstance(msg, M4):
            return self.on_m4(msg)
        if isinstance(msg, M7):
            return self.on_m7(msg)
        raise self._fail(OutOfPhase("edge_handle", f"unexpected {type(msg).__name__}"))
