"""Attacker models run against a simulated edge/gateway pair.

Each ``run_*`` function builds its own ``World`` from a seed, plays one attack
and returns an ``AttackVerdict``. Attackers learn only what their channel
position gives them: packets seen through a tap, the public id hashes, and,
for the cloner alone, an explicit snapshot of the edge.
"""

from __future__ import annotations

import copy
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .channel import ChannelConfig, DeliveryEvent
from .crypto import Seed, aead_seal, hmac_tag, xor_bytes, xor_mask
from .protocol import SessionConfig, enroll
from .protocol.edge import Edge, EdgePhase
from .protocol.errors import Abort, DuplicateEnrollment, HandshakeTimeout
from .protocol.gateway import GatewayPhase
from .protocol.wire import (
    M1,
    M2,
    M3,
    M4,
    M6,
    M7,
    M6_PLAIN_LEN,
    M7_PLAIN_LEN,
    decode,
    encode,
)
from .transcript import Transcript
from .world import EDGE, GATEWAY, World

EVE = "eve"

MESSAGE_CLASSES = ("M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8")

REPLAY_PREDICTIONS = {
    "M1": "gw_on_m3:HandshakeTimeout",
    "M3": "gw_on_m3:TagMismatch",
    "M5": "gw_on_m5:AeadFailure",
    "M6": "gw_point_x:AeadFailure",
    "M7": "edge_on_m7:CounterMismatch",
    "M8": "gw_on_m8:CounterMismatch",
}

IMPERSONATION_PREDICTIONS = {
    "fake_edge": "gw_on_m3:TagMismatch",
    "fake_gateway": "edge_on_m4:TagMismatch",
    "fake_edge_ca": "gw_point_x:AeadFailure",
    "fake_gateway_ca": "edge_on_m7:AeadFailure",
}

SYBIL_PREDICTIONS = {
    "stolen_id": "gw_on_m3:TagMismatch",
    "gateway_id_disclosure": "edge_on_m4:TagMismatch",
    "duplicate_enrollment": "enroll:DuplicateEnrollment",
    "concurrent_session": "gw_on_m3:TagMismatch",
}

CLONING_PREDICTIONS = {
    "after_expiry": "gw_point_x:AeadFailure",
    "within_T_silent": None,
    "within_T_interleaved": "edge_on_m7:CounterMismatch",
}

EAVESDROP_PREDICTIONS = {"decorrelated": None, "correlated": None}


@dataclass
class AttackVerdict:
    kind: str
    variant: str
    seed: int
    attack_succeeded: bool
    failure_point: Optional[str] = None
    expected_failure_point: Optional[str] = None
    residual_risk: bool = False
    notes: list[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    transcript: Transcript = field(default_factory=Transcript, repr=False)

    @property
    def prediction_met(self) -> bool:
        if self.expected_failure_point is None:
            return True
        return self.failure_point == self.expected_failure_point

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "variant": self.variant,
            "seed": self.seed,
            "attack_succeeded": self.attack_succeeded,
            "failure_point": self.failure_point,
            "expected_failure_point": self.expected_failure_point,
            "residual_risk": self.residual_risk,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.metrics:
            out["metrics"] = dict(self.metrics)
        return out


class Recorder:
    """Passive tap: keeps every wire packet it sees, grouped by message class."""

    def __init__(self, world: World, eve: str = EVE) -> None:
        self.world = world
        self.eve = eve
        self.packets: list[tuple[str, bytes, Optional[bytes]]] = []
        world.taps.append(self)

    def __call__(self, ev: DeliveryEvent) -> None:
        name = f"M{ev.message[0]}" if ev.message else "??"
        if self.eve in (ev.sender, ev.receiver):
            csi = ev.csi_at_receiver if ev.receiver == self.eve else None
        else:
            csi = self.world.channel.observe_as_eavesdropper(ev, self.eve)
        self.packets.append((name, ev.message, csi))

    def latest(self, name: str) -> bytes:
        for n, wire, _ in reversed(self.packets):
            if n == name:
                return wire
        raise KeyError(name)


def _attempt(fn: Callable[[], object]) -> tuple[object, Optional[str]]:
    try:
        return fn(), None
    except Abort as exc:
        return None, exc.failure_point


def _verdict(w: World, kind: str, variant: str, predictions: dict, **kw) -> AttackVerdict:
    v = AttackVerdict(kind, variant, w.seed, expected_failure_point=predictions.get(variant), **kw)
    w.log("attacker", "verdict", detail=f"{kind}/{variant} succeeded={v.attack_succeeded}",
          error=v.failure_point)
    v.transcript = w.transcript
    return v


def _check_variant(variant: str, table: dict) -> None:
    if variant not in table:
        raise ValueError(f"unknown variant {variant!r}; choose from {sorted(table)}")


def _edge_session(w: World):
    return w.gateway.session(w.edge_id.id_hash)


def _forged_m3(w: World, rng: random.Random) -> M3:
    """Best M3 an attacker without E_init or the seed can make: everything guessed."""
    key, r, csi = rng.randbytes(32), rng.randbytes(32), rng.randbytes(32)
    m_a = xor_mask(csi, key, r)
    return M3(w.edge_id.id_hash, m_a, hmac_tag(key, [w.edge_id.id_hash, m_a, r]))


def _forged_m4(w: World, rng: random.Random) -> M4:
    key, r, csi = rng.randbytes(32), rng.randbytes(32), rng.randbytes(32)
    m_b = xor_mask(csi, key, r)
    return M4(w.gw_id.id_hash, hmac_tag(key, [m_b, w.gw_id.id_hash, r]), m_b)


def _honest_tick(w: World, edge: Optional[Edge] = None) -> None:
    """One ``ca_round_interval`` worth of honest activity."""
    edge = edge or w.edge
    if edge.phase is EdgePhase.AWAIT_M7 and not edge.a:
        w.first_round(edge)
        return
    out = w.next_round(edge)
    if out["M8"] is None:
        w.handshake(edge)


def _run_honest_until(w: World, t_end: int) -> None:
    step = w.session.ca_round_interval
    while w.now + step <= t_end:
        w.advance(step)
        _honest_tick(w)


# --- replay ---

def run_replay_attack(seed: int, variant: str, session: Optional[SessionConfig] = None,
                      channel: Optional[ChannelConfig] = None) -> AttackVerdict:
    """Record one honest session, then replay a message of class ``variant``."""
    _check_variant(variant, REPLAY_PREDICTIONS)
    w = World(seed, session, channel)
    eve = Recorder(w)
    step = w.session.ca_round_interval
    w.handshake()
    w.advance(step)
    w.first_round()
    old = {name: eve.latest(name) for name in MESSAGE_CLASSES if name not in ("M2", "M4")}
    notes: list[str] = []
    succeeded = False
    point: Optional[str] = None
    w.advance(step)

    if variant == "M1":
        reply, point = _attempt(lambda: w.exchange(EVE, GATEWAY, old["M1"]))
        s = _edge_session(w)
        if point is None and s.phase is GatewayPhase.AWAIT_M3:
            notes.append("replayed M1 earned an M2 but no verifiable M3 exists; gateway stalls")
            w.advance(step)
            _, point = _attempt(lambda: w.gateway.timeout(w.edge_id.id_hash))
            w.log(GATEWAY, "abort", error=point)
    elif variant == "M3":
        _, point = _attempt(lambda: w.exchange(EVE, GATEWAY, old["M1"]))
        if point is None:
            reply, point = _attempt(lambda: w.exchange(EVE, GATEWAY, old["M3"]))
            succeeded = point is None
    elif variant == "M5":
        # fresh handshake by the real edge up to M5, which eve swaps for the recorded one
        w.edge.abort(HandshakeTimeout("edge_on_m7"))
        m1 = w.edge.begin_auth()
        m2 = w.exchange(EDGE, GATEWAY, m1)
        m3 = w.exchange(GATEWAY, EDGE, m2)
        m4 = w.exchange(EDGE, GATEWAY, m3)
        w.exchange(GATEWAY, EDGE, m4)
        _, point = _attempt(lambda: w.exchange(EDGE, GATEWAY, old["M5"]))
        succeeded = point is None
    elif variant == "M6":
        w.edge.abort(HandshakeTimeout("edge_on_m7"))
        w.handshake()
        _, point = _attempt(lambda: w.exchange(EDGE, GATEWAY, old["M6"]))
        succeeded = point is None
    elif variant == "M7":
        w.point_x()  # the fresh M7 is held back by eve
        _, point = _attempt(lambda: w.exchange(EVE, EDGE, old["M7"]))
        succeeded = point is None
    elif variant == "M8":
        m7 = w.point_x()
        w.send(GATEWAY, EDGE, m7)  # eve blocks delivery and answers with the stale M8
        _, point = _attempt(lambda: w.exchange(EDGE, GATEWAY, old["M8"]))
        succeeded = point is None
    return _verdict(w, "Replayer", variant, REPLAY_PREDICTIONS, attack_succeeded=succeeded,
                    failure_point=point, notes=notes)


# --- impersonation ---

def run_impersonation_attack(seed: int, variant: str, session: Optional[SessionConfig] = None,
                             channel: Optional[ChannelConfig] = None) -> AttackVerdict:
    """Eve knows both public id hashes and nothing else."""
    _check_variant(variant, IMPERSONATION_PREDICTIONS)
    w = World(seed, session, channel)
    rng = w.attacker_rng
    notes: list[str] = []
    succeeded = False
    point = None

    if variant == "fake_edge":
        _, point = _attempt(lambda: w.exchange(EVE, GATEWAY, M1(w.edge_id.id_hash)))
        if point is None:
            reply, point = _attempt(lambda: w.exchange(EVE, GATEWAY, _forged_m3(w, rng)))
            succeeded = point is None
        if _edge_session(w).phase is not GatewayPhase.IN_SESSION:
            notes.append("gateway rejected the impostor edge")
    elif variant == "fake_gateway":
        m1 = w.edge.begin_auth()
        w.send(EDGE, EVE, m1)
        m3, point = _attempt(lambda: w.exchange(EVE, EDGE, M2(w.gw_id.id_hash)))
        if point is None:
            w.send(EDGE, EVE, m3)
            _, point = _attempt(lambda: w.exchange(EVE, EDGE, _forged_m4(w, rng)))
            succeeded = point is None
        if w.edge.phase is EdgePhase.ABORTED:
            notes.append("edge rejected the impostor gateway")
    elif variant == "fake_edge_ca":
        w.handshake()
        w.advance(w.session.ca_round_interval)
        w.first_round()
        w.advance(w.session.ca_round_interval)
        guess = rng.randbytes(32)
        m6 = M6(aead_seal(guess, rng.randbytes(M6_PLAIN_LEN), rng.randbytes))
        _, point = _attempt(lambda: w.exchange(EDGE, GATEWAY, m6))
        succeeded = point is None
    elif variant == "fake_gateway_ca":
        w.handshake()
        w.advance(w.session.ca_round_interval)
        w.first_round()
        w.advance(w.session.ca_round_interval)
        guess = rng.randbytes(32)
        m7 = M7(aead_seal(guess, rng.randbytes(M7_PLAIN_LEN), rng.randbytes))
        _, point = _attempt(lambda: w.exchange(EVE, EDGE, m7))
        succeeded = point is None
    return _verdict(w, "Impersonator", variant, IMPERSONATION_PREDICTIONS,
                    attack_succeeded=succeeded, failure_point=point, notes=notes)


# --- man in the middle ---

def _bit_positions(nbits: int, count: int = 64, full: bool = False) -> list[int]:
    if full or nbits <= count:
        return list(range(nbits))
    return sorted({round(i * (nbits - 1) / (count - 1)) for i in range(count)})


def _flip(wire: bytes, bit: int) -> bytes:
    out = bytearray(wire)
    out[bit // 8] ^= 0x80 >> (bit % 8)
    return bytes(out)


def _field_spans(wire: bytes) -> list[tuple[str, int, int]]:
    msg = decode(wire)
    spans, pos = [("type", 0, 1)], 1
    for name, value in vars(msg).items():
        spans.append((name, pos, pos + len(value)))
        pos += len(value)
    if isinstance(msg, (M1, M2, M3, M4)):
        return spans
    # envelopes: split into nonce / ciphertext / tag
    _, start, end = spans[1]
    return [spans[0], ("nonce", start, start + 12), ("ciphertext", start + 12, end - 16),
            ("aead_tag", end - 16, end)]


def _stage(w: World, target: str) -> tuple[str, str, bytes]:
    """Run honestly until ``target`` is about to go on the air."""
    step = w.session.ca_round_interval
    m = w.edge.begin_auth()
    for name, sender, receiver in (
        ("M1", EDGE, GATEWAY), ("M2", GATEWAY, EDGE), ("M3", EDGE, GATEWAY),
        ("M4", GATEWAY, EDGE), ("M5", EDGE, GATEWAY),
    ):
        if name == target:
            return sender, receiver, encode(m)
        m = w.exchange(sender, receiver, m)
    w.advance(step)
    m = w.edge.ca_start()
    for name, sender, receiver in (("M6", EDGE, GATEWAY), ("M7", GATEWAY, EDGE),
                                   ("M8", EDGE, GATEWAY)):
        if name == target:
            return sender, receiver, encode(m)
        m = w.exchange(sender, receiver, m)
    raise ValueError(target)


def run_mitm_attack(seed: int, variant: str, session: Optional[SessionConfig] = None,
                    channel: Optional[ChannelConfig] = None, *, full_sweep: bool = False,
                    bit_positions: int = 64) -> AttackVerdict:
    """Mutate message class ``variant`` in flight: single-bit flips and whole-field rewrites.

    Every mutation is tried against its own copy of the world frozen just
    before the message is sent. A mutation counts as accepted if the
    receiver processes it without aborting.
    """
    _check_variant(variant, {m: None for m in MESSAGE_CLASSES})
    base = World(seed, session, channel)
    sender, receiver, wire = _stage(base, variant)
    rng = base.attacker_rng
    mutations: list[tuple[str, bytes]] = []
    for bit in _bit_positions(len(wire) * 8, bit_positions, full_sweep):
        mutations.append((f"bit{bit}", _flip(wire, bit)))
    for name, start, end in _field_spans(wire):
        if name == "type":
            continue
        mutated = wire[:start] + rng.randbytes(end - start) + wire[end:]
        if mutated != wire:
            mutations.append((f"field:{name}", mutated))

    points: Counter = Counter()
    accepted: list[str] = []
    first_point = None
    for label, mutated in mutations:
        w = copy.deepcopy(base)
        w.log("attacker", "mutate", msg=variant, detail=label)
        _, point = _attempt(lambda: w.exchange(sender, receiver, mutated))
        if point is None:
            accepted.append(label)
        else:
            points[point] += 1
            first_point = first_point or point
    v = AttackVerdict(
        "MitmMutator", variant, seed,
        attack_succeeded=bool(accepted),
        failure_point=first_point,
        metrics={"mutations": len(mutations), "accepted": len(accepted),
                 "accepted_labels": accepted, "failure_points": dict(sorted(points.items()))},
    )
    base.log("attacker", "verdict", detail=f"MitmMutator/{variant} mutations={len(mutations)} "
             f"accepted={len(accepted)}", error=first_point)
    v.transcript = base.transcript
    return v


# --- cloning ---

def _snapshot(w: World) -> Edge:
    clone = copy.deepcopy(w.edge)
    # the replica runs on the attacker's hardware and randomness
    clone.rng = random.Random(w.attacker_rng.getrandbits(64))
    return clone


def run_cloning_attack(seed: int, variant: str, session: Optional[SessionConfig] = None,
                       channel: Optional[ChannelConfig] = None, *,
                       clone_delay: Optional[int] = None,
                       clone_first: bool = False) -> AttackVerdict:
    """Eve gets a full copy of the edge right after its first CA round.

    ``after_expiry``: the original keeps running; the clone wakes up after
    ``clone_delay`` (> T) and tries both a CA round and a fresh handshake.
    ``within_T_silent``: the original goes offline and the clone answers the
    gateway's rounds in its place. ``within_T_interleaved``: original and
    clone both answer rounds, alternately.
    """
    _check_variant(variant, CLONING_PREDICTIONS)
    w = World(seed, session, channel)
    cfg = w.session
    step = cfg.ca_round_interval
    if clone_delay is None:
        clone_delay = cfg.T + 2 * step if variant == "after_expiry" else 2 * step
    if variant == "after_expiry" and clone_delay <= cfg.T:
        raise ValueError("after_expiry needs clone_delay > T")
    if variant != "after_expiry" and clone_delay >= cfg.T - step:
        raise ValueError("within-T variants need clone_delay < T - ca_round_interval")

    w.handshake()
    w.advance(step)
    w.first_round()
    t0 = w.now
    clone = _snapshot(w)
    w.log("attacker", "clone", detail=f"snapshot at t={t0} delay={clone_delay}")
    notes: list[str] = []
    metrics: dict = {"t_snapshot": t0, "clone_delay": clone_delay}
    point = None
    succeeded = False
    residual = False

    if variant == "after_expiry":
        _run_honest_until(w, t0 + clone_delay)
        w.set_time(t0 + clone_delay)
        # the clone still holds the old sn_key and exponent: replay the CA opening
        clone.a = 0
        m6 = clone.ca_start()
        _, point = _attempt(lambda: w.exchange(EDGE, GATEWAY, m6))
        ca_ok = point is None
        # then try to authenticate from scratch with the cloned E_init, at every
        # DRBG position the gateway might still accept
        hs_point = None
        base_index = clone.seed.draw_index
        for k in range(cfg.resync_window + 1):
            clone.abort(HandshakeTimeout("edge_on_m7"))
            clone.fallback = None
            clone.seed = Seed(clone.seed.value, base_index + k)
            _, hs_point = _attempt(lambda: w.handshake(clone))
            if hs_point is None:
                break
        metrics["handshake_failure_point"] = hs_point
        metrics["draw_indices_tried"] = k + 1
        succeeded = ca_ok or hs_point is None
        notes.append("original rotated SN_key/E_init at expiry; clone's copy is stale")
    else:
        s = _edge_session(w)
        t_act = t0 + clone_delay
        w.set_time(t_act)
        rounds_ok = 0
        turn = 0
        expired_at = None
        while True:
            use_clone = variant == "within_T_silent" or (turn % 2 == 0) == clone_first
            who = clone if use_clone else w.edge
            m7 = w.point_x()
            if s.expired:
                expired_at = w.now
                w.exchange(GATEWAY, EDGE, m7, edge=who)
                break
            reply, p = _attempt(lambda: w.exchange(GATEWAY, EDGE, m7, edge=who))
            turn += 1
            if p is not None:
                point = p
                metrics["aborted_party"] = "clone" if use_clone else "original"
                metrics["rounds_until_abort"] = turn
                break
            w.exchange(EDGE, GATEWAY, reply)
            if use_clone:
                rounds_ok += 1
            w.advance(step)
        metrics["clone_rounds_accepted"] = rounds_ok
        if variant == "within_T_silent":
            succeeded = rounds_ok > 0
            residual = True
            metrics["window_start"] = t_act
            metrics["window_end"] = expired_at
            metrics["window_ms"] = (expired_at - t_act) if expired_at is not None else None
            # original comes back, re-authenticates, and the clone's copy goes stale
            w.edge.abort(HandshakeTimeout("edge_on_m7"))
            w.handshake(w.edge)
            clone.abort(HandshakeTimeout("edge_on_m7"))
            _, closed_by = _attempt(lambda: w.handshake(clone))
            metrics["window_closed_by"] = closed_by
            notes.append("clone accepted while the original is silent and within T: "
                         "known residual risk, closed at the next key rotation")
        else:
            succeeded = rounds_ok > 0
            residual = succeeded
            if succeeded:
                notes.append("clone won the first interleaved round before divergence")
    return _verdict(w, "Cloner", variant, CLONING_PREDICTIONS, attack_succeeded=succeeded,
                    failure_point=point, residual_risk=residual, notes=notes, metrics=metrics)


# --- sybil ---

def run_sybil_attack(seed: int, variant: str, session: Optional[SessionConfig] = None,
                     channel: Optional[ChannelConfig] = None) -> AttackVerdict:
    """Eve presents a registered edge's id hash from a second endpoint."""
    _check_variant(variant, SYBIL_PREDICTIONS)
    w = World(seed, session, channel)
    rng = w.attacker_rng
    notes: list[str] = []
    metrics: dict = {}
    succeeded = False
    point = None

    if variant == "stolen_id":
        m2, point = _attempt(lambda: w.exchange(EVE, GATEWAY, M1(w.edge_id.id_hash)))
        if point is None:
            metrics["reached"] = "M2"
            _, point = _attempt(lambda: w.exchange(EVE, GATEWAY, _forged_m3(w, rng)))
            succeeded = point is None
    elif variant == "gateway_id_disclosure":
        m2, point = _attempt(lambda: w.exchange(EVE, GATEWAY, M1(w.edge_id.id_hash)))
        learned = m2.gw_id_hash if m2 is not None else None
        metrics["learned_gateway_id"] = learned is not None and learned == w.gw_id.id_hash
        notes.append("gateway identity disclosed by M2; keys do not derive from identities")
        w.advance(w.session.ca_round_interval)
        w.send(EDGE, EVE, w.edge.begin_auth())
        m3, point = _attempt(lambda: w.exchange(EVE, EDGE, M2(learned)))
        if point is None:
            w.send(EDGE, EVE, m3)
            _, point = _attempt(lambda: w.exchange(EVE, EDGE, _forged_m4(w, rng)))
            succeeded = point is None
    elif variant == "duplicate_enrollment":
        try:
            enroll(w.edge_id, w.gw_id, Seed(rng.randbytes(32)), w.session,
                   random.Random(rng.getrandbits(64)), gateway=w.gateway)
            succeeded = True
        except DuplicateEnrollment:
            point = "enroll:DuplicateEnrollment"
            w.log("gateway", "reject", detail="duplicate enrollment", error=point)
    elif variant == "concurrent_session":
        w.handshake()
        w.advance(w.session.ca_round_interval)
        w.first_round()
        _, point = _attempt(lambda: w.exchange(EVE, GATEWAY, M1(w.edge_id.id_hash)))
        if point is None:
            _, point = _attempt(lambda: w.exchange(EVE, GATEWAY, _forged_m3(w, rng)))
            succeeded = point is None
        # the displaced legitimate edge simply re-authenticates
        w.advance(w.session.ca_round_interval)
        w.edge.abort(HandshakeTimeout("edge_on_m7"))
        _, again = _attempt(lambda: w.handshake())
        metrics["legitimate_reauth_ok"] = again is None
        notes.append("one session per identity: a new M1 supersedes the old session")
    return _verdict(w, "SybilForger", variant, SYBIL_PREDICTIONS, attack_succeeded=succeeded,
                    failure_point=point, notes=notes, metrics=metrics)


# --- passive eavesdropping ---

def eavesdropper_candidates(packets: list[tuple[str, bytes, bytes]]) -> set[bytes]:
    """Every 32-byte value eve can read or XOR together from its view of a session."""
    singles: set[bytes] = set()
    for name, wire, csi in packets:
        if csi is not None:
            singles.add(csi)
        if name in ("M1", "M2", "M3", "M4"):
            body = wire[1:]
            for i in range(0, len(body), 32):
                singles.add(body[i:i + 32])
    values = list(singles)
    pairs = {xor_bytes(x, y) for i, x in enumerate(values) for y in values[i + 1:]}
    return singles | pairs


def run_eavesdrop_attack(seed: int, variant: str = "decorrelated",
                         session: Optional[SessionConfig] = None,
                         channel: Optional[ChannelConfig] = None) -> AttackVerdict:
    """Eve listens to a whole session and tries to name SN_key.

    ``correlated`` turns off eavesdropper decorrelation, i.e. eve measures the
    same CSI as the legitimate receivers. That breaks the physical-layer
    assumption the key agreement rests on and is expected to succeed.
    """
    _check_variant(variant, EAVESDROP_PREDICTIONS)
    base = channel or ChannelConfig(link_seed=random.Random(seed).randbytes(32))
    base = ChannelConfig(base.link_seed, base.loss_rate,
                         eavesdropper_decorrelation=(variant == "decorrelated"),
                         latency_ms=base.latency_ms)
    w = World(seed, session, base)
    eve = Recorder(w)
    w.handshake()
    w.advance(w.session.ca_round_interval)
    w.first_round()
    sn_key = w.edge.sn_key
    candidates = eavesdropper_candidates(eve.packets)
    recovered = sn_key in candidates
    notes = []
    if recovered:
        notes.append("eavesdropper CSI equals the receivers' CSI: SN_key = C_r xor C_i is public")
    return _verdict(w, "PassiveEavesdropper", variant, EAVESDROP_PREDICTIONS,
                    attack_succeeded=recovered, notes=notes,
                    metrics={"candidates": len(candidates)})


RUNNERS = {
    "Replayer": (run_replay_attack, REPLAY_PREDICTIONS),
    "Impersonator": (run_impersonation_attack, IMPERSONATION_PREDICTIONS),
    "MitmMutator": (run_mitm_attack, {m: None for m in MESSAGE_CLASSES}),
    "Cloner": (run_cloning_attack, CLONING_PREDICTIONS),
    "SybilForger": (run_sybil_attack, SYBIL_PREDICTIONS),
    "PassiveEavesdropper": (run_eavesdrop_attack, EAVESDROP_PREDICTIONS),
}


def run_attack(kind: str, variant: str, seed: int, session: Optional[SessionConfig] = None,
               channel: Optional[ChannelConfig] = None, **options) -> AttackVerdict:
    try:
        runner, _ = RUNNERS[kind]
    except KeyError:
        raise ValueError(f"unknown attacker kind {kind!r}") from None
    return runner(seed, variant, session, channel, **options)
