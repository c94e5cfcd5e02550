"""Discrete-event scenario runner.

A run enrolls one edge with one gateway, performs mutual authentication,
then lets the gateway loop over CA rounds every ``ca_round_interval`` until
the scenario duration is used up. Session expiry sends the edge back to
mutual authentication; drops and aborts are handled as a timeout after one
round interval followed by a fresh handshake.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Optional

from .channel import ChannelConfig, Dropped
from .protocol import SessionConfig
from .protocol.errors import Abort
from .protocol.wire import M2, M3, M4, M5, M7, M8
from .transcript import Transcript
from .world import EDGE, GATEWAY, World


class ScenarioInvalid(ValueError):
    pass


ATTACKER_KINDS = (
    "Replayer",
    "Impersonator",
    "MitmMutator",
    "Cloner",
    "SybilForger",
    "PassiveEavesdropper",
)


@dataclass(frozen=True)
class AttackerModel:
    kind: str
    variant: str = ""
    clone_delay: int = 0
    full_sweep: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ATTACKER_KINDS:
            raise ScenarioInvalid(f"unknown attacker kind {self.kind!r}")
        if self.clone_delay < 0:
            raise ScenarioInvalid("clone_delay must be non-negative")


@dataclass(frozen=True)
class Scenario:
    scenario_seed: int = 0
    session: SessionConfig = field(default_factory=SessionConfig)
    channel: Optional[ChannelConfig] = None
    attacker: Optional[AttackerModel] = None
    duration: int = 35_000
    ca_rounds_expected: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0 <= self.scenario_seed < 2**64:
            raise ScenarioInvalid("scenario_seed must be a 64-bit unsigned integer")
        if self.duration < 0:
            raise ScenarioInvalid("duration must be non-negative")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioInvalid("scenario must be a JSON object")
        try:
            session = SessionConfig(**data.get("session", {}))
            channel = None
            if data.get("channel") is not None:
                ch = dict(data["channel"])
                if "link_seed" in ch:
                    ch["link_seed"] = bytes.fromhex(ch["link_seed"])
                else:
                    channel_seed = _derived_link_seed(int(data.get("scenario_seed", 0)))
                    ch["link_seed"] = channel_seed
                channel = ChannelConfig(**ch)
            attacker = AttackerModel(**data["attacker"]) if data.get("attacker") else None
            return cls(
                scenario_seed=int(data.get("scenario_seed", 0)),
                session=session,
                channel=channel,
                attacker=attacker,
                duration=int(data.get("duration", 35_000)),
                ca_rounds_expected=data.get("ca_rounds_expected"),
            )
        except ScenarioInvalid:
            raise
        except (TypeError, ValueError) as exc:
            raise ScenarioInvalid(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        s = self.session
        out: dict[str, Any] = {
            "scenario_seed": self.scenario_seed,
            "session": {
                "T": s.T,
                "exponent_max": s.exponent_max,
                "ca_round_interval": s.ca_round_interval,
                "resync_window": s.resync_window,
                "credential_rollback": s.credential_rollback,
            },
            "duration": self.duration,
        }
        if self.channel is not None:
            c = self.channel
            out["channel"] = {
                "link_seed": c.link_seed.hex(),
                "loss_rate": c.loss_rate,
                "eavesdropper_decorrelation": c.eavesdropper_decorrelation,
                "latency_ms": c.latency_ms,
            }
        if self.attacker is not None:
            a = self.attacker
            out["attacker"] = {"kind": a.kind, "variant": a.variant,
                               "clone_delay": a.clone_delay, "full_sweep": a.full_sweep}
        if self.ca_rounds_expected is not None:
            out["ca_rounds_expected"] = self.ca_rounds_expected
        return out


def _derived_link_seed(seed: int) -> bytes:
    # same first draw World makes when no channel config is given
    return random.Random(seed).randbytes(32)


def make_world(sc: Scenario) -> World:
    return World(sc.scenario_seed, sc.session, sc.channel)


def run_scenario(sc: Scenario) -> Transcript:
    """Run an honest scenario and return its transcript."""
    w = make_world(sc)
    _Runner(w, sc).run()
    return w.transcript


class _Runner:
    def __init__(self, world: World, sc: Scenario) -> None:
        self.w = world
        self.sc = sc
        self.q: list = []
        self.counter = itertools.count()
        self.epoch = 0
        self.interval = sc.session.ca_round_interval
        self.edge_hash = world.edge_id.id_hash

    def at(self, t: int, action: str, *args) -> None:
        heapq.heappush(self.q, (t, next(self.counter), action, args))

    def run(self) -> None:
        self.at(0, "begin", self.epoch)
        while self.q:
            t, _, action, args = heapq.heappop(self.q)
            if t > self.sc.duration:
                break
            self.w.set_time(t)
            getattr(self, "_" + action)(*args)

    # --- actions ---

    def _begin(self, ep: int) -> None:
        if ep != self.epoch:
            return
        self.w.log("harness", "handshake_start")
        self._transmit(EDGE, GATEWAY, self.w.edge.begin_auth())

    def _transmit(self, sender: str, receiver: str, msg) -> None:
        try:
            ev = self.w.send(sender, receiver, msg)
        except Dropped:
            self.at(self.w.now + self.interval, "recover", self.epoch, "drop")
            return
        self.at(ev.sim_time, "deliver", ev, self.epoch)

    def _deliver(self, ev, ep: int) -> None:
        if ep != self.epoch:
            self.w.log(ev.receiver, "discard", detail="stale packet from an abandoned attempt")
            return
        try:
            reply = self.w.deliver(ev)
        except Abort:
            self.at(self.w.now + self.interval, "recover", self.epoch, "abort")
            return
        if isinstance(reply, (M2, M3, M4, M7)):
            self._transmit(ev.receiver, ev.sender, reply)
        elif isinstance(reply, M5):
            self._transmit(EDGE, GATEWAY, reply)
            self.at(self.w.now + self.interval, "ca_start", self.epoch)
        elif isinstance(reply, M8):
            self._transmit(EDGE, GATEWAY, reply)
        elif ev.receiver == GATEWAY and ev.message[0] == 0x08:
            self.at(self.w.now + self.interval, "point_x", self.epoch)
        elif ev.receiver == EDGE and ev.message[0] == 0x07:
            # ACK=0: session expired, back to mutual authentication
            self.epoch += 1
            self.at(self.w.now, "begin", self.epoch)

    def _ca_start(self, ep: int) -> None:
        if ep != self.epoch:
            return
        self._transmit(EDGE, GATEWAY, self.w.edge.ca_start())

    def _point_x(self, ep: int) -> None:
        if ep != self.epoch:
            return
        try:
            m7 = self.w.point_x()
        except Abort:
            self.at(self.w.now + self.interval, "recover", self.epoch, "abort")
            return
        self._transmit(GATEWAY, EDGE, m7)

    def _recover(self, ep: int, reason: str) -> None:
        if ep != self.epoch:
            return
        self.w.log("harness", "timeout", detail=reason)
        s = self.w.gateway.session(self.edge_hash)
        if s is not None and s.phase.value not in ("aborted", "idle"):
            try:
                self.w.gateway.timeout(self.edge_hash)
            except Abort as exc:
                self.w.log(GATEWAY, "abort", error=exc.failure_point)
        if self.w.edge.phase.value != "aborted":
            try:
                self.w.edge.timeout()
            except Abort as exc:
                self.w.log(EDGE, "abort", error=exc.failure_point)
        self.epoch += 1
        self.at(self.w.now, "begin", self.epoch)


@dataclass
class RunSummary:
    handshake_attempts: int = 0
    auth_successes: int = 0
    handshake_aborts: int = 0
    handshake_incomplete: int = 0
    ca_rounds: int = 0
    ca_aborts: int = 0
    expiries: int = 0
    expiry_reauths: int = 0
    drops: int = 0

    def reconciles(self) -> bool:
        return (
            self.auth_successes + self.handshake_aborts + self.handshake_incomplete
            == self.handshake_attempts
        )

    def to_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def summarize(tr: Transcript) -> RunSummary:
    """Reduce a scenario transcript to counts."""
    out = RunSummary()
    in_handshake = False
    in_session = False
    after_expiry = False
    for e in tr:
        if e.kind == "handshake_start":
            out.handshake_attempts += 1
            in_handshake = True
        elif e.kind == "auth_success":
            out.auth_successes += 1
            if after_expiry:
                out.expiry_reauths += 1
            after_expiry = False
            in_handshake, in_session = False, True
        elif e.kind == "abort":
            if in_handshake:
                out.handshake_aborts += 1
                in_handshake = False
                after_expiry = False
            elif in_session:
                out.ca_aborts += 1
                in_session = False
        elif e.kind == "round_complete":
            out.ca_rounds += 1
        elif e.kind == "expired":
            out.expiries += 1
            after_expiry = True
            in_session = False
        elif e.kind == "drop":
            out.drops += 1
    if in_handshake:
        out.handshake_incomplete += 1
    return out
