import copy
import json
import random

import pytest

from d2dca.crypto import Seed, aead_seal, compute_f, pad_exponent, xor_bytes, xor_mask
from d2dca.protocol import (
    DeviceId,
    DuplicateEnrollment,
    EdgePhase,
    GatewayPhase,
    M1,
    M2,
    M4,
    M7,
    Registry,
    SessionConfig,
    enroll,
)
from d2dca.protocol.errors import Abort, ProtocolError
from d2dca.protocol.wire import (
    M5,
    M8,
    M5Plain,
    M7Plain,
    M8Plain,
    pack_m5_plain,
    pack_m7_plain,
    pack_m8_plain,
)
from d2dca.world import EDGE, GATEWAY, World


def failure(fn):
    with pytest.raises(Abort) as info:
        fn()
    return info.value.failure_point


def session(w):
    return w.gateway.session(w.edge_id.id_hash)


def test_handshake_agrees_on_key_and_rotates(world):
    e_init_before = world.edge.e_init
    world.handshake()
    s = session(world)
    assert world.edge.sn_key == s.sn_key != bytes(32)
    assert world.edge.e_init == world.edge.sn_key != e_init_before
    entry = world.gateway.registry[world.edge_id.id_hash]
    assert entry.current.e_init == s.sn_key
    assert entry.current.seed == world.edge.seed
    assert s.phase is GatewayPhase.IN_SESSION
    assert world.edge.phase is EdgePhase.AWAIT_M7


def test_rounds_advance_counters(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    for _ in range(3):
        w.advance(1000)
        w.next_round()
    assert w.edge.ctr_e == session(w).ctr_g == 5
    assert session(w).rounds == 4


def test_expiry_sends_ack_zero_and_reauth(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    w.advance(10_000)
    out = w.next_round()
    assert out["M8"] is None
    assert session(w).expired
    assert w.edge.phase is EdgePhase.AUTHENTICATED
    old = w.edge.e_init
    w.handshake()
    assert w.edge.e_init != old
    assert session(w).phase is GatewayPhase.IN_SESSION


def test_round_at_exactly_T_is_still_live(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    w.advance(9000)
    assert w.next_round()["M8"] is not None


def test_unknown_edge(world):
    stranger = M1(bytes(32))
    assert failure(lambda: world.exchange(EDGE, GATEWAY, stranger)) == "gw_on_m1:UnknownEdge"


def test_edge_rejects_wrong_gateway(world):
    world.edge.begin_auth()
    ev = world.send(GATEWAY, EDGE, M2(b"\x01" * 32))
    assert failure(lambda: world.deliver(ev)) == "edge_on_m2:WrongGateway"
    assert world.edge.phase is EdgePhase.ABORTED


def test_edge_out_of_phase(world):
    world.edge.begin_auth()
    m4 = M4(world.gw_id.id_hash, bytes(32), bytes(32))
    assert failure(lambda: world.exchange(GATEWAY, EDGE, m4)) == "edge_on_m4:OutOfPhase"


def test_begin_auth_refused_mid_handshake(world):
    world.edge.begin_auth()
    with pytest.raises(Abort):
        world.edge.begin_auth()


def test_lost_m3_resyncs_within_window(world):
    w = world
    for _ in range(3):
        m2 = w.exchange(EDGE, GATEWAY, w.edge.begin_auth())
        w.exchange(GATEWAY, EDGE, m2)  # edge draws r, its M3 never arrives
        w.edge.abort(Abort("test"))
        w.gateway.abort_session(w.edge_id.id_hash, Abort("test"))
    w.handshake()
    assert w.edge.sn_key == session(w).sn_key


def test_draws_beyond_window_fail(world):
    w = world
    w.edge.seed = Seed(w.edge.seed.value, w.edge.seed.draw_index + w.session.resync_window)
    assert failure(w.handshake) == "gw_on_m3:TagMismatch"


ROLLBACK = SessionConfig(credential_rollback=True)


def test_lost_m5_falls_back_with_rollback():
    w = World(11, ROLLBACK)
    m2 = w.exchange(EDGE, GATEWAY, w.edge.begin_auth())
    m3 = w.exchange(GATEWAY, EDGE, m2)
    m4 = w.exchange(EDGE, GATEWAY, m3)
    w.exchange(GATEWAY, EDGE, m4)  # edge rotates; M5 is lost
    w.edge.abort(Abort("lost"))
    w.gateway.abort_session(w.edge_id.id_hash, Abort("lost"))
    w.handshake()
    assert w.edge.sn_key == session(w).sn_key


def test_lost_m6_after_rotation_recovers(authed):
    w = authed
    # gateway rotated on M5; the edge never hears back and restarts
    w.edge.abort(Abort("silence"))
    w.gateway.abort_session(w.edge_id.id_hash, Abort("silence"))
    w.handshake()
    assert w.edge.sn_key == session(w).sn_key
    w.advance(1000)
    w.first_round()
    assert w.gateway.registry[w.edge_id.id_hash].previous is None


def test_completed_round_drops_previous_credentials():
    w = World(11, ROLLBACK)
    w.handshake()
    assert w.gateway.registry[w.edge_id.id_hash].previous is not None
    w.advance(1000)
    w.first_round()
    assert w.gateway.registry[w.edge_id.id_hash].previous is None
    assert w.edge.fallback is None


def _inside_m7(w, **changes):
    s = session(w)
    b = changes.pop("b", 3)
    fields = dict(ack=1, f=0, a=w.edge.a, t=5, ctr_g=w.edge.ctr_e + 1,
                  m_d=xor_mask(pad_exponent(b) if b <= 255 else b.to_bytes(32, "big"),
                               s.sn_key, s.r))
    fields.update(changes)
    if "f" not in changes and b <= 16:
        fields["f"] = compute_f(fields["t"], w.edge.a, b)
    env = aead_seal(s.sn_key, pack_m7_plain(M7Plain(**fields)), lambda n: b"\x00" * n)
    return M7(env)


@pytest.mark.parametrize(
    "changes,point",
    [
        ({"a": 1}, "edge_on_m7:ExponentEchoMismatch"),
        ({"ctr_g": 9}, "edge_on_m7:CounterMismatch"),
        ({"f": 12345}, "edge_on_m7:FunctionMismatch"),
        ({"b": 99}, "edge_on_m7:BadExponent"),
        ({"ack": 7}, "edge_on_m7:MalformedMessage"),
    ],
)
def test_edge_m7_checks(authed, changes, point):
    w = authed
    w.edge.ca_start()
    assert failure(lambda: w.exchange(GATEWAY, EDGE, _inside_m7(w, **changes))) == point


def test_edge_accepts_well_formed_inside_m7(authed):
    w = authed
    w.edge.ca_start()
    assert w.exchange(GATEWAY, EDGE, _inside_m7(w)) is not None


def test_gateway_m8_before_round_is_out_of_phase(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    w.advance(1000)
    m7 = w.point_x()
    m8 = w.exchange(GATEWAY, EDGE, m7)
    w.exchange(EDGE, GATEWAY, m8)
    assert failure(lambda: w.exchange(EDGE, GATEWAY, m8)) == "gw_on_m8:OutOfPhase"


def test_new_m1_supersedes_session(authed):
    w = authed
    w.exchange(EDGE, GATEWAY, M1(w.edge_id.id_hash))
    assert session(w).phase is GatewayPhase.AWAIT_M3


def test_enroll_two_edges_one_gateway():
    cfg = SessionConfig()
    gw = DeviceId.from_raw(b"gw")
    e1, g = enroll(DeviceId.from_raw(b"a"), gw, Seed(b"\x01" * 32), cfg,
                   random.Random(1), random.Random(2))
    e2, g2 = enroll(DeviceId.from_raw(b"b"), gw, Seed(b"\x02" * 32), cfg,
                    random.Random(3), gateway=g)
    assert g2 is g and len(g.registry) == 2
    assert e1.e_init != e2.e_init
    with pytest.raises(DuplicateEnrollment):
        enroll(DeviceId.from_raw(b"a"), gw, Seed(b"\x03" * 32), cfg, random.Random(4), gateway=g)


def test_enroll_needs_fresh_seed():
    with pytest.raises(ValueError):
        enroll(DeviceId.from_raw(b"a"), DeviceId.from_raw(b"g"), Seed(bytes(32), 1),
               SessionConfig(), random.Random(0), random.Random(0))


def test_registry_persistence(tmp_path, world):
    path = tmp_path / "reg.json"
    world.gateway.registry.save(path)
    data = json.loads(path.read_text())
    rec = data[world.edge_id.id_hash.hex()]
    assert rec["draw_index"] == 1 and len(bytes.fromhex(rec["seed"])) == 32
    again = Registry.load(path)
    assert again.to_json() == world.gateway.registry.to_json()


def test_registry_missing_file_is_empty(tmp_path):
    assert len(Registry.load(tmp_path / "nope.json")) == 0


def test_registry_bad_record():
    with pytest.raises(ProtocolError):
        Registry.from_json({"00": {"e_init": "zz"}})


@pytest.mark.parametrize("kw", [{"T": 0}, {"ca_round_interval": 0},
                                {"T": 1000, "ca_round_interval": 1000},
                                {"exponent_max": 1}, {"resync_window": 0}])
def test_session_config_validation(kw):
    with pytest.raises(ValueError):
        SessionConfig(**kw)


def test_device_id_hash_checked():
    with pytest.raises(ValueError):
        DeviceId(b"x", bytes(32))


def test_gateway_routes_envelopes_by_sender(authed):
    w = authed
    m6 = w.edge.ca_start()
    assert failure(lambda: w.exchange("stranger", GATEWAY, m6)) == "gw_point_x:UnknownEdge"


def _reseal(w, cls, plain_bytes):
    s = session(w)
    return cls(aead_seal(s.sn_key, plain_bytes, lambda n: b"\x01" * n))


def test_gateway_m5_checks(world):
    w = world
    m2 = w.exchange(EDGE, GATEWAY, w.edge.begin_auth())
    m4 = w.exchange(EDGE, GATEWAY, w.exchange(GATEWAY, EDGE, m2))
    w.exchange(GATEWAY, EDGE, m4)
    s = session(w)
    key = xor_bytes(s.e_key, s.c_i)
    bad_csi = M5(aead_seal(key, pack_m5_plain(M5Plain(b"\x07" * 32, bytes(32), 1)),
                           lambda n: b"\x00" * n))
    snap = copy.deepcopy(w)
    assert failure(lambda: w.exchange(EDGE, GATEWAY, bad_csi)) == "gw_on_m5:CsiMismatch"
    nack = M5(aead_seal(key, pack_m5_plain(M5Plain(s.c_i, bytes(32), 0)),
                        lambda n: b"\x00" * n))
    w2 = copy.deepcopy(snap)
    assert failure(lambda: w2.exchange(EDGE, GATEWAY, nack)) == "gw_on_m5:AckZero"
    wrong = M5(aead_seal(b"\x05" * 32, pack_m5_plain(M5Plain(s.c_i, bytes(32), 1)),
                         lambda n: b"\x00" * n))
    assert failure(lambda: snap.exchange(EDGE, GATEWAY, wrong)) == "gw_on_m5:AeadFailure"


@pytest.mark.parametrize("delta_f,delta_ctr,point", [
    (0, -1, "gw_on_m8:CounterMismatch"),
    (1, 0, "gw_on_m8:FunctionMismatch"),
])
def test_gateway_m8_checks(authed, delta_f, delta_ctr, point):
    w = authed
    w.advance(1000)
    m7 = w.exchange(EDGE, GATEWAY, w.edge.ca_start())
    w.exchange(GATEWAY, EDGE, m7)
    s = session(w)
    forged = _reseal(w, M8, pack_m8_plain(M8Plain((s.f + delta_f) % 2**64, s.ctr_g + delta_ctr)))
    assert failure(lambda: w.exchange(EDGE, GATEWAY, forged)) == point


def test_counter_discipline(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    for _ in range(6):
        s = session(w)
        assert w.edge.ctr_e == s.ctr_g == 1 + s.rounds
        w.advance(1000)
        w.next_round()


def test_no_round_after_expiry_until_reauth(authed):
    w = authed
    w.advance(1000)
    w.first_round()
    w.advance(10_000)
    w.next_round()
    rounds = session(w).rounds
    with pytest.raises(Abort):
        w.point_x()
    assert session(w).rounds == rounds


def _stale_clone_after_reauth(cfg):
    w = World(3, cfg)
    w.handshake()
    w.advance(1000)
    w.first_round()
    clone = copy.deepcopy(w.edge)
    while True:
        w.advance(1000)
        if w.next_round()["M8"] is None:
            break
    w.handshake()
    # the copy knows the pre-rotation seed, so it can compute the next draw too
    clone.abort(Abort("copy"))
    clone.seed = Seed(clone.seed.value, clone.seed.draw_index + 1)
    return w, clone


def test_rollback_window_admits_pre_rotation_copy():
    w, clone = _stale_clone_after_reauth(ROLLBACK)
    w.handshake(clone)
    assert clone.sn_key == session(w).sn_key


def test_rollback_window_closes_after_first_round():
    w, clone = _stale_clone_after_reauth(ROLLBACK)
    w.advance(1000)
    w.first_round()
    assert failure(lambda: w.handshake(clone)) == "gw_on_m3:TagMismatch"


def test_default_rejects_copy_and_lost_m5_strands_pair():
    cfg = SessionConfig()
    w, clone = _stale_clone_after_reauth(cfg)
    assert failure(lambda: w.handshake(clone)) == "gw_on_m3:TagMismatch"
    w = World(4, cfg)
    m2 = w.exchange(EDGE, GATEWAY, w.edge.begin_auth())
    m4 = w.exchange(EDGE, GATEWAY, w.exchange(GATEWAY, EDGE, m2))
    w.exchange(GATEWAY, EDGE, m4)  # M5 lost
    w.edge.abort(Abort("lost"))
    w.gateway.abort_session(w.edge_id.id_hash, Abort("lost"))
    assert failure(w.handshake) == "gw_on_m3:TagMismatch"
