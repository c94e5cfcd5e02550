import pytest
from hypothesis import given
from hypothesis import strategies as st

from d2dca.protocol.errors import MalformedMessage
from d2dca.protocol.wire import (
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
    M7Plain,
    M8Plain,
    decode,
    encode,
    pack_m5_plain,
    pack_m6_plain,
    pack_m7_plain,
    pack_m8_plain,
    unpack_m5_plain,
    unpack_m6_plain,
    unpack_m7_plain,
    unpack_m8_plain,
    wire_length,
)

# tag byte + fields; envelopes are nonce(12) + plaintext + tag(16)
SIZES = {M1: 33, M2: 33, M3: 97, M4: 97, M5: 94, M6: 93, M7: 87, M8: 45}

b32 = st.binary(min_size=32, max_size=32)


def sample(cls):
    n = SIZES[cls] - 1
    if cls in (M3, M4):
        return cls(b"\x01" * 32, b"\x02" * 32, b"\x03" * 32)
    if cls in (M1, M2):
        return cls(b"\x04" * 32)
    return cls(bytes(range(n)))


@pytest.mark.parametrize("cls", list(SIZES))
def test_lengths(cls):
    assert wire_length(cls) == SIZES[cls]
    wire = encode(sample(cls))
    assert len(wire) == SIZES[cls]
    assert wire[0] == list(SIZES).index(cls) + 1


@pytest.mark.parametrize("cls", list(SIZES))
def test_roundtrip(cls):
    msg = sample(cls)
    assert decode(encode(msg)) == msg


@pytest.mark.parametrize("cls", list(SIZES))
def test_truncated_and_extended_rejected(cls):
    wire = encode(sample(cls))
    with pytest.raises(MalformedMessage):
        decode(wire[:-1])
    with pytest.raises(MalformedMessage):
        decode(wire + b"\x00")


def test_unknown_tag_and_empty():
    with pytest.raises(MalformedMessage):
        decode(b"")
    with pytest.raises(MalformedMessage):
        decode(b"\x09" + bytes(32))
    with pytest.raises(MalformedMessage):
        decode(b"\xff" + bytes(32))


def test_encode_checks_field_width():
    with pytest.raises(MalformedMessage):
        encode(M1(b"short"))
    with pytest.raises(MalformedMessage):
        encode("not a message")


def test_m4_field_order_on_wire():
    wire = encode(M4(b"\x01" * 32, b"\x02" * 32, b"\x03" * 32))
    assert wire[1:33] == b"\x01" * 32 and wire[33:65] == b"\x02" * 32


@given(b32, b32, st.integers(0, 255))
def test_m5_plain_roundtrip(c, s, ack):
    p = M5Plain(c, s, ack)
    assert unpack_m5_plain(pack_m5_plain(p)) == p


@given(b32, b32)
def test_m6_plain_roundtrip(m, h):
    assert unpack_m6_plain(pack_m6_plain(M6Plain(m, h))) == M6Plain(m, h)


@given(st.integers(0, 1), st.integers(0, 2**64 - 1), st.integers(0, 255),
       st.integers(0, 2**64 - 1), b32, st.integers(0, 2**64 - 1))
def test_m7_plain_roundtrip(ack, f, a, t, m_d, ctr):
    p = M7Plain(ack, f, a, t, m_d, ctr)
    packed = pack_m7_plain(p)
    assert len(packed) == 58
    assert unpack_m7_plain(packed) == p


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_m8_plain_roundtrip(f, ctr):
    assert unpack_m8_plain(pack_m8_plain(M8Plain(f, ctr))) == M8Plain(f, ctr)


def test_plain_wrong_length():
    with pytest.raises(MalformedMessage):
        unpack_m8_plain(b"\x00" * 15)
