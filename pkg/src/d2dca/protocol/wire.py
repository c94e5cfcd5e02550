"""Binary layouts of the eight protocol messages.

Outer layout: one type-tag byte followed by fixed-width fields. M5-M8 carry
a single AEAD envelope (nonce || ciphertext || tag) whose plaintext has its
own fixed layout, packed and parsed by the ``*_plain`` helpers below.
All integers are big-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

from ..crypto import AEAD_TAG_LEN, NONCE_LEN
from .errors import MalformedMessage


@dataclass(frozen=True)
class M1:
    """Hello: hash of the edge id."""

    edge_id_hash: bytes


@dataclass(frozen=True)
class M2:
    gw_id_hash: bytes


@dataclass(frozen=True)
class M3:
    edge_id_hash: bytes
    m_a: bytes
    tag: bytes


@dataclass(frozen=True)
class M4:
    gw_id_hash: bytes
    tag: bytes
    m_b: bytes


@dataclass(frozen=True)
class M5:
    envelope: bytes


@dataclass(frozen=True)
class M6:
    envelope: bytes


@dataclass(frozen=True)
class M7:
    envelope: bytes


@dataclass(frozen=True)
class M8:
    envelope: bytes


ProtocolMessage = Union[M1, M2, M3, M4, M5, M6, M7, M8]

# plaintext sizes inside the envelopes
M5_PLAIN_LEN = 32 + 32 + 1
M6_PLAIN_LEN = 32 + 32
M7_PLAIN_LEN = 1 + 8 + 1 + 8 + 32 + 8
M8_PLAIN_LEN = 8 + 8

_OVERHEAD = NONCE_LEN + AEAD_TAG_LEN

# tag -> (class, field names, field widths)
_LAYOUT: dict[int, tuple[type, tuple[str, ...], tuple[int, ...]]] = {
    0x01: (M1, ("edge_id_hash",), (32,)),
    0x02: (M2, ("gw_id_hash",), (32,)),
    0x03: (M3, ("edge_id_hash", "m_a", "tag"), (32, 32, 32)),
    0x04: (M4, ("gw_id_hash", "tag", "m_b"), (32, 32, 32)),
    0x05: (M5, ("envelope",), (M5_PLAIN_LEN + _OVERHEAD,)),
    0x06: (M6, ("envelope",), (M6_PLAIN_LEN + _OVERHEAD,)),
    0x07: (M7, ("envelope",), (M7_PLAIN_LEN + _OVERHEAD,)),
    0x08: (M8, ("envelope",), (M8_PLAIN_LEN + _OVERHEAD,)),
}
_TAG_OF = {cls: tag for tag, (cls, _, _) in _LAYOUT.items()}


def message_name(msg: ProtocolMessage) -> str:
    return type(msg).__name__


def wire_length(cls: type) -> int:
    return 1 + sum(_LAYOUT[_TAG_OF[cls]][2])


def encode(msg: ProtocolMessage) -> bytes:
    try:
        tag = _TAG_OF[type(msg)]
    except KeyError:
        raise MalformedMessage(f"not a protocol message: {type(msg).__name__}") from None
    _, names, widths = _LAYOUT[tag]
    out = bytearray([tag])
    for name, width in zip(names, widths):
        value = getattr(msg, name)
        if len(value) != width:
            raise MalformedMessage(f"{type(msg).__name__}.{name} must be {width} bytes")
        out += value
    return bytes(out)


def decode(data: bytes) -> ProtocolMessage:
    if not data:
        raise MalformedMessage("empty message")
    tag = data[0]
    if tag not in _LAYOUT:
        raise MalformedMessage(f"unknown tag 0x{tag:02x}")
    cls, names, widths = _LAYOUT[tag]
    if len(data) != 1 + sum(widths):
        raise MalformedMessage(
            f"{cls.__name__} expects {1 + sum(widths)} bytes, got {len(data)}"
        )
    fields = {}
    pos = 1
    for name, width in zip(names, widths):
        fields[name] = bytes(data[pos:pos + width])
        pos += width
    return cls(**fields)


# --- envelope plaintexts ---

@dataclass(frozen=True)
class M5Plain:
    c_i: bytes
    new_seed: bytes
    ack: int


@dataclass(frozen=True)
class M6Plain:
    m_c: bytes
    edge_id_hash: bytes


@dataclass(frozen=True)
class M7Plain:
    ack: int
    f: int
    a: int
    t: int
    m_d: bytes
    ctr_g: int


@dataclass(frozen=True)
class M8Plain:
    f: int
    ctr_e: int


_M5 = struct.Struct(">32s32sB")
_M6 = struct.Struct(">32s32s")
_M7 = struct.Struct(">BQBQ32sQ")
_M8 = struct.Struct(">QQ")


def _unpack(layout: struct.Struct, data: bytes, what: str) -> tuple:
    if len(data) != layout.size:
        raise MalformedMessage(f"{what} plaintext must be {layout.size} bytes")
    return layout.unpack(data)


def pack_m5_plain(p: M5Plain) -> bytes:
    return _M5.pack(p.c_i, p.new_seed, p.ack)


def unpack_m5_plain(data: bytes) -> M5Plain:
    return M5Plain(*_unpack(_M5, data, "M5"))


def pack_m6_plain(p: M6Plain) -> bytes:
    return _M6.pack(p.m_c, p.edge_id_hash)


def unpack_m6_plain(data: bytes) -> M6Plain:
    return M6Plain(*_unpack(_M6, data, "M6"))


def pack_m7_plain(p: M7Plain) -> bytes:
    return _M7.pack(p.ack, p.f, p.a, p.t, p.m_d, p.ctr_g)


def unpack_m7_plain(data: bytes) -> M7Plain:
    return M7Plain(*_unpack(_M7, data, "M7"))


def pack_m8_plain(p: M8Plain) -> bytes:
    return _M8.pack(p.f, p.ctr_e)


def unpack_m8_plain(data: bytes) -> M8Plain:
    return M8Plain(*_unpack(_M8, data, "M8"))
