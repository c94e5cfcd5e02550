"""Golden wire-format vectors built from fixed keys, nonces and field values."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from .crypto import aead_seal, compute_f, hash_bytes, hmac_tag, pad_exponent, xor_mask
from .protocol.wire import (
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
    encode,
    pack_m5_plain,
    pack_m6_plain,
    pack_m7_plain,
    pack_m8_plain,
)

VECTOR_FILE = "wire_vectors.json"

EDGE_ID_HASH = hash_bytes(b"edge-0001")
GW_ID_HASH = hash_bytes(b"gateway-01")
E_INIT = bytes(range(0x20, 0x40))
R = bytes(range(0x40, 0x60))
C_R = bytes(range(0x60, 0x80))
C_I = bytes(range(0x80, 0xA0))
SN_KEY = bytes(a ^ b for a, b in zip(C_R, C_I))
NEW_SEED = bytes(range(0xA0, 0xC0))


def _fixed_nonce(i: int):
    return lambda n: bytes([i]) * n


def _hexify(d: dict) -> dict:
    return {k: v.hex() if isinstance(v, bytes) else v for k, v in d.items()}


def build_vectors() -> list[dict]:
    m_a = xor_mask(C_R, E_INIT, R)
    m_b = xor_mask(C_I, C_R, R)
    handshake = [
        M1(EDGE_ID_HASH),
        M2(GW_ID_HASH),
        M3(EDGE_ID_HASH, m_a, hmac_tag(E_INIT, [EDGE_ID_HASH, m_a, R])),
        M4(GW_ID_HASH, hmac_tag(C_R, [m_b, GW_ID_HASH, R]), m_b),
    ]
    a, b, t = 3, 5, 0x0123456789ABCDEF
    f = compute_f(t, a, b)
    plains = [
        (M5, M5Plain(C_I, NEW_SEED, 1), pack_m5_plain),
        (M6, M6Plain(xor_mask(pad_exponent(a), SN_KEY, R), EDGE_ID_HASH), pack_m6_plain),
        (M7, M7Plain(1, f, a, t, xor_mask(pad_exponent(b), SN_KEY, R), 2), pack_m7_plain),
        (M8, M8Plain(f, 2), pack_m8_plain),
    ]
    out = []
    for msg in handshake:
        out.append({"name": type(msg).__name__, "wire": encode(msg).hex(),
                    "fields": _hexify(asdict(msg))})
    for i, (cls, plain, pack) in enumerate(plains, start=5):
        pt = pack(plain)
        msg = cls(aead_seal(SN_KEY, pt, _fixed_nonce(i)))
        out.append({
            "name": cls.__name__,
            "wire": encode(msg).hex(),
            "fields": _hexify(asdict(msg)),
            "envelope": {
                "key": SN_KEY.hex(),
                "nonce": _fixed_nonce(i)(12).hex(),
                "plaintext": pt.hex(),
                "plain_fields": _hexify(asdict(plain)),
            },
        })
    return out


def vectors_json() -> str:
    return json.dumps({"version": 1, "vectors": build_vectors()}, indent=2, sort_keys=True) + "\n"


def emit(directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    path = d / VECTOR_FILE
    path.write_text(vectors_json())
    return path
