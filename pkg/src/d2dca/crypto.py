"""Shared cryptographic primitives for the edge and gateway state machines.

Everything here is a pure function of its inputs. Randomness (AEAD nonces) is
passed in explicitly so that simulations replay bit-for-bit.

Widths are fixed: identities-on-wire, keys, random values, CSI samples and
masks are all 32 bytes so that XOR against a SHA-256 digest is well defined.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from typing import Callable, Sequence

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

KEY_LEN = 32
NONCE_LEN = 12
AEAD_TAG_LEN = 16
ZERO_KEY = bytes(KEY_LEN)

EXPONENT_MIN = 2
DEFAULT_EXPONENT_MAX = 16

_MASK64 = (1 << 64) - 1

NonceSource = Callable[[int], bytes]


class CryptoError(Exception):
    """Base class for primitive-level failures."""


class AuthFailure(CryptoError):
    """AEAD tag did not verify: tampering or wrong key."""


class TooShort(CryptoError):
    """Envelope shorter than nonce + tag."""


class ExponentOutOfBounds(CryptoError, ValueError):
    pass


def _require32(name: str, value: bytes) -> None:
    if len(value) != KEY_LEN:
        raise ValueError(f"{name} must be {KEY_LEN} bytes, got {len(value)}")


def hash_bytes(data: bytes) -> bytes:
    """SHA-256 of ``data``."""
    return hashlib.sha256(data).digest()


def hmac_tag(key: bytes, fields: Sequence[bytes]) -> bytes:
    """HMAC-SHA-256 over length-prefixed fields.

    Each field is preceded by its 4-byte big-endian length, so ``[A, B]`` and
    ``[A + B]`` never collide.
    """
    if not fields:
        raise ValueError("hmac_tag needs at least one field")
    mac = hmac.new(key, digestmod=hashlib.sha256)
    for field in fields:
        mac.update(len(field).to_bytes(4, "big"))
        mac.update(field)
    return mac.digest()


def tags_equal(a: bytes, b: bytes) -> bool:
    return hmac.compare_digest(a, b)


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor operands differ in length")
    return bytes(x ^ y for x, y in zip(a, b))


def xor_mask(value: bytes, key: bytes, r: bytes) -> bytes:
    """Return ``value XOR H(key XOR r)``; applying it twice is the identity."""
    _require32("value", value)
    _require32("key", key)
    _require32("r", r)
    return xor_bytes(value, hash_bytes(xor_bytes(key, r)))


@dataclass(frozen=True)
class Seed:
    """Counter-mode DRBG state: 32 seed bytes plus the index of the next draw."""

    value: bytes
    draw_index: int = 0

    def __post_init__(self) -> None:
        _require32("seed", self.value)
        if self.draw_index < 0:
            raise ValueError("draw_index must be non-negative")

    def at(self, index: int) -> bytes:
        """The output at ``index`` without consuming anything."""
        return hash_bytes(self.value + index.to_bytes(8, "big"))

    def peek(self) -> bytes:
        return self.at(self.draw_index)


def prng_draw(seed: Seed) -> tuple[bytes, Seed]:
    """Draw one 32-byte value; returns it with the advanced seed."""
    return seed.peek(), Seed(seed.value, seed.draw_index + 1)


def derive_init_key(raw_edge_id: bytes, r: bytes) -> bytes:
    """Enrollment secret shared by edge and gateway: HMAC keyed by ``r`` over the edge id."""
    _require32("r", r)
    return hmac_tag(r, [raw_edge_id])


def aead_seal(key: bytes, plaintext: bytes, nonce_source: NonceSource) -> bytes:
    """ChaCha20-Poly1305 seal; output is ``nonce || ciphertext || tag``."""
    _require32("key", key)
    if key == ZERO_KEY:
        raise ValueError("refusing to seal under the unset (all-zero) key")
    nonce = nonce_source(NONCE_LEN)
    if len(nonce) != NONCE_LEN:
        raise ValueError("nonce source returned wrong length")
    return nonce + ChaCha20Poly1305(key).encrypt(nonce, plaintext, None)


def aead_open(key: bytes, envelope: bytes) -> bytes:
    _require32("key", key)
    if len(envelope) < NONCE_LEN + AEAD_TAG_LEN:
        raise TooShort(f"envelope of {len(envelope)} bytes")
    nonce, body = envelope[:NONCE_LEN], envelope[NONCE_LEN:]
    try:
        return ChaCha20Poly1305(key).decrypt(nonce, body, None)
    except InvalidTag:
        raise AuthFailure("AEAD tag mismatch") from None


def check_exponent(value: int, exponent_max: int = DEFAULT_EXPONENT_MAX) -> int:
    if not EXPONENT_MIN <= value <= exponent_max:
        raise ExponentOutOfBounds(
            f"exponent {value} outside [{EXPONENT_MIN}, {exponent_max}]"
        )
    return value


def _pow_wrap64(base: int, exp: int) -> int:
    # square-and-multiply, every intermediate truncated to 64 bits
    result = 1
    base &= _MASK64
    while exp:
        if exp & 1:
            result = (result * base) & _MASK64
        base = (base * base) & _MASK64
        exp >>= 1
    return result


def compute_f(t: int, a: int, b: int, exponent_max: int = DEFAULT_EXPONENT_MAX) -> int:
    """``(t**a + t**b) mod 2**64`` for elapsed time ``t`` in milliseconds."""
    if not 0 <= t <= _MASK64:
        raise ValueError("t must fit in an unsigned 64-bit integer")
    check_exponent(a, exponent_max)
    check_exponent(b, exponent_max)
    return (_pow_wrap64(t, a) + _pow_wrap64(t, b)) & _MASK64


def pad_exponent(value: int) -> bytes:
    """Exponent as a 32-byte big-endian block, ready for masking."""
    return value.to_bytes(KEY_LEN, "big")


def unpad_exponent(block: bytes, exponent_max: int = DEFAULT_EXPONENT_MAX) -> int:
    return check_exponent(int.from_bytes(block, "big"), exponent_max)
