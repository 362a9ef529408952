"""Prime-order group of edwards25519, plus the two protocol hash functions.

Point arithmetic goes through libsodium (constant time). The only pure-Python
curve code is the decompression and cofactor clearing used by
:func:`hash_to_point`, which never touches secret data.

Domain tags (frozen; changing any of them changes every hash output):

====================  =============================
``HS_TAG``            ``b"anonvote/v1/hash-to-scalar"``
``HP_TAG``            ``b"anonvote/v1/hash-to-point"``
``CANDIDATE_TAG``     ``b"anonvote/v1/candidate"``
====================  =============================
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

import nacl.bindings as sodium

from .errors import DecodeError

L = 2**252 + 27742317777372353535851937790883648493
COFACTOR = 8
SCALAR_BYTES = 32
POINT_BYTES = 32

HS_TAG = b"anonvote/v1/hash-to-scalar"
HP_TAG = b"anonvote/v1/hash-to-point"
CANDIDATE_TAG = b"anonvote/v1/candidate"

# field constants for decompression
_P = 2**255 - 19
_D = -121665 * pow(121666, -1, _P) % _P
_SQRT_M1 = pow(2, (_P - 1) // 4, _P)

_IDENTITY_BYTES = (1).to_bytes(POINT_BYTES, "little")


class RandomSource(Protocol):
    def randbytes(self, n: int) -> bytes: ...


def default_rng() -> RandomSource:
    return secrets.SystemRandom()


@dataclass(frozen=True, slots=True)
class Scalar:
    """Integer modulo the group order ``L``."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < L:
            object.__setattr__(self, "value", self.value % L)

    @classmethod
    def from_bytes(cls, data: bytes) -> Scalar:
        if len(data) != SCALAR_BYTES:
            raise DecodeError(f"scalar must be {SCALAR_BYTES} bytes, got {len(data)}")
        v = int.from_bytes(data, "little")
        if v >= L:
            raise DecodeError("non-canonical scalar encoding")
        return cls(v)

    @classmethod
    def from_hex(cls, text: str) -> Scalar:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None
        return cls.from_bytes(raw)

    @classmethod
    def random(cls, rng: RandomSource | None = None, *, nonzero: bool = False) -> Scalar:
        rng = rng or default_rng()
        while True:
            # 512 bits reduced mod L: bias below 2**-250
            v = int.from_bytes(rng.randbytes(64), "little") % L
            if v or not nonzero:
                return cls(v)

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(SCALAR_BYTES, "little")

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __bytes__(self) -> bytes:
        return self.to_bytes()

    def __bool__(self) -> bool:
        return self.value != 0

    def __add__(self, other: Scalar) -> Scalar:
        return Scalar((self.value + other.value) % L)

    def __sub__(self, other: Scalar) -> Scalar:
        return Scalar((self.value - other.value) % L)

    def __neg__(self) -> Scalar:
        return Scalar(-self.value % L)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.value * other.value % L)
        if isinstance(other, GroupPoint):
            return other._mul(self)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Scalar({self.hex()[:16]}...)"


@dataclass(frozen=True, slots=True)
class GroupPoint:
    """Element of the prime-order subgroup, held in canonical encoding.

    Build points with :meth:`from_bytes` (validated) or through arithmetic;
    the raw constructor trusts its argument.
    """

    encoded: bytes

    @classmethod
    def from_bytes(cls, data: bytes) -> GroupPoint:
        data = bytes(data)
        if len(data) != POINT_BYTES:
            raise DecodeError(f"point must be {POINT_BYTES} bytes, got {len(data)}")
        if data == _IDENTITY_BYTES:
            return IDENTITY
        # rejects non-canonical, off-curve, small-order and torsion-carrying points
        if not sodium.crypto_core_ed25519_is_valid_point(data):
            raise DecodeError("not a canonical prime-order subgroup point")
        return cls(data)

    @classmethod
    def from_hex(cls, text: str) -> GroupPoint:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None
        return cls.from_bytes(raw)

    def to_bytes(self) -> bytes:
        return self.encoded

    def hex(self) -> str:
        return self.encoded.hex()

    def __bytes__(self) -> bytes:
        return self.encoded

    def is_identity(self) -> bool:
        return self.encoded == _IDENTITY_BYTES

    def __add__(self, other: GroupPoint) -> GroupPoint:
        if not isinstance(other, GroupPoint):
            return NotImplemented
        if self.is_identity():
            return other
        if other.is_identity():
            return self
        return GroupPoint(sodium.crypto_core_ed25519_add(self.encoded, other.encoded))

    def __neg__(self) -> GroupPoint:
        if self.is_identity():
            return self
        return GroupPoint(sodium.crypto_core_ed25519_sub(_IDENTITY_BYTES, self.encoded))

    def __sub__(self, other: GroupPoint) -> GroupPoint:
        if not isinstance(other, GroupPoint):
            return NotImplemented
        if other.is_identity():
            return self
        if self.is_identity():
            return -other
        return GroupPoint(sodium.crypto_core_ed25519_sub(self.encoded, other.encoded))

    def _mul(self, s: Scalar) -> GroupPoint:
        if not s.value or self.is_identity():
            return IDENTITY
        if self.encoded == _BASE_BYTES:
            return GroupPoint(sodium.crypto_scalarmult_ed25519_base_noclamp(s.to_bytes()))
        return GroupPoint(sodium.crypto_scalarmult_ed25519_noclamp(s.to_bytes(), self.encoded))

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return self._mul(other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"GroupPoint({self.hex()[:16]}...)"


IDENTITY = GroupPoint(_IDENTITY_BYTES)
_BASE_BYTES = sodium.crypto_scalarmult_ed25519_base_noclamp((1).to_bytes(32, "little"))
G = GroupPoint(_BASE_BYTES)


def base_mul(s: Scalar) -> GroupPoint:
    return G._mul(s)


@dataclass(frozen=True, slots=True)
class KeyPair:
    secret: Scalar
    public: GroupPoint

    @classmethod
    def from_secret(cls, secret: Scalar) -> KeyPair:
        if not secret:
            raise ValueError("secret key must be nonzero")
        return cls(secret, base_mul(secret))


def keygen(rng: RandomSource | None = None) -> KeyPair:
    return KeyPair.from_secret(Scalar.random(rng, nonzero=True))


def hash_to_scalar(data: bytes) -> Scalar:
    digest = hashlib.sha512(HS_TAG + bytes(data)).digest()
    return Scalar(int.from_bytes(digest, "little") % L)


# --- try-and-increment hash to point -------------------------------------

def _decompress(raw: bytes):
    """Affine (x, y) for any curve point with this encoding, else None."""
    y = int.from_bytes(raw, "little")
    sign = y >> 255
    y &= (1 << 255) - 1
    if y >= _P:
        return None
    yy = y * y % _P
    u = (yy - 1) % _P
    v = (_D * yy + 1) % _P
    x2 = u * pow(v, _P - 2, _P) % _P
    x = pow(x2, (_P + 3) // 8, _P)
    if (x * x - x2) % _P:
        x = x * _SQRT_M1 % _P
        if (x * x - x2) % _P:
            return None
    if x == 0 and sign:
        return None
    if x & 1 != sign:
        x = _P - x
    return x, y


def _double(pt):
    x, y = pt
    xy = x * y % _P
    xx = x * x % _P
    yy = y * y % _P
    t = _D * xy * xy % _P
    x3 = 2 * xy * pow(1 + t, _P - 2, _P) % _P
    y3 = (yy + xx) * pow(1 - t, _P - 2, _P) % _P
    return x3, y3


def _compress(pt) -> bytes:
    x, y = pt
    return (y | ((x & 1) << 255)).to_bytes(POINT_BYTES, "little")


@lru_cache(maxsize=4096)
def _hash_to_point_cached(data: bytes) -> GroupPoint:
    counter = 0
    while True:
        digest = hashlib.sha512(HP_TAG + data + counter.to_bytes(4, "little")).digest()
        counter += 1
        pt = _decompress(digest[:POINT_BYTES])
        if pt is None:
            continue
        for _ in range(3):  # multiply by the cofactor 8
            pt = _double(pt)
        enc = _compress(pt)
        if enc == _IDENTITY_BYTES:
            continue
        return GroupPoint.from_bytes(enc)


def hash_to_point(data: bytes) -> GroupPoint:
    return _hash_to_point_cached(bytes(data))


def encode_candidate(name: str) -> GroupPoint:
    if not name:
        raise ValueError("candidate name must be nonempty")
    return hash_to_point(CANDIDATE_TAG + name.encode("utf-8"))
