"""One-time linkable ring signatures over the edwards25519 subgroup.

A signer holding ``x`` with ``P = x*G`` somewhere in a ring of public keys
proves membership without revealing the position. Every signature carries
the key image ``I = x*H_p(P)``; two signatures by one key share the image
whatever ring or message was used, which is what the tally relies on to
drop repeat votes.

Signing (0-based, signer index ``s``)::

    L_s = q_s*G                 R_s = q_s*H_p(P_s)
    L_i = q_i*G + w_i*P_i       R_i = q_i*H_p(P_i) + w_i*I      (i != s)
    c   = H_s(m, L_0..L_{n-1}, R_0..R_{n-1})
    c_i = w_i, r_i = q_i        (i != s)
    c_s = c - sum(c_i, i != s)  r_s = q_s - c_s*x              (mod l)

Verification recomputes ``L'_i = r_i*G + c_i*P_i`` and
``R'_i = r_i*H_p(P_i) + c_i*I`` and accepts iff ``sum(c_i)`` equals the
challenge over the recomputed points.

The signer's ``q_s`` must never repeat across signatures: two signatures
sharing it reveal ``x``. Pass a cryptographic rng outside of tests.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DecodeError, RingError
from .group import (
    POINT_BYTES,
    SCALAR_BYTES,
    GroupPoint,
    KeyPair,
    RandomSource,
    Scalar,
    base_mul,
    default_rng,
    hash_to_point,
    hash_to_scalar,
)

CHALLENGE_TAG = b"ring-challenge"
_COUNT = struct.Struct("<I")


@dataclass(frozen=True)
class Ring:
    members: tuple[GroupPoint, ...]

    def __init__(self, members: Iterable[GroupPoint]):
        members = tuple(members)
        if not members:
            raise RingError("ring must have at least one member")
        if len({m.encoded for m in members}) != len(members):
            raise RingError("ring members must be pairwise distinct")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def index(self, point: GroupPoint) -> int:
        return self.members.index(point)

    def to_bytes(self) -> bytes:
        return _COUNT.pack(len(self.members)) + b"".join(m.encoded for m in self.members)

    @classmethod
    def read_from(cls, data: bytes, offset: int = 0) -> tuple[Ring, int]:
        n, offset = _read_count(data, offset)
        members, offset = _read_points(data, offset, n)
        try:
            return cls(members), offset
        except RingError as exc:
            raise DecodeError(str(exc)) from None


@dataclass(frozen=True)
class RingSignature:
    key_image: GroupPoint
    c: tuple[Scalar, ...]
    r: tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        object.__setattr__(self, "r", tuple(self.r))
        if len(self.c) != len(self.r):
            raise RingError("challenge and response vectors differ in length")
        if not self.c:
            raise RingError("empty signature")
        if self.key_image.is_identity():
            raise RingError("key image is the identity")

    def __len__(self) -> int:
        return len(self.c)

    def to_bytes(self) -> bytes:
        """``I || n || c_0..c_{n-1} || r_0..r_{n-1}``: 36 + 64n bytes."""
        return b"".join(
            [self.key_image.encoded, _COUNT.pack(len(self.c))]
            + [s.to_bytes() for s in self.c]
            + [s.to_bytes() for s in self.r]
        )

    @classmethod
    def read_from(cls, data: bytes, offset: int = 0) -> tuple[RingSignature, int]:
        (image,), offset = _read_points(data, offset, 1)
        n, offset = _read_count(data, offset)
        c, offset = _read_scalars(data, offset, n)
        r, offset = _read_scalars(data, offset, n)
        try:
            return cls(image, c, r), offset
        except RingError as exc:
            raise DecodeError(str(exc)) from None

    @classmethod
    def from_bytes(cls, data: bytes) -> RingSignature:
        sig, end = cls.read_from(data)
        if end != len(data):
            raise DecodeError("trailing bytes after signature")
        return sig


def signature_size(ring_size: int) -> int:
    return POINT_BYTES + _COUNT.size + 2 * SCALAR_BYTES * ring_size


def key_image(keypair: KeyPair) -> GroupPoint:
    return keypair.secret * hash_to_point(keypair.public.encoded)


def _challenge(message: bytes, Ls: Sequence[GroupPoint], Rs: Sequence[GroupPoint]) -> Scalar:
    parts = [CHALLENGE_TAG, struct.pack("<Q", len(message)), message]
    parts += [p.encoded for p in Ls]
    parts += [p.encoded for p in Rs]
    return hash_to_scalar(b"".join(parts))


def ring_sign(
    message: bytes,
    ring: Ring,
    signer_index: int,
    keypair: KeyPair,
    rng: RandomSource | None = None,
) -> RingSignature:
    n = len(ring)
    if not 0 <= signer_index < n:
        raise IndexError(f"signer index {signer_index} outside ring of size {n}")
    if ring[signer_index] != keypair.public:
        raise RingError("keypair does not match the ring member at signer_index")
    rng = rng or default_rng()

    image = key_image(keypair)
    q = [Scalar.random(rng) for _ in range(n)]
    w = [Scalar.random(rng) if i != signer_index else Scalar(0) for i in range(n)]

    Ls, Rs = [], []
    for i, P in enumerate(ring):
        hp = hash_to_point(P.encoded)
        if i == signer_index:
            Ls.append(base_mul(q[i]))
            Rs.append(q[i] * hp)
        else:
            Ls.append(base_mul(q[i]) + w[i] * P)
            Rs.append(q[i] * hp + w[i] * image)

    c_total = _challenge(message, Ls, Rs)
    c = list(w)
    r = list(q)
    others = Scalar(sum(w[i].value for i in range(n) if i != signer_index))
    c[signer_index] = c_total - others
    r[signer_index] = q[signer_index] - c[signer_index] * keypair.secret
    return RingSignature(image, c, r)


def ring_verify(message: bytes, ring: Ring, sig: RingSignature) -> bool:
    if len(sig.c) != len(ring) or len(sig.r) != len(ring):
        raise RingError(f"signature sized for {len(sig.c)} members, ring has {len(ring)}")
    image = sig.key_image
    if image.is_identity():
        return False
    Ls, Rs = [], []
    for P, ci, ri in zip(ring, sig.c, sig.r):
        Ls.append(base_mul(ri) + ci * P)
        Rs.append(ri * hash_to_point(P.encoded) + ci * image)
    total = Scalar(sum(ci.value for ci in sig.c))
    return total == _challenge(message, Ls, Rs)


# --- wire helpers ----------------------------------------------------------

def _read_count(data: bytes, offset: int) -> tuple[int, int]:
    if offset + _COUNT.size > len(data):
        raise DecodeError("truncated length field")
    (n,) = _COUNT.unpack_from(data, offset)
    return n, offset + _COUNT.size


def _read_points(data: bytes, offset: int, n: int) -> tuple[list[GroupPoint], int]:
    end = offset + n * POINT_BYTES
    if end > len(data):
        raise DecodeError("truncated point list")
    pts = [GroupPoint.from_bytes(data[o:o + POINT_BYTES]) for o in range(offset, end, POINT_BYTES)]
    return pts, end


def _read_scalars(data: bytes, offset: int, n: int) -> tuple[list[Scalar], int]:
    end = offset + n * SCALAR_BYTES
    if end > len(data):
        raise DecodeError("truncated scalar list")
    out = [Scalar.from_bytes(data[o:o + SCALAR_BYTES]) for o in range(offset, end, SCALAR_BYTES)]
    return out, end

