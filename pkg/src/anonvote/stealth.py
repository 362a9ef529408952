"""Stealth-address ballots.

All candidates share one escrow key ``A = a*G``; candidate ``j`` is the
hashed point ``B_j``. A ballot for ``j`` is ``(SA, R)`` with ``R = r*G`` and
``SA = H_s(r*A)*G + B_j``. Whoever knows ``a`` computes ``a*R = r*A`` and
recovers ``B_j = SA - H_s(a*R)*G``; nobody else can tell two ballots for
the same candidate apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DecodeError
from .group import POINT_BYTES, GroupPoint, KeyPair, RandomSource, Scalar, base_mul, default_rng, hash_to_scalar
from .ring import Ring, RingSignature, ring_sign, ring_verify

STEALTH_TAG = b"stealth-shared-secret"
BALLOT_BYTES = 2 * POINT_BYTES


@dataclass(frozen=True)
class Ballot:
    stealth_address: GroupPoint
    nonce_point: GroupPoint

    def __post_init__(self):
        if self.nonce_point.is_identity():
            raise ValueError("ballot nonce point is the identity")

    def to_bytes(self) -> bytes:
        return self.stealth_address.encoded + self.nonce_point.encoded

    @classmethod
    def from_bytes(cls, data: bytes) -> Ballot:
        if len(data) != BALLOT_BYTES:
            raise DecodeError(f"ballot must be {BALLOT_BYTES} bytes")
        sa = GroupPoint.from_bytes(data[:POINT_BYTES])
        nonce = GroupPoint.from_bytes(data[POINT_BYTES:])
        if nonce.is_identity():
            raise DecodeError("ballot nonce point is the identity")
        return cls(sa, nonce)


@dataclass(frozen=True)
class SignedBallot:
    ballot: Ballot
    ring: Ring
    signature: RingSignature

    def message(self) -> bytes:
        return self.ballot.to_bytes()

    def verify(self) -> bool:
        return ring_verify(self.message(), self.ring, self.signature)

    def to_bytes(self) -> bytes:
        """``SA || R || ring count || ring members || signature``."""
        return self.ballot.to_bytes() + self.ring.to_bytes() + self.signature.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> SignedBallot:
        ballot = Ballot.from_bytes(data[:BALLOT_BYTES])
        ring, offset = Ring.read_from(data, BALLOT_BYTES)
        sig, offset = RingSignature.read_from(data, offset)
        if offset != len(data):
            raise DecodeError("trailing bytes after signed ballot")
        if len(sig) != len(ring):
            raise DecodeError("signature size does not match ring size")
        return cls(ballot, ring, sig)


def _shared_scalar(shared: GroupPoint) -> Scalar:
    return hash_to_scalar(STEALTH_TAG + shared.encoded)


def make_ballot(
    election_pubkey: GroupPoint,
    candidate_point: GroupPoint,
    rng: RandomSource | None = None,
) -> Ballot:
    r = Scalar.random(rng or default_rng(), nonzero=True)
    sa = base_mul(_shared_scalar(r * election_pubkey)) + candidate_point
    return Ballot(sa, base_mul(r))


def match_ballot(ballot: Ballot, election_secret: Scalar, candidates: Sequence[GroupPoint]) -> int | None:
    """Index of the candidate this ballot was cast for, or None."""
    if not candidates:
        return None
    planted = ballot.stealth_address - base_mul(_shared_scalar(election_secret * ballot.nonce_point))
    for j, b in enumerate(candidates):
        if b == planted:
            return j
    return None


def cast(
    ballot: Ballot,
    ring: Ring,
    signer_index: int,
    keypair: KeyPair,
    rng: RandomSource | None = None,
) -> SignedBallot:
    sig = ring_sign(ballot.to_bytes(), ring, signer_index, keypair, rng)
    return SignedBallot(ballot, ring, sig)
