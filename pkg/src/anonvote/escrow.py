"""Multiparty escrow of the election key ``(a, A)``.

Each manager ``k`` picks ``r_k`` and publishes ``r_k*G`` with a Schnorr
proof of knowledge. The managers then build ``A`` as a chain of partial
products ``r_1*G, r_2*(r_1*G), ...`` in commitment order, one published step
each. After voting closes every manager reveals ``r_k``; ``a`` is the product
of all of them mod ``l``. One honest manager who withholds until the reveal
phase is enough to keep ``a`` closed during voting.

State transitions are pure: every operation returns a new
:class:`EscrowState`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicateReveal,
    EscrowError,
    MissingReveal,
    PhaseError,
    ProofError,
    RevealMismatch,
    UnknownManager,
)
from .group import G, GroupPoint, RandomSource, Scalar, base_mul, hash_to_scalar

PROOF_TAG = b"escrow-schnorr"
NONCE_TAG = b"escrow-schnorr-nonce"


def escrow_context(election_id: str, manager_id: str) -> bytes:
    e, m = election_id.encode(), manager_id.encode()
    return struct.pack("<H", len(e)) + e + struct.pack("<H", len(m)) + m


@dataclass(frozen=True)
class SchnorrProof:
    commitment: GroupPoint
    challenge: Scalar
    response: Scalar

    def to_dict(self) -> dict:
        return {
            "commitment": self.commitment.hex(),
            "challenge": self.challenge.hex(),
            "response": self.response.hex(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SchnorrProof:
        return cls(
            GroupPoint.from_hex(d["commitment"]),
            Scalar.from_hex(d["challenge"]),
            Scalar.from_hex(d["response"]),
        )


@dataclass(frozen=True)
class ManagerCommitment:
    manager_id: str
    share_point: GroupPoint
    proof: SchnorrProof

    def to_dict(self) -> dict:
        return {"manager": self.manager_id, "share_point": self.share_point.hex(), "proof": self.proof.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> ManagerCommitment:
        return cls(str(d["manager"]), GroupPoint.from_hex(d["share_point"]), SchnorrProof.from_dict(d["proof"]))


def _proof_challenge(context: bytes, share_point: GroupPoint, commitment: GroupPoint) -> Scalar:
    return hash_to_scalar(
        PROOF_TAG + struct.pack("<I", len(context)) + context + share_point.encoded + commitment.encoded
    )


def commit_share(
    manager_secret: Scalar,
    context: bytes,
    manager_id: str = "",
    rng: RandomSource | None = None,
) -> ManagerCommitment:
    """Publishable commitment to ``manager_secret`` with a proof bound to ``context``.

    Without an rng the proof nonce is derived from the secret and context, so
    repeating the call reproduces the same proof instead of leaking the key.
    """
    if not manager_secret:
        raise ValueError("manager secret must be nonzero")
    share = base_mul(manager_secret)
    if rng is None:
        nonce = hash_to_scalar(NONCE_TAG + manager_secret.to_bytes() + context)
    else:
        nonce = Scalar.random(rng, nonzero=True)
    t = base_mul(nonce)
    e = _proof_challenge(context, share, t)
    return ManagerCommitment(manager_id, share, SchnorrProof(t, e, nonce + e * manager_secret))


def verify_commitment(commitment: ManagerCommitment, context: bytes) -> bool:
    share, proof = commitment.share_point, commitment.proof
    if share.is_identity():
        return False
    if proof.challenge != _proof_challenge(context, share, proof.commitment):
        return False
    return base_mul(proof.response) == proof.commitment + proof.challenge * share


def extend_product(previous: GroupPoint, manager_secret: Scalar) -> GroupPoint:
    return manager_secret * previous


@dataclass(frozen=True)
class DepositSettlement:
    refunded: dict[str, int]
    forfeited: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.refunded.values()) + sum(self.forfeited.values())


@dataclass(frozen=True)
class EscrowState:
    commitments: tuple[ManagerCommitment, ...] = ()
    running_products: tuple[GroupPoint, ...] = ()
    reveals: dict[str, Scalar] = field(default_factory=dict)
    deposits: dict[str, int] = field(default_factory=dict)
    commit_closed: bool = False

    @property
    def manager_ids(self) -> list[str]:
        return [c.manager_id for c in self.commitments]

    def commitment_for(self, manager_id: str) -> ManagerCommitment:
        for c in self.commitments:
            if c.manager_id == manager_id:
                return c
        raise UnknownManager(manager_id)

    @property
    def election_pubkey(self) -> GroupPoint:
        if not self.running_products or len(self.running_products) != len(self.commitments):
            raise EscrowError("product chain incomplete")
        return self.running_products[-1]

    @property
    def complete(self) -> bool:
        return bool(self.commitments) and len(self.running_products) == len(self.commitments)

    def missing_reveals(self) -> list[str]:
        return [m for m in self.manager_ids if m not in self.reveals]

    def refundable(self) -> set[str]:
        return set(self.reveals)

    def to_dict(self) -> dict:
        return {
            "commitments": [c.to_dict() for c in self.commitments],
            "running_products": [p.hex() for p in self.running_products],
            "reveals": {m: s.hex() for m, s in sorted(self.reveals.items())},
            "deposits": dict(sorted(self.deposits.items())),
            "commit_closed": self.commit_closed,
        }


def add_commitment(state: EscrowState, commitment: ManagerCommitment, context: bytes, deposit: int = 1) -> EscrowState:
    if state.commit_closed:
        raise PhaseError("commit phase is closed")
    if commitment.manager_id in state.manager_ids:
        raise EscrowError(f"manager {commitment.manager_id!r} already committed")
    if not verify_commitment(commitment, context):
        raise ProofError(f"proof of knowledge for {commitment.manager_id!r} does not verify")
    return replace(
        state,
        commitments=state.commitments + (commitment,),
        deposits={**state.deposits, commitment.manager_id: deposit},
    )


def add_product(state: EscrowState, manager_id: str, point: GroupPoint) -> EscrowState:
    """Record the next step of the partial-product chain.

    Steps follow commitment order; the step for manager ``k`` scales the
    step of manager ``k-1`` (``G`` for the first).
    """
    if state.commit_closed:
        raise PhaseError("commit phase is closed")
    k = len(state.running_products)
    if k >= len(state.commitments):
        raise EscrowError("product step published before its commitment")
    expected = state.commitments[k].manager_id
    if manager_id != expected:
        raise EscrowError(f"next product step belongs to {expected!r}, not {manager_id!r}")
    if point.is_identity():
        raise EscrowError("product step is the identity")
    if k == 0 and point != state.commitments[0].share_point:
        raise EscrowError("first product step must equal the first share point")
    return replace(state, running_products=state.running_products + (point,))


def close_commit_phase(state: EscrowState) -> EscrowState:
    if not state.complete:
        raise EscrowError("cannot close commit phase before every manager has a product step")
    return replace(state, commit_closed=True)


def reveal_share(state: EscrowState, manager_id: str, secret: Scalar) -> EscrowState:
    if not state.commit_closed:
        raise PhaseError("reveal before the commit phase closed")
    commitment = state.commitment_for(manager_id)
    if manager_id in state.reveals:
        raise DuplicateReveal(manager_id)
    if base_mul(secret) != commitment.share_point:
        raise RevealMismatch(f"secret does not open the commitment of {manager_id!r}")
    return replace(state, reveals={**state.reveals, manager_id: secret})


def check_product_chain(state: EscrowState) -> None:
    """Recheck the published chain over the longest revealed prefix."""
    acc = G
    for c, published in zip(state.commitments, state.running_products):
        secret = state.reveals.get(c.manager_id)
        if secret is None:
            return
        acc = extend_product(acc, secret)
        if acc != published:
            raise EscrowError(f"product step of {c.manager_id!r} does not match revealed shares")


def combine_secret(state: EscrowState) -> Scalar:
    missing = state.missing_reveals()
    if missing or not state.commitments:
        raise MissingReveal(missing)
    check_product_chain(state)
    a = Scalar(1)
    for m in state.manager_ids:
        a = a * state.reveals[m]
    if base_mul(a) != state.election_pubkey:
        raise EscrowError("combined secret does not match the election public key")
    return a


def settle_deposits(state: EscrowState) -> DepositSettlement:
    """Refund managers who revealed, forfeit everyone else."""
    refunded = {m: d for m, d in state.deposits.items() if m in state.reveals}
    forfeited = {m: d for m, d in state.deposits.items() if m not in state.reveals}
    return DepositSettlement(refunded, forfeited)
