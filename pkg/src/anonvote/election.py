"""Protocol steps for each participant, expressed as ledger writes."""

from __future__ import annotations

from typing import Mapping, Sequence

from . import escrow as esc
from .errors import ConfigError, RingError, RosterError
from .group import G, GroupPoint, KeyPair, RandomSource, Scalar, default_rng, encode_candidate
from .ledger import (
    AUTHORITY,
    EntryType,
    ElectionConfig,
    Ledger,
    LedgerEntry,
    PayloadStore,
    canonical_json,
    submit_ballot,
)
from .ring import Ring
from .stealth import SignedBallot, cast, make_ballot

SUBMITTER_BYTES = 16


def fresh_submitter(rng: RandomSource | None = None) -> str:
    """A throwaway account id, unrelated to any roster key."""
    return (rng or default_rng()).randbytes(SUBMITTER_BYTES).hex()


def setup_election(
    config: ElectionConfig,
    manager_secrets: Mapping[str, Scalar] | None = None,
    *,
    authority: str = AUTHORITY,
) -> Ledger:
    """Open a ledger, publish config and roster, and run the escrow commit round.

    Commitment stops at the first manager missing from ``manager_secrets``;
    the rest commit later with :func:`commit_manager`, in any order.
    """
    config.validate()
    ledger = Ledger()
    ledger.append(EntryType.ELECTION_CONFIG, config.to_payload(), authority)
    for key in config.roster:
        ledger.append(EntryType.ROSTER_ADD, canonical_json({"key": key.hex()}), authority)
    for manager_id in config.managers:
        if manager_secrets is None or manager_id not in manager_secrets:
            break
        commit_manager(ledger, manager_id, manager_secrets[manager_id])
    return ledger


def commit_manager(ledger: Ledger, manager_id: str, secret: Scalar, submitter: str | None = None) -> tuple[LedgerEntry, LedgerEntry]:
    """Publish the manager's commitment and its step of the product chain."""
    cfg = ledger.state.full_config
    context = esc.escrow_context(cfg.election_id, manager_id)
    commitment = esc.commit_share(secret, context, manager_id)
    submitter = submitter or manager_id
    products = ledger.state.escrow.running_products
    previous = products[-1] if products else G
    c_entry = ledger.append(EntryType.ESCROW_COMMIT, canonical_json(commitment.to_dict()), submitter)
    step = esc.extend_product(previous, secret)
    p_entry = ledger.append(
        EntryType.ESCROW_PRODUCT, canonical_json({"manager": manager_id, "point": step.hex()}), submitter
    )
    return c_entry, p_entry


def reveal(ledger: Ledger, manager_id: str, secret: Scalar, submitter: str | None = None) -> LedgerEntry:
    return ledger.append(
        EntryType.ESCROW_REVEAL,
        canonical_json({"manager": manager_id, "secret": secret.hex()}),
        submitter or manager_id,
    )


def sample_ring(
    roster: Sequence[GroupPoint],
    voter: GroupPoint,
    ring_size: int,
    rng: RandomSource | None = None,
) -> tuple[Ring, int]:
    """Pick ``ring_size - 1`` decoys from the roster; members keep roster order."""
    rng = rng or default_rng()
    try:
        own = list(roster).index(voter)
    except ValueError:
        raise RosterError("voter key is not on the roster") from None
    if not 1 <= ring_size <= len(roster):
        raise RingError(f"ring size {ring_size} outside 1..{len(roster)}")
    others = [i for i in range(len(roster)) if i != own]
    chosen = []
    for _ in range(ring_size - 1):
        pick = int.from_bytes(rng.randbytes(8), "little") % len(others)
        chosen.append(others.pop(pick))
    positions = sorted(chosen + [own])
    return Ring(roster[i] for i in positions), positions.index(own)


def build_vote(
    ledger: Ledger,
    keypair: KeyPair,
    candidate: str,
    ring_size: int,
    rng: RandomSource | None = None,
) -> SignedBallot:
    ledger.check_admissible(EntryType.BALLOT)
    state = ledger.state
    cfg = state.full_config
    if candidate not in cfg.candidates:
        raise ConfigError(f"unknown candidate {candidate!r}")
    rng = rng or default_rng()
    ring, signer = sample_ring(state.roster, keypair.public, ring_size, rng)
    ballot = make_ballot(state.election_pubkey, encode_candidate(candidate), rng)
    return cast(ballot, ring, signer, keypair, rng)


def vote(
    ledger: Ledger,
    store: PayloadStore | None,
    keypair: KeyPair,
    candidate: str,
    ring_size: int,
    rng: RandomSource | None = None,
    submitter: str | None = None,
) -> LedgerEntry:
    rng = rng or default_rng()
    signed = build_vote(ledger, keypair, candidate, ring_size, rng)
    return submit_ballot(ledger, store, signed, submitter or fresh_submitter(rng))
