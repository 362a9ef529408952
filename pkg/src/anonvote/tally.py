"""Self-tallying over a finished ledger.

A ballot is counted when, checked in this order,

1. it decodes and its ring is at least ``min_ring_size`` long,
2. every ring member is a roster key,
3. its ring signature verifies,
4. no earlier *accepted* ballot carried its key image, and
5. its stealth address opens to one of the candidates.

The first failing check names the rejection. Checks 1-3 and 5 are
independent per ballot and may run on worker threads; the key-image pass
always runs sequentially in ledger order, so the report does not depend on
the worker count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import DecodeError, MissingReveal, PhaseError, RingError, TallyError
from .escrow import combine_secret
from .group import Scalar, base_mul, encode_candidate
from .ledger import ElectionConfig, Ledger, PayloadStore, Phase, load_ballot
from .stealth import match_ballot

FINGERPRINT_TAG = b"anonvote/v1/escrow-secret-fingerprint"

BAD_SIGNATURE = "bad-signature"
DUPLICATE_KEY_IMAGE = "duplicate-key-image"
RING_TOO_SMALL = "ring-too-small"
RING_NOT_IN_ROSTER = "ring-not-in-roster"
NO_CANDIDATE_MATCH = "no-candidate-match"
UNDECODABLE = "undecodable"

REASONS = (BAD_SIGNATURE, DUPLICATE_KEY_IMAGE, RING_TOO_SMALL, RING_NOT_IN_ROSTER, NO_CANDIDATE_MATCH, UNDECODABLE)


def secret_fingerprint(secret: Scalar) -> str:
    return hashlib.sha256(FINGERPRINT_TAG + secret.to_bytes()).hexdigest()


@dataclass(frozen=True)
class Accepted:
    entry_index: int
    candidate: str
    key_image: str


@dataclass(frozen=True)
class Rejected:
    entry_index: int
    reason: str


@dataclass
class TallyReport:
    election_id: str
    ledger_head: str
    counts: dict[str, int]
    accepted: list[Accepted] = field(default_factory=list)
    rejected: list[Rejected] = field(default_factory=list)
    escrow_secret_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "election_id": self.election_id,
            "ledger_head": self.ledger_head,
            "counts": dict(self.counts),
            "accepted": [[a.entry_index, a.candidate, a.key_image] for a in self.accepted],
            "rejected": [[r.entry_index, r.reason] for r in self.rejected],
            "escrow_secret_fingerprint": self.escrow_secret_fingerprint,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> TallyReport:
        d = json.loads(text)
        return cls(
            election_id=d["election_id"],
            ledger_head=d["ledger_head"],
            counts={str(k): int(v) for k, v in d["counts"].items()},
            accepted=[Accepted(int(i), str(c), str(k)) for i, c, k in d["accepted"]],
            rejected=[Rejected(int(i), str(r)) for i, r in d["rejected"]],
            escrow_secret_fingerprint=d["escrow_secret_fingerprint"],
        )


@dataclass(frozen=True)
class _Check:
    """Per-ballot verdict from the parallel stage."""

    index: int
    reason: str | None = None
    key_image: bytes = b""
    candidate: int | None = None


def _check_ballot(entry, store, roster, roster_keys, min_ring, secret, cand_points) -> _Check:
    try:
        sb = load_ballot(entry, store, roster)
    except DecodeError:
        return _Check(entry.index, UNDECODABLE)
    if len(sb.ring) < min_ring:
        return _Check(entry.index, RING_TOO_SMALL)
    if any(m.encoded not in roster_keys for m in sb.ring):
        return _Check(entry.index, RING_NOT_IN_ROSTER)
    try:
        ok = sb.verify()
    except RingError:
        ok = False
    if not ok:
        return _Check(entry.index, BAD_SIGNATURE)
    return _Check(
        entry.index,
        key_image=sb.signature.key_image.encoded,
        candidate=match_ballot(sb.ballot, secret, cand_points),
    )


def tally(
    ledger: Ledger,
    store: PayloadStore | None,
    escrow_secret: Scalar,
    config: ElectionConfig | None = None,
    *,
    workers: int = 1,
) -> TallyReport:
    state = ledger.state
    if state.phase is not Phase.TALLY:
        raise PhaseError("tally requires the ledger to be in the tally phase")
    missing = state.escrow.missing_reveals()
    if missing:
        raise MissingReveal(missing)
    if base_mul(escrow_secret) != state.election_pubkey:
        raise TallyError("escrow secret does not match the election public key on the ledger")
    cfg = config or state.full_config
    roster = state.roster
    roster_keys = {p.encoded for p in roster}
    cand_points = [encode_candidate(c) for c in cfg.candidates]
    entries = [ledger[i] for i in state.ballot_indices]

    def run(entry):
        return _check_ballot(entry, store, roster, roster_keys, cfg.min_ring_size, escrow_secret, cand_points)

    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(run, entries))
    else:
        checks = [run(e) for e in entries]

    counts = {c: 0 for c in cfg.candidates}
    report = TallyReport(
        election_id=cfg.election_id,
        ledger_head=ledger.head_hash.hex(),
        counts=counts,
        escrow_secret_fingerprint=secret_fingerprint(escrow_secret),
    )
    seen: set[bytes] = set()
    for chk in checks:  # ledger order
        if chk.reason is not None:
            report.rejected.append(Rejected(chk.index, chk.reason))
        elif chk.key_image in seen:
            report.rejected.append(Rejected(chk.index, DUPLICATE_KEY_IMAGE))
        elif chk.candidate is None:
            report.rejected.append(Rejected(chk.index, NO_CANDIDATE_MATCH))
        else:
            seen.add(chk.key_image)
            name = cfg.candidates[chk.candidate]
            counts[name] += 1
            report.accepted.append(Accepted(chk.index, name, chk.key_image.hex()))
    return report


def tally_from_ledger(ledger: Ledger, store: PayloadStore | None, *, workers: int = 1) -> TallyReport:
    """Rebuild the escrow secret from the published reveals, then tally."""
    return tally(ledger, store, combine_secret(ledger.state.escrow), workers=workers)


def verify_report(
    ledger: Ledger,
    store: PayloadStore | None,
    escrow_secret: Scalar,
    report: TallyReport | str,
) -> bool:
    claimed = report if isinstance(report, str) else report.dumps()
    try:
        recomputed = tally(ledger, store, escrow_secret).dumps()
    except (PhaseError, MissingReveal, TallyError):
        return False
    return recomputed == claimed
