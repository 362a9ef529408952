"""Simulated public bulletin board.

The ledger is an append-only, hash-chained log of typed entries. Every node
that replays the same entries rebuilds the same :class:`ElectionState`; the
ledger refuses entries the current phase does not admit, but it never checks
ballot signatures (that is the tally's job).

Entry hash::

    SHA-256("anonvote/v1/ledger-entry" || u64 index || prev_hash
            || u8 len || type || u32 len || payload || u16 len || submitter)

Persisted form is one canonical JSON object per line with hex payloads.

Ballot entries carry ``mode byte || body``. In ``inline`` mode the body is
the ballot record itself; ``tx-pointer`` and ``cas-pointer`` put the record
in the side :class:`PayloadStore` and the body is its 32-byte digest. The
ballot record is roster-relative::

    SA || R || ring-ref || signature
    ring-ref = 0x00 || bitmap over roster positions      (ring in roster order)
             | 0x01 || u32 count || member points        (anything else)

so an honest ballot costs exactly 64 more on-ledger bytes per extra ring
member (its ``c_i`` and ``r_i``) and nothing for the ring itself, which is
already on the ledger as roster entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from statistics import mean
from typing import Iterable, Sequence

from . import escrow as esc
from .errors import ChainError, ConfigError, DecodeError, FramingError, PhaseError, VotingError
from .group import POINT_BYTES, GroupPoint, Scalar
from .ring import Ring, RingSignature
from .stealth import BALLOT_BYTES, Ballot, SignedBallot

ENTRY_TAG = b"anonvote/v1/ledger-entry"
GENESIS_PREV = bytes(32)
DIGEST_BYTES = 32
AUTHORITY = "authority"


class Phase(str, Enum):
    SETUP = "setup"
    VOTING = "voting"
    TALLY = "tally"


_NEXT_PHASE = {Phase.SETUP: Phase.VOTING, Phase.VOTING: Phase.TALLY}


class EntryType(str, Enum):
    ELECTION_CONFIG = "election-config"
    ROSTER_ADD = "roster-add"
    ESCROW_COMMIT = "escrow-commit"
    ESCROW_PRODUCT = "escrow-product"
    BALLOT = "ballot"
    ESCROW_REVEAL = "escrow-reveal"
    PHASE_TRANSITION = "phase-transition"


ADMISSIBLE = {
    Phase.SETUP: {
        EntryType.ELECTION_CONFIG,
        EntryType.ROSTER_ADD,
        EntryType.ESCROW_COMMIT,
        EntryType.ESCROW_PRODUCT,
        EntryType.PHASE_TRANSITION,
    },
    Phase.VOTING: {EntryType.BALLOT, EntryType.PHASE_TRANSITION},
    Phase.TALLY: {EntryType.ESCROW_REVEAL},
}


class PayloadMode(str, Enum):
    INLINE = "inline"
    TX_POINTER = "tx-pointer"
    CAS_POINTER = "cas-pointer"


_MODE_BYTE = {PayloadMode.INLINE: 0, PayloadMode.TX_POINTER: 1, PayloadMode.CAS_POINTER: 2}
_BYTE_MODE = {v: k for k, v in _MODE_BYTE.items()}


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _parse_json(payload: bytes) -> dict:
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FramingError(f"payload is not canonical JSON: {exc}") from None
    if not isinstance(obj, dict) or canonical_json(obj) != payload:
        raise FramingError("payload is not a canonical JSON object")
    return obj


# --- entries ---------------------------------------------------------------

def entry_digest(index: int, prev_hash: bytes, entry_type: EntryType, payload: bytes, submitter: str) -> bytes:
    t = entry_type.value.encode()
    s = submitter.encode("utf-8")
    h = hashlib.sha256(ENTRY_TAG)
    h.update(struct.pack("<Q", index))
    h.update(prev_hash)
    h.update(struct.pack("<B", len(t)) + t)
    h.update(struct.pack("<I", len(payload)) + payload)
    h.update(struct.pack("<H", len(s)) + s)
    return h.digest()


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    prev_hash: bytes
    entry_type: EntryType
    payload: bytes
    submitter: str
    entry_hash: bytes

    def expected_hash(self) -> bytes:
        return entry_digest(self.index, self.prev_hash, self.entry_type, self.payload, self.submitter)

    @property
    def size(self) -> int:
        """On-ledger bytes: the length-framed fields plus both digests."""
        return (
            8 + len(self.prev_hash) + 1 + len(self.entry_type.value)
            + 4 + len(self.payload) + 2 + len(self.submitter.encode("utf-8")) + len(self.entry_hash)
        )

    def to_record(self) -> dict:
        return {
            "index": self.index,
            "prev_hash": self.prev_hash.hex(),
            "type": self.entry_type.value,
            "payload": self.payload.hex(),
            "submitter": self.submitter,
            "hash": self.entry_hash.hex(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> LedgerEntry:
        try:
            return cls(
                int(rec["index"]),
                bytes.fromhex(rec["prev_hash"]),
                EntryType(rec["type"]),
                bytes.fromhex(rec["payload"]),
                str(rec["submitter"]),
                bytes.fromhex(rec["hash"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DecodeError(f"bad ledger record: {exc}") from None


def validate_chain(entries: Sequence[LedgerEntry]) -> None:
    """Raise :class:`ChainError` at the first entry that breaks the chain."""
    prev = GENESIS_PREV
    for i, e in enumerate(entries):
        if e.index != i:
            raise ChainError(i, f"index {e.index} out of sequence")
        if e.prev_hash != prev:
            raise ChainError(i, "prev_hash does not link to the previous entry")
        if e.entry_hash != e.expected_hash():
            raise ChainError(i, "entry hash does not match contents")
        prev = e.entry_hash


# --- configuration ---------------------------------------------------------

@dataclass(frozen=True)
class ElectionConfig:
    election_id: str
    candidates: tuple[str, ...]
    managers: tuple[str, ...]
    roster: tuple[GroupPoint, ...] = ()
    min_ring_size: int = 2
    payload_mode: PayloadMode = PayloadMode.INLINE
    deposit_amount: int = 1
    # phase name -> last entry index that phase admits
    deadlines: dict[str, int] = field(default_factory=dict)
    tx_cost_factor: int = 10

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "managers", tuple(self.managers))
        object.__setattr__(self, "roster", tuple(self.roster))
        object.__setattr__(self, "payload_mode", PayloadMode(self.payload_mode))

    def validate(self, *, with_roster: bool = True) -> None:
        if not self.election_id:
            raise ConfigError("election id must be nonempty")
        if not self.candidates:
            raise ConfigError("at least one candidate is required")
        if any(not c for c in self.candidates) or len(set(self.candidates)) != len(self.candidates):
            raise ConfigError("candidate names must be nonempty and pairwise distinct")
        if not self.managers or len(set(self.managers)) != len(self.managers) or any(not m for m in self.managers):
            raise ConfigError("manager ids must be nonempty and pairwise distinct")
        if self.min_ring_size < 1:
            raise ConfigError("min_ring_size must be at least 1")
        if self.deposit_amount < 0 or self.tx_cost_factor < 1:
            raise ConfigError("deposit must be >= 0 and tx_cost_factor >= 1")
        for phase in self.deadlines:
            if phase not in {p.value for p in Phase}:
                raise ConfigError(f"unknown phase in deadlines: {phase!r}")
        if with_roster:
            if not self.roster:
                raise ConfigError("roster must be nonempty")
            if len({p.encoded for p in self.roster}) != len(self.roster):
                raise ConfigError("roster keys must be pairwise distinct")
            if self.min_ring_size > len(self.roster):
                raise ConfigError("min_ring_size exceeds roster size")

    def to_payload(self) -> bytes:
        d = {
            "election_id": self.election_id,
            "candidates": list(self.candidates),
            "managers": list(self.managers),
            "min_ring_size": self.min_ring_size,
            "payload_mode": self.payload_mode.value,
            "deposit_amount": self.deposit_amount,
            "deadlines": dict(self.deadlines),
            "tx_cost_factor": self.tx_cost_factor,
        }
        return canonical_json(d)

    @classmethod
    def from_payload(cls, payload: bytes) -> ElectionConfig:
        d = _parse_json(payload)
        try:
            cfg = cls(
                election_id=d["election_id"],
                candidates=d["candidates"],
                managers=d["managers"],
                min_ring_size=int(d["min_ring_size"]),
                payload_mode=PayloadMode(d["payload_mode"]),
                deposit_amount=int(d["deposit_amount"]),
                deadlines={str(k): int(v) for k, v in d["deadlines"].items()},
                tx_cost_factor=int(d["tx_cost_factor"]),
            )
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            raise FramingError(f"bad election config: {exc}") from None
        cfg.validate(with_roster=False)
        return cfg


# --- side storage ----------------------------------------------------------

class PayloadStore:
    """Content-addressed side storage for pointer-mode ballots.

    Two namespaces: ``cas`` models a content-addressed file network and
    ``tx`` models plain chain transactions referenced by id. Both key by
    SHA-256 of the stored bytes. With ``root`` set, objects live under
    ``root/<namespace>/<hex digest>``.
    """

    NAMESPACES = ("cas", "tx")

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else None
        self._mem: dict[str, dict[bytes, bytes]] = {ns: {} for ns in self.NAMESPACES}
        if self.root is not None:
            for ns in self.NAMESPACES:
                (self.root / ns).mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes, namespace: str = "cas") -> bytes:
        digest = hashlib.sha256(data).digest()
        self._mem[namespace][digest] = bytes(data)
        if self.root is not None:
            path = self.root / namespace / digest.hex()
            if not path.exists():
                path.write_bytes(data)
        return digest

    def get(self, digest: bytes, namespace: str = "cas") -> bytes:
        data = self._mem[namespace].get(digest)
        if data is None and self.root is not None:
            path = self.root / namespace / digest.hex()
            if path.exists():
                data = path.read_bytes()
                self._mem[namespace][digest] = data
        if data is None:
            raise KeyError(digest.hex())
        if hashlib.sha256(data).digest() != digest:
            raise DecodeError(f"stored object {digest.hex()} fails its content hash")
        return data

    def __contains__(self, key) -> bool:
        namespace, digest = key
        try:
            self.get(digest, namespace)
        except (KeyError, DecodeError):
            return False
        return True


# --- ballot record ---------------------------------------------------------

def _bitmap_len(roster_size: int) -> int:
    return (roster_size + 7) // 8


def encode_ballot_record(sb: SignedBallot, roster: Sequence[GroupPoint]) -> bytes:
    positions = {p.encoded: i for i, p in enumerate(roster)}
    idx = [positions.get(m.encoded) for m in sb.ring]
    if all(i is not None for i in idx) and idx == sorted(idx):
        bits = bytearray(_bitmap_len(len(roster)))
        for i in idx:
            bits[i // 8] |= 1 << (i % 8)
        ring_ref = b"\x00" + bytes(bits)
    else:
        ring_ref = b"\x01" + sb.ring.to_bytes()
    return sb.ballot.to_bytes() + ring_ref + sb.signature.to_bytes()


def decode_ballot_record(data: bytes, roster: Sequence[GroupPoint]) -> SignedBallot:
    if len(data) < BALLOT_BYTES + 1:
        raise DecodeError("ballot record truncated")
    ballot = Ballot.from_bytes(data[:BALLOT_BYTES])
    kind = data[BALLOT_BYTES]
    offset = BALLOT_BYTES + 1
    if kind == 0:
        n_bytes = _bitmap_len(len(roster))
        bits = data[offset:offset + n_bytes]
        if len(bits) != n_bytes:
            raise DecodeError("ring bitmap truncated")
        offset += n_bytes
        members = [roster[i] for i in range(len(roster)) if bits[i // 8] >> (i % 8) & 1]
        padding = [i for i in range(len(roster), 8 * n_bytes) if bits[i // 8] >> (i % 8) & 1]
        if padding:
            raise DecodeError("ring bitmap sets bits past the roster")
        if not members:
            raise DecodeError("empty ring")
        ring = Ring(members)
    elif kind == 1:
        ring, offset = Ring.read_from(data, offset)
    else:
        raise DecodeError(f"unknown ring reference kind {kind}")
    sig, offset = RingSignature.read_from(data, offset)
    if offset != len(data):
        raise DecodeError("trailing bytes after ballot record")
    if len(sig) != len(ring):
        raise DecodeError("signature size does not match ring size")
    return SignedBallot(ballot, ring, sig)


def _check_ballot_framing(payload: bytes, mode: PayloadMode) -> None:
    if not payload:
        raise FramingError("empty ballot payload")
    if payload[0] not in _BYTE_MODE:
        raise FramingError(f"unknown payload mode byte {payload[0]}")
    if _BYTE_MODE[payload[0]] is not mode:
        raise FramingError(f"election uses {mode.value} payloads")
    if mode is PayloadMode.INLINE:
        if len(payload) < 1 + BALLOT_BYTES + 1:
            raise FramingError("inline ballot payload truncated")
    elif len(payload) != 1 + DIGEST_BYTES:
        raise FramingError("pointer payload must be a 32-byte digest")


def ballot_record_bytes(entry: LedgerEntry, store: PayloadStore | None) -> bytes:
    """Resolve a ballot entry to its record bytes (fetching pointers)."""
    payload = entry.payload
    mode = _BYTE_MODE.get(payload[0]) if payload else None
    if mode is PayloadMode.INLINE:
        return payload[1:]
    if mode is None or store is None:
        raise DecodeError("ballot payload cannot be resolved")
    namespace = "tx" if mode is PayloadMode.TX_POINTER else "cas"
    try:
        return store.get(payload[1:], namespace)
    except KeyError:
        raise DecodeError(f"pointer {payload[1:].hex()} not found in {namespace} store") from None


def load_ballot(entry: LedgerEntry, store: PayloadStore | None, roster: Sequence[GroupPoint]) -> SignedBallot:
    return decode_ballot_record(ballot_record_bytes(entry, store), roster)


# --- replayed state --------------------------------------------------------

class ElectionState:
    """Everything a node derives by replaying the ledger from genesis."""

    def __init__(self):
        self.phase: Phase | None = None
        self.config: ElectionConfig | None = None
        self.roster: list[GroupPoint] = []
        self._roster_keys: set[bytes] = set()
        self.escrow = esc.EscrowState()
        self.ballot_indices: list[int] = []
        self.reveal_indices: list[int] = []

    def copy(self) -> ElectionState:
        other = ElectionState()
        other.phase = self.phase
        other.config = self.config
        other.roster = list(self.roster)
        other._roster_keys = set(self._roster_keys)
        other.escrow = self.escrow
        other.ballot_indices = list(self.ballot_indices)
        other.reveal_indices = list(self.reveal_indices)
        return other

    @property
    def full_config(self) -> ElectionConfig:
        if self.config is None:
            raise ConfigError("ledger carries no election config yet")
        return replace(self.config, roster=tuple(self.roster))

    @property
    def election_pubkey(self) -> GroupPoint:
        return self.escrow.election_pubkey

    def check_admissible(self, index: int, entry_type: EntryType) -> None:
        if self.phase is None:
            if index != 0 or entry_type is not EntryType.PHASE_TRANSITION:
                raise PhaseError("ledger must open with the genesis phase transition")
            return
        if entry_type not in ADMISSIBLE[self.phase]:
            if entry_type is EntryType.PHASE_TRANSITION:
                raise PhaseError(f"no phase follows {self.phase.value}")
            raise PhaseError(f"{entry_type.value} entries are not accepted during {self.phase.value}")
        if self.config is not None and entry_type is not EntryType.PHASE_TRANSITION:
            limit = self.config.deadlines.get(self.phase.value)
            if limit is not None and index > limit:
                raise PhaseError(f"{self.phase.value} deadline (entry {limit}) has passed")

    def apply(self, entry: LedgerEntry) -> None:
        """Validate ``entry`` against the current state and fold it in.

        Raises without mutating anything if the entry is not admissible.
        """
        self.check_admissible(entry.index, entry.entry_type)
        handler = getattr(self, "_apply_" + entry.entry_type.name.lower())
        handler(entry)

    def _need_config(self) -> ElectionConfig:
        if self.config is None:
            raise PhaseError("the election config entry must come first")
        return self.config

    def _apply_phase_transition(self, entry):
        target = _parse_json(entry.payload).get("to")
        if self.phase is None:
            if target != Phase.SETUP.value:
                raise PhaseError("genesis must open the setup phase")
            self.phase = Phase.SETUP
            return
        expected = _NEXT_PHASE[self.phase]
        if target != expected.value:
            raise PhaseError(f"next phase is {expected.value}, not {target!r}")
        if expected is Phase.VOTING:
            cfg = self._need_config()
            if not self.roster:
                raise PhaseError("cannot open voting with an empty roster")
            if cfg.min_ring_size > len(self.roster):
                raise PhaseError("min_ring_size exceeds roster size")
            missing = [m for m in cfg.managers if m not in self.escrow.manager_ids]
            if missing or not self.escrow.complete:
                raise PhaseError("escrow incomplete; waiting on: " + ", ".join(missing or ["product chain"]))
            self.escrow = esc.close_commit_phase(self.escrow)
        self.phase = expected

    def _apply_election_config(self, entry):
        if self.config is not None:
            raise PhaseError("election config already published")
        self.config = ElectionConfig.from_payload(entry.payload)

    def _apply_roster_add(self, entry):
        self._need_config()
        d = _parse_json(entry.payload)
        try:
            key = GroupPoint.from_hex(d["key"])
        except (KeyError, TypeError):
            raise FramingError("roster entry lacks a key") from None
        if key.is_identity():
            raise FramingError("roster key is the identity")
        if key.encoded in self._roster_keys:
            raise VotingError("key already on the roster")
        self.roster.append(key)
        self._roster_keys.add(key.encoded)

    def _apply_escrow_commit(self, entry):
        cfg = self._need_config()
        try:
            commitment = esc.ManagerCommitment.from_dict(_parse_json(entry.payload))
        except (KeyError, TypeError) as exc:
            raise FramingError(f"bad commitment: {exc}") from None
        if commitment.manager_id not in cfg.managers:
            raise esc.UnknownManager(commitment.manager_id)
        context = esc.escrow_context(cfg.election_id, commitment.manager_id)
        self.escrow = esc.add_commitment(self.escrow, commitment, context, cfg.deposit_amount)

    def _apply_escrow_product(self, entry):
        d = _parse_json(entry.payload)
        try:
            manager, point = str(d["manager"]), GroupPoint.from_hex(d["point"])
        except (KeyError, TypeError) as exc:
            raise FramingError(f"bad product step: {exc}") from None
        self.escrow = esc.add_product(self.escrow, manager, point)

    def _apply_ballot(self, entry):
        _check_ballot_framing(entry.payload, self._need_config().payload_mode)
        self.ballot_indices.append(entry.index)

    def _apply_escrow_reveal(self, entry):
        d = _parse_json(entry.payload)
        try:
            manager, secret = str(d["manager"]), Scalar.from_hex(d["secret"])
        except (KeyError, TypeError) as exc:
            raise FramingError(f"bad reveal: {exc}") from None
        self.escrow = esc.reveal_share(self.escrow, manager, secret)
        self.reveal_indices.append(entry.index)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase.value if self.phase else None,
            "config": json.loads(self.config.to_payload()) if self.config else None,
            "roster": [p.hex() for p in self.roster],
            "escrow": self.escrow.to_dict(),
            "ballots": list(self.ballot_indices),
        }


# --- the ledger ------------------------------------------------------------

class Ledger:
    """Single-writer hash-chained log. ``entries`` returns an immutable snapshot."""

    def __init__(self, *, _genesis: bool = True):
        self._entries: list[LedgerEntry] = []
        self.state = ElectionState()
        if _genesis:
            self.append(EntryType.PHASE_TRANSITION, canonical_json({"to": Phase.SETUP.value}), AUTHORITY)

    @property
    def entries(self) -> tuple[LedgerEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i) -> LedgerEntry:
        return self._entries[i]

    @property
    def head_hash(self) -> bytes:
        return self._entries[-1].entry_hash if self._entries else GENESIS_PREV

    @property
    def phase(self) -> Phase | None:
        return self.state.phase

    @property
    def config(self) -> ElectionConfig:
        return self.state.full_config

    def check_admissible(self, entry_type: EntryType) -> None:
        self.state.check_admissible(len(self._entries), EntryType(entry_type))

    def append(self, entry_type: EntryType, payload: bytes, submitter: str) -> LedgerEntry:
        entry_type = EntryType(entry_type)
        payload = bytes(payload)
        index = len(self._entries)
        digest = entry_digest(index, self.head_hash, entry_type, payload, submitter)
        entry = LedgerEntry(index, self.head_hash, entry_type, payload, submitter, digest)
        self._push(entry)
        return entry

    def _push(self, entry: LedgerEntry) -> None:
        # apply to a scratch copy so a rejected entry leaves no trace
        scratch = self.state.copy()
        scratch.apply(entry)
        self._entries.append(entry)
        self.state = scratch

    @classmethod
    def replay(cls, entries: Iterable[LedgerEntry]) -> Ledger:
        """Rebuild a ledger from an entry stream, re-checking every rule."""
        entries = list(entries)
        validate_chain(entries)
        ledger = cls(_genesis=False)
        for e in entries:
            try:
                ledger._push(e)
            except VotingError as exc:
                raise ChainError(e.index, f"inadmissible entry: {exc}") from exc
        return ledger

    def state_digest(self) -> str:
        body = {"head": self.head_hash.hex(), "length": len(self), "state": self.state.to_dict()}
        return hashlib.sha256(canonical_json(body)).hexdigest()

    def dumps(self) -> str:
        return "".join(canonical_json(e.to_record()).decode() + "\n" for e in self._entries)

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
        os.replace(tmp, path)

    @classmethod
    def loads(cls, text: str) -> Ledger:
        entries = []
        for lineno, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ChainError(lineno, f"unparseable record: {exc}") from None
            try:
                entries.append(LedgerEntry.from_record(rec))
            except DecodeError as exc:
                raise ChainError(lineno, str(exc)) from None
        return cls.replay(entries)

    @classmethod
    def load(cls, path: str | os.PathLike) -> Ledger:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


# --- operations ------------------------------------------------------------

def append(ledger: Ledger, entry_type: EntryType, payload: bytes, submitter: str) -> LedgerEntry:
    return ledger.append(entry_type, payload, submitter)


def advance_phase(ledger: Ledger, authority: str = AUTHORITY) -> LedgerEntry:
    current = ledger.phase
    if current not in _NEXT_PHASE:
        raise PhaseError(f"no phase follows {current.value if current else None}")
    return ledger.append(
        EntryType.PHASE_TRANSITION, canonical_json({"to": _NEXT_PHASE[current].value}), authority
    )


def submit_ballot(
    ledger: Ledger,
    store: PayloadStore | None,
    signed_ballot: SignedBallot | bytes,
    submitter: str,
) -> LedgerEntry:
    """Post a ballot without checking its signature.

    Accepts a :class:`SignedBallot` or its wire bytes; only structure is
    checked here.
    """
    if not isinstance(signed_ballot, SignedBallot):
        signed_ballot = SignedBallot.from_bytes(bytes(signed_ballot))
    ledger.check_admissible(EntryType.BALLOT)
    mode = ledger.state.full_config.payload_mode
    record = encode_ballot_record(signed_ballot, ledger.state.roster)
    if mode is PayloadMode.INLINE:
        body = record
    else:
        if store is None:
            raise ConfigError(f"{mode.value} mode needs a payload store")
        body = store.put(record, "tx" if mode is PayloadMode.TX_POINTER else "cas")
    return ledger.append(EntryType.BALLOT, bytes([_MODE_BYTE[mode]]) + body, submitter)


@dataclass(frozen=True)
class BallotCost:
    mode: str
    ring_size: int | None
    ballots: int
    on_ledger_bytes: float
    off_ledger_bytes: float
    weighted_cost: float

    def as_dict(self) -> dict:
        return asdict(self)


def ledger_bytes_per_ballot(ledger: Ledger, store: PayloadStore | None = None) -> list[BallotCost]:
    """Mean storage per ballot entry, grouped by payload mode and ring size.

    ``weighted_cost`` prices on-ledger bytes at 1, transaction bytes at
    ``1 / tx_cost_factor`` and content-store bytes at 0.
    """
    if not ledger.state.ballot_indices:
        return []
    roster = ledger.state.roster
    factor = ledger.state.full_config.tx_cost_factor
    groups: dict[tuple[str, int | None], list[tuple[int, int, float]]] = {}
    for idx in ledger.state.ballot_indices:
        entry = ledger[idx]
        mode = _BYTE_MODE[entry.payload[0]]
        try:
            record = ballot_record_bytes(entry, store)
            ring_size = len(decode_ballot_record(record, roster).ring)
        except DecodeError:
            record, ring_size = b"", None
        off = len(record) if mode is not PayloadMode.INLINE else 0
        weight = off / factor if mode is PayloadMode.TX_POINTER else 0.0
        groups.setdefault((mode.value, ring_size), []).append((entry.size, off, entry.size + weight))
    out = []
    for (mode, n), rows in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0)):
        out.append(
            BallotCost(
                mode, n, len(rows),
                mean(r[0] for r in rows), mean(r[1] for r in rows), mean(r[2] for r in rows),
            )
        )
    return out


def expected_inline_entry_size(ring_size: int, roster_size: int, submitter_len: int) -> int:
    """On-ledger size of an honest inline ballot entry, from the wire formats."""
    record = BALLOT_BYTES + 1 + _bitmap_len(roster_size) + POINT_BYTES + 4 + 64 * ring_size
    payload = 1 + record
    return 8 + 32 + 1 + len(EntryType.BALLOT.value) + 4 + payload + 2 + submitter_len + 32
