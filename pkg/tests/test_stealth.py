import random

import pytest

import oracles
from anonvote.errors import DecodeError
from anonvote.group import IDENTITY, G, Scalar, encode_candidate, keygen
from anonvote.ring import Ring
from anonvote.stealth import BALLOT_BYTES, STEALTH_TAG, Ballot, SignedBallot, cast, make_ballot, match_ballot

CANDIDATES = [encode_candidate(n) for n in ("alice", "bob", "carol")]


@pytest.fixture(scope="module")
def escrow():
    return keygen(random.Random(99))


def test_roundtrip_every_candidate(escrow):
    rng = random.Random(1)
    for j, b in enumerate(CANDIDATES):
        for _ in range(5):
            ballot = make_ballot(escrow.public, b, rng)
            assert match_ballot(ballot, escrow.secret, CANDIDATES) == j


def test_ballot_matches_oracle_construction(escrow):
    rng = random.Random(2)
    ballot = make_ballot(escrow.public, CANDIDATES[1], random.Random(2))
    r = Scalar.random(rng, nonzero=True)
    shared = oracles.mul_bytes(r.value, escrow.public.encoded)
    h = oracles.hash_and_reduce(b"anonvote/v1/hash-to-scalar", STEALTH_TAG + shared)
    sa = oracles.encode(oracles.add(oracles.mul(h, oracles.BASE), oracles.decode(CANDIDATES[1].encoded)))
    assert ballot.stealth_address.encoded == sa
    assert ballot.nonce_point.encoded == oracles.base_mul_bytes(r.value)


def test_wrong_secret_matches_nothing(escrow):
    rng = random.Random(3)
    hits = 0
    for _ in range(50):
        ballot = make_ballot(escrow.public, rng.choice(CANDIDATES), rng)
        wrong = Scalar.random(rng, nonzero=True)
        hits += match_ballot(ballot, wrong, CANDIDATES) is not None
    assert hits == 0


def test_unknown_candidate_and_empty_list(escrow):
    rng = random.Random(4)
    ballot = make_ballot(escrow.public, encode_candidate("mallory"), rng)
    assert match_ballot(ballot, escrow.secret, CANDIDATES) is None
    assert match_ballot(ballot, escrow.secret, []) is None


def test_same_candidate_ballots_differ(escrow):
    rng = random.Random(5)
    a = make_ballot(escrow.public, CANDIDATES[0], rng)
    b = make_ballot(escrow.public, CANDIDATES[0], rng)
    assert a.stealth_address != b.stealth_address
    assert a.nonce_point != b.nonce_point


def test_ballot_bytes(escrow):
    ballot = make_ballot(escrow.public, CANDIDATES[2], random.Random(6))
    raw = ballot.to_bytes()
    assert len(raw) == BALLOT_BYTES == 64
    assert Ballot.from_bytes(raw) == ballot
    with pytest.raises(DecodeError):
        Ballot.from_bytes(raw[:63])
    with pytest.raises(DecodeError):
        Ballot.from_bytes(raw[:32] + IDENTITY.encoded)
    with pytest.raises(ValueError):
        Ballot(G, IDENTITY)


def test_cast_binds_the_ballot(escrow):
    rng = random.Random(7)
    voters = [keygen(rng) for _ in range(4)]
    ring = Ring(v.public for v in voters)
    ballot = make_ballot(escrow.public, CANDIDATES[0], rng)
    signed = cast(ballot, ring, 2, voters[2], rng)
    assert signed.verify()
    other = make_ballot(escrow.public, CANDIDATES[1], rng)
    assert not SignedBallot(other, ring, signed.signature).verify()
    swapped = Ballot(ballot.stealth_address, other.nonce_point)
    assert not SignedBallot(swapped, ring, signed.signature).verify()


def test_signed_ballot_serialization(escrow):
    rng = random.Random(8)
    voters = [keygen(rng) for _ in range(3)]
    ring = Ring(v.public for v in voters)
    signed = cast(make_ballot(escrow.public, CANDIDATES[0], rng), ring, 0, voters[0], rng)
    raw = signed.to_bytes()
    assert len(raw) == 64 + 4 + 32 * 3 + 36 + 64 * 3
    back = SignedBallot.from_bytes(raw)
    assert back == signed and back.verify()
    with pytest.raises(DecodeError):
        SignedBallot.from_bytes(raw + b"\x00")
    with pytest.raises(DecodeError):
        SignedBallot.from_bytes(raw[:-5])
