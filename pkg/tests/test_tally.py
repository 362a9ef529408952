import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harness import cast_planned, new_election, random_election
from anonvote.election import build_vote, fresh_submitter, reveal, vote
from anonvote.errors import MissingReveal, PhaseError, TallyError
from anonvote.escrow import combine_secret
from anonvote.group import Scalar
from anonvote.ledger import Ledger, PayloadStore, advance_phase, submit_ballot
from anonvote.tally import (
    DUPLICATE_KEY_IMAGE,
    RING_TOO_SMALL,
    TallyReport,
    secret_fingerprint,
    tally,
    tally_from_ledger,
    verify_report,
)


def close(el):
    advance_phase(el.ledger)
    for m, s in el.managers.items():
        reveal(el.ledger, m, s)


def verdicts(report):
    out = {a.entry_index: ("accepted", a.candidate) for a in report.accepted}
    out.update({r.entry_index: ("rejected", r.reason) for r in report.rejected})
    return out


def test_three_voters_two_candidates():
    rng = random.Random(1)
    el = new_election(rng, 3, 2)
    for voter, cand in zip(el.voters, ["cand-0", "cand-0", "cand-1"]):
        vote(el.ledger, el.store, voter, cand, 3, rng)
    close(el)
    report = tally(el.ledger, el.store, el.secret)
    assert report.counts == {"cand-0": 2, "cand-1": 1}
    assert not report.rejected
    assert report.escrow_secret_fingerprint == secret_fingerprint(el.secret)
    assert tally_from_ledger(el.ledger, el.store).dumps() == report.dumps()


def test_second_ballot_from_same_key_is_a_duplicate():
    rng = random.Random(2)
    el = new_election(rng, 4, 2)
    first = vote(el.ledger, el.store, el.voters[0], "cand-0", 2, rng)
    second = vote(el.ledger, el.store, el.voters[0], "cand-1", 4, rng)
    close(el)
    report = tally(el.ledger, el.store, el.secret)
    assert report.counts == {"cand-0": 1, "cand-1": 0}
    assert verdicts(report) == {first.index: ("accepted", "cand-0"), second.index: ("rejected", DUPLICATE_KEY_IMAGE)}


def test_zero_ballots():
    el = new_election(random.Random(3), 3, 3)
    close(el)
    report = tally(el.ledger, el.store, el.secret)
    assert report.counts == {"cand-0": 0, "cand-1": 0, "cand-2": 0}
    assert report.accepted == [] and report.rejected == []


def test_ring_below_minimum_rejected():
    rng = random.Random(4)
    el = new_election(rng, 5, 2, min_ring=3)
    e = vote(el.ledger, el.store, el.voters[0], "cand-0", 2, rng)
    close(el)
    assert verdicts(tally(el.ledger, el.store, el.secret)) == {e.index: ("rejected", RING_TOO_SMALL)}


def test_tally_preconditions():
    rng = random.Random(5)
    el = new_election(rng, 3, 2, n_managers=2)
    vote(el.ledger, el.store, el.voters[0], "cand-0", 2, rng)
    with pytest.raises(PhaseError):
        tally(el.ledger, el.store, el.secret)
    advance_phase(el.ledger)
    reveal(el.ledger, "m0", el.managers["m0"])
    with pytest.raises(MissingReveal):
        tally(el.ledger, el.store, el.secret)
    reveal(el.ledger, "m1", el.managers["m1"])
    with pytest.raises(TallyError):
        tally(el.ledger, el.store, el.secret + Scalar(1))


def test_verify_report():
    el = random_election(6)
    report = tally(el.ledger, el.store, el.secret)
    text = report.dumps()
    assert verify_report(el.ledger, el.store, el.secret, report)
    assert verify_report(el.ledger, el.store, el.secret, text)
    assert TallyReport.loads(text).dumps() == text
    bumped = TallyReport.loads(text)
    first = next(iter(bumped.counts))
    bumped.counts[first] += 1
    assert not verify_report(el.ledger, el.store, el.secret, bumped)
    assert not verify_report(el.ledger, el.store, el.secret + Scalar(1), report)


@pytest.mark.parametrize("seed", range(6))
def test_matches_plaintext_ground_truth(seed):
    el = random_election(100 + seed)
    counts, expected = el.ground_truth()
    report = tally(el.ledger, el.store, el.secret)
    assert report.counts == counts
    assert verdicts(report) == expected


def test_honest_only_elections_accept_everything():
    for seed in range(3):
        el = random_election(200 + seed, adversarial=False)
        report = tally(el.ledger, el.store, el.secret)
        voters = {b.voter for b in el.plan}
        assert len(report.accepted) == len(voters)
        assert all(r.reason == DUPLICATE_KEY_IMAGE for r in report.rejected)


@given(st.randoms(use_true_random=False))
@settings(max_examples=5, deadline=None)
def test_counts_invariant_under_ballot_order(rnd):
    rng = random.Random(7)
    el = new_election(rng, 6, 3)
    base = el.ledger.entries
    signed = [build_vote(el.ledger, v, rng.choice(el.config.candidates), 3, rng) for v in el.voters]
    order = list(range(len(signed)))
    rnd.shuffle(order)
    reports = []
    for perm in (range(len(signed)), order):
        ledger = Ledger.replay(base)
        store = PayloadStore()
        for i in perm:
            submit_ballot(ledger, store, signed[i], fresh_submitter(rng))
        advance_phase(ledger)
        for m, s in el.managers.items():
            reveal(ledger, m, s)
        reports.append(tally(ledger, store, el.secret))
    assert reports[0].counts == reports[1].counts
    assert sum(reports[0].counts.values()) == 6


@pytest.mark.parametrize("workers", [2, 8])
def test_worker_count_does_not_change_the_report(workers):
    for seed in range(3):
        el = random_election(300 + seed)
        assert tally(el.ledger, el.store, el.secret, workers=workers).dumps() == tally(el.ledger, el.store, el.secret).dumps()


def test_combined_secret_from_ledger():
    el = random_election(7)
    assert combine_secret(el.ledger.state.escrow) == el.secret
