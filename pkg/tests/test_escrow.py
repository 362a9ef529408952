import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from anonvote.errors import (
    DuplicateReveal,
    EscrowError,
    MissingReveal,
    PhaseError,
    ProofError,
    RevealMismatch,
    UnknownManager,
)
from anonvote.escrow import (
    EscrowState,
    ManagerCommitment,
    add_commitment,
    add_product,
    close_commit_phase,
    combine_secret,
    commit_share,
    escrow_context,
    extend_product,
    reveal_share,
    settle_deposits,
    verify_commitment,
)
from anonvote.group import G, L, Scalar, base_mul

EID = "election-7"


def build(secrets, deposit=3):
    """Run the commit phase for ``secrets`` (manager id -> scalar)."""
    state = EscrowState()
    for m, s in secrets.items():
        state = add_commitment(state, commit_share(s, escrow_context(EID, m), m), escrow_context(EID, m), deposit)
    acc = G
    for m, s in secrets.items():
        acc = extend_product(acc, s)
        state = add_product(state, m, acc)
    return close_commit_phase(state)


def managers(n, seed=0):
    rng = random.Random(seed)
    return {f"m{i}": Scalar.random(rng, nonzero=True) for i in range(n)}


def test_schnorr_proof_verifies_and_is_bound_to_context():
    s = Scalar(123456789)
    ctx = escrow_context(EID, "m0")
    c = commit_share(s, ctx, "m0")
    assert verify_commitment(c, ctx)
    assert not verify_commitment(c, escrow_context(EID, "m1"))
    assert not verify_commitment(c, escrow_context("other", "m0"))
    assert c.share_point.encoded == oracles.base_mul_bytes(123456789)


def test_schnorr_nonce_deterministic_without_rng():
    ctx = escrow_context(EID, "m0")
    assert commit_share(Scalar(5), ctx) == commit_share(Scalar(5), ctx)
    a = commit_share(Scalar(5), ctx, rng=random.Random(1))
    b = commit_share(Scalar(5), ctx, rng=random.Random(2))
    assert a.proof != b.proof and verify_commitment(a, ctx) and verify_commitment(b, ctx)
    with pytest.raises(ValueError):
        commit_share(Scalar(0), ctx)


def test_tampered_proof_rejected():
    ctx = escrow_context(EID, "m0")
    c = commit_share(Scalar(77), ctx, "m0")
    bad = ManagerCommitment("m0", c.share_point, type(c.proof)(c.proof.commitment, c.proof.challenge, c.proof.response + Scalar(1)))
    assert not verify_commitment(bad, ctx)
    other = ManagerCommitment("m0", base_mul(Scalar(78)), c.proof)
    assert not verify_commitment(other, ctx)
    with pytest.raises(ProofError):
        add_commitment(EscrowState(), bad, ctx)


def test_context_encoding_is_unambiguous():
    assert escrow_context("ab", "c") != escrow_context("a", "bc")


def test_commitment_dict_roundtrip():
    c = commit_share(Scalar(9), escrow_context(EID, "m0"), "m0")
    assert ManagerCommitment.from_dict(c.to_dict()) == c


@given(st.lists(st.integers(min_value=1, max_value=L - 1), min_size=1, max_size=5), st.randoms())
@settings(max_examples=20, deadline=None)
def test_product_is_order_independent(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    acc1, acc2 = G, G
    for v in values:
        acc1 = extend_product(acc1, Scalar(v))
    for v in shuffled:
        acc2 = extend_product(acc2, Scalar(v))
    assert acc1 == acc2


@pytest.mark.parametrize("n", [1, 2, 5])
def test_combine_matches_big_int_product(n):
    secrets = managers(n, seed=n)
    state = build(secrets)
    for m, s in secrets.items():
        state = reveal_share(state, m, s)
    a = combine_secret(state)
    expected = 1
    for s in secrets.values():
        expected = expected * s.value % oracles.ORDER
    assert a.value == expected
    assert state.election_pubkey.encoded == oracles.base_mul_bytes(expected)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_withheld_reveal_blocks_combination(n):
    secrets = managers(n, seed=10 + n)
    state = build(secrets)
    withheld = list(secrets)[-1]
    for m, s in secrets.items():
        if m != withheld:
            state = reveal_share(state, m, s)
    with pytest.raises(MissingReveal) as info:
        combine_secret(state)
    assert info.value.missing == [withheld]
    settle = settle_deposits(state)
    assert settle.forfeited == {withheld: 3}
    assert set(settle.refunded) == set(secrets) - {withheld}
    assert settle.total == 3 * n


def test_reveal_errors():
    secrets = managers(2, seed=3)
    state = build(secrets)
    with pytest.raises(RevealMismatch):
        reveal_share(state, "m0", secrets["m1"])
    with pytest.raises(UnknownManager):
        reveal_share(state, "nobody", secrets["m0"])
    state = reveal_share(state, "m0", secrets["m0"])
    with pytest.raises(DuplicateReveal):
        reveal_share(state, "m0", secrets["m0"])


def test_reveal_before_close_is_a_phase_error():
    secrets = managers(1)
    m, s = next(iter(secrets.items()))
    state = add_commitment(EscrowState(), commit_share(s, escrow_context(EID, m), m), escrow_context(EID, m))
    state = add_product(state, m, base_mul(s))
    with pytest.raises(PhaseError):
        reveal_share(state, m, s)


def test_commit_phase_ordering_rules():
    secrets = managers(2, seed=4)
    (m0, s0), (m1, s1) = secrets.items()
    ctx0, ctx1 = escrow_context(EID, m0), escrow_context(EID, m1)
    state = EscrowState()
    with pytest.raises(EscrowError):
        add_product(state, m0, base_mul(s0))
    state = add_commitment(state, commit_share(s0, ctx0, m0), ctx0)
    with pytest.raises(EscrowError):
        add_commitment(state, commit_share(s0, ctx0, m0), ctx0)
    state = add_commitment(state, commit_share(s1, ctx1, m1), ctx1)
    with pytest.raises(EscrowError):
        add_product(state, m1, base_mul(s1))
    with pytest.raises(EscrowError):
        add_product(state, m0, base_mul(s1))
    with pytest.raises(EscrowError):
        close_commit_phase(state)
    state = add_product(state, m0, base_mul(s0))
    with pytest.raises(EscrowError):
        state.election_pubkey
    state = close_commit_phase(add_product(state, m1, s1 * base_mul(s0)))
    with pytest.raises(PhaseError):
        add_commitment(state, commit_share(Scalar(3), escrow_context(EID, "late"), "late"), escrow_context(EID, "late"))


def test_bad_product_step_caught_at_reveal():
    secrets = managers(2, seed=5)
    (m0, s0), (m1, s1) = secrets.items()
    state = EscrowState()
    for m, s in secrets.items():
        state = add_commitment(state, commit_share(s, escrow_context(EID, m), m), escrow_context(EID, m))
    state = add_product(state, m0, base_mul(s0))
    state = close_commit_phase(add_product(state, m1, base_mul(Scalar(42))))
    state = reveal_share(reveal_share(state, m0, s0), m1, s1)
    with pytest.raises(EscrowError):
        combine_secret(state)


def test_serialized_state_holds_no_scalars_before_reveal():
    secrets = managers(3, seed=6)
    state = build(secrets)
    text = repr(state.to_dict())
    for s in secrets.values():
        assert s.hex() not in text
    assert state.to_dict()["reveals"] == {}


def test_deposits_conserved_for_any_reveal_subset():
    secrets = managers(4, seed=8)
    state = build(secrets, deposit=5)
    rng = random.Random(0)
    for _ in range(10):
        st_ = state
        for m in rng.sample(list(secrets), rng.randint(0, 4)):
            st_ = reveal_share(st_, m, secrets[m])
        settle = settle_deposits(st_)
        assert settle.total == 20
        assert set(settle.refunded).isdisjoint(settle.forfeited)
