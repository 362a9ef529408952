"""Timing and storage-cost measurements over ring size."""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .election import fresh_submitter, setup_election, vote
from .group import Scalar, encode_candidate, keygen
from .ledger import ElectionConfig, PayloadMode, PayloadStore, advance_phase, ledger_bytes_per_ballot
from .ring import Ring, ring_verify
from .stealth import cast, make_ballot


@dataclass(frozen=True)
class TimingRow:
    ring_size: int
    repetitions: int
    sign_mean_ms: float
    verify_mean_ms: float

    @property
    def ratio(self) -> float:
        return self.verify_mean_ms / self.sign_mean_ms


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    slope, intercept = statistics.linear_regression(xs, ys)
    r = statistics.correlation(xs, ys)
    return LinearFit(slope, intercept, r * r)


def bench_ring(
    ring_sizes: Iterable[int],
    repetitions: int = 5,
    warmup: int = 1,
    rng=None,
) -> list[TimingRow]:
    """Mean wall-clock time to build+sign a ballot and to verify it, per ring size."""
    rng = rng or random.Random(0)
    election_key = keygen(rng).public
    candidate = encode_candidate("bench")
    rows = []
    for n in ring_sizes:
        if n < 1:
            raise ValueError("ring sizes must be >= 1")
        keys = [keygen(rng) for _ in range(n)]
        ring = Ring(k.public for k in keys)
        signer = n // 2
        sign_t, verify_t = [], []
        for rep in range(warmup + repetitions):
            t0 = time.perf_counter()
            sb = cast(make_ballot(election_key, candidate, rng), ring, signer, keys[signer], rng)
            t1 = time.perf_counter()
            ok = ring_verify(sb.message(), ring, sb.signature)
            t2 = time.perf_counter()
            if not ok:
                raise RuntimeError(f"benchmark ballot failed to verify at ring size {n}")
            if rep >= warmup:
                sign_t.append(t1 - t0)
                verify_t.append(t2 - t1)
        rows.append(TimingRow(n, repetitions, 1e3 * statistics.mean(sign_t), 1e3 * statistics.mean(verify_t)))
    return rows


def cost_table(
    ring_sizes: Sequence[int],
    modes: Sequence[PayloadMode | str] = tuple(PayloadMode),
    rng=None,
) -> list[dict]:
    """Bytes per ballot for each (payload mode, ring size), one honest ballot each.

    Every mode runs on a roster of ``max(ring_sizes)`` voters so the ring
    reference has the same width at every size.
    """
    rng = rng or random.Random(0)
    roster_size = max(max(ring_sizes), len(ring_sizes))
    voters = [keygen(rng) for _ in range(roster_size)]
    manager = Scalar.random(rng, nonzero=True)
    rows = []
    for mode in modes:
        mode = PayloadMode(mode)
        cfg = ElectionConfig(
            "cost", ("A", "B"), ("m",), roster=tuple(v.public for v in voters),
            min_ring_size=1, payload_mode=mode,
        )
        ledger = setup_election(cfg, {"m": manager})
        advance_phase(ledger)
        store = PayloadStore()
        for voter, n in zip(voters, ring_sizes):
            vote(ledger, store, voter, "A", n, rng, submitter=fresh_submitter(rng))
        for c in ledger_bytes_per_ballot(ledger, store):
            rows.append(c.as_dict())
    return rows


def to_delimited(rows: Sequence[dict], delimiter: str = "\t") -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), delimiter=delimiter, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def timing_dicts(rows: Sequence[TimingRow]) -> list[dict]:
    return [{**asdict(r), "verify_over_sign": r.ratio} for r in rows]
