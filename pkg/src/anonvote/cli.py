"""``anonvote`` command line.

Exit status:

   0  success
   1  unexpected failure
   2  bad command-line usage
   3  invalid election configuration or arguments
   4  ledger already exists
   5  operation not allowed in the current phase
   6  voter key is not on the roster
   7  managers withheld reveals (tally impossible, deposits forfeited)
   8  escrow failure (bad proof, reveal does not open its commitment, ...)
   9  tally report does not match the ledger
  10  ledger file is corrupt or fails hash-chain validation
  11  submitter id would link the ballot to a roster key
  12  undecodable input (key file, ballot bytes)
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
from enum import IntEnum
from pathlib import Path

from . import bench as benchmod
from .election import commit_manager, fresh_submitter, reveal, setup_election, vote
from .errors import (
    ChainError,
    ConfigError,
    DecodeError,
    EscrowError,
    MissingReveal,
    PhaseError,
    RingError,
    RosterError,
    VotingError,
)
from .escrow import combine_secret, settle_deposits
from .group import GroupPoint, KeyPair, Scalar, keygen
from .ledger import ElectionConfig, Ledger, PayloadMode, PayloadStore, Phase, advance_phase
from .tally import TallyReport, tally, verify_report

KEY_HEADER = "# anonvote secret key v1"


class Exit(IntEnum):
    OK = 0
    FAILURE = 1
    USAGE = 2
    CONFIG = 3
    EXISTS = 4
    PHASE = 5
    NOT_IN_ROSTER = 6
    MISSING_REVEAL = 7
    ESCROW = 8
    REPORT_MISMATCH = 9
    LEDGER_CORRUPT = 10
    SUBMITTER = 11
    DECODE = 12


class CliFailure(Exception):
    def __init__(self, code: Exit, message: str):
        self.code = code
        super().__init__(message)


# --- helpers ---------------------------------------------------------------

def write_key(path: Path, secret: Scalar, label: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(f"{KEY_HEADER} ({label})\n{secret.hex()}\n", encoding="utf-8")
    path.chmod(0o600)


def read_key(path: Path) -> KeyPair:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliFailure(Exit.CONFIG, f"cannot read key file: {exc}") from None
    body = [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith(KEY_HEADER) or len(body) != 1:
        raise DecodeError(f"{path} is not an anonvote key file")
    return KeyPair.from_secret(Scalar.from_hex(body[0]))


def key_fingerprint(point) -> str:
    return hashlib.sha256(point.encoded).hexdigest()[:32]


def make_rng(seed: str | None, *context) -> random.Random:
    """Reproducible per-invocation rng when seeded, system entropy otherwise.

    Seeded rngs are for demos and tests only.
    """
    if seed is None:
        return random.SystemRandom()
    material = "|".join([seed, *map(str, context)]).encode()
    return random.Random(int.from_bytes(hashlib.sha256(material).digest(), "big"))


def load_ledger(args) -> Ledger:
    path = Path(args.ledger)
    if not path.exists():
        raise CliFailure(Exit.CONFIG, f"no ledger at {path}; run setup first")
    return Ledger.load(path)


def open_store(args) -> PayloadStore:
    return PayloadStore(args.store)


def manager_key_path(args, manager_id: str) -> Path:
    return Path(args.keys_dir) / f"manager-{manager_id}.key"


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _sizes(text: str) -> list[int]:
    try:
        return [int(t) for t in _split(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


# --- subcommands -----------------------------------------------------------

def cmd_setup(args) -> int:
    ledger_path = Path(args.ledger)
    if ledger_path.exists():
        raise CliFailure(Exit.EXISTS, f"{ledger_path} already exists; refusing to overwrite")
    rng = make_rng(args.seed, "setup")
    keys_dir = Path(args.keys_dir)
    if args.roster:
        roster = [GroupPoint.from_hex(ln.strip()) for ln in Path(args.roster).read_text().splitlines() if ln.strip()]
        voter_keys = []
    else:
        if args.voters < 1:
            raise ConfigError("need at least one voter")
        voter_keys = [keygen(rng) for _ in range(args.voters)]
        roster = [k.public for k in voter_keys]
    config = ElectionConfig(
        election_id=args.election_id,
        candidates=_split(args.candidates),
        managers=_split(args.managers),
        roster=tuple(roster),
        min_ring_size=args.min_ring_size,
        payload_mode=PayloadMode(args.payload_mode),
        deposit_amount=args.deposit,
        tx_cost_factor=args.tx_cost_factor,
    )
    config.validate()

    secrets_by_manager = {}
    if not args.defer_escrow:
        for m in config.managers:
            path = manager_key_path(args, m)
            if path.exists():
                secrets_by_manager[m] = read_key(path).secret
            else:
                secrets_by_manager[m] = Scalar.random(rng, nonzero=True)
                write_key(path, secrets_by_manager[m], f"manager {m}")
    ledger = setup_election(config, secrets_by_manager)
    for i, k in enumerate(voter_keys):
        write_key(keys_dir / f"voter-{i:03d}.key", k.secret, f"voter {i}")
    ledger.save(ledger_path)
    print(f"ledger {ledger_path}: {len(ledger)} entries, phase {ledger.phase.value}")
    if voter_keys:
        print(f"wrote {len(voter_keys)} voter keys to {keys_dir}/")
    return Exit.OK


def cmd_register_manager(args) -> int:
    path = manager_key_path(args, args.id)
    if path.exists():
        kp = read_key(path)
    else:
        kp = keygen(make_rng(args.seed, "register-manager", args.id))
        write_key(path, kp.secret, f"manager {args.id}")
    print(f"manager {args.id}: share point {kp.public.hex()} ({path})")
    return Exit.OK


def cmd_commit(args) -> int:
    ledger = load_ledger(args)
    kp = read_key(Path(args.key) if args.key else manager_key_path(args, args.manager))
    commit_manager(ledger, args.manager, kp.secret)
    ledger.save(args.ledger)
    print(f"manager {args.manager} committed; chain length {len(ledger.state.escrow.running_products)}")
    return Exit.OK


def cmd_advance_phase(args) -> int:
    ledger = load_ledger(args)
    advance_phase(ledger, args.authority)
    ledger.save(args.ledger)
    print(f"phase is now {ledger.phase.value}")
    return Exit.OK


def cmd_vote(args) -> int:
    ledger = load_ledger(args)
    kp = read_key(Path(args.key))
    state = ledger.state
    if kp.public not in state.roster:
        raise RosterError("voter key is not on the roster")
    linked = {p.hex() for p in state.roster} | {key_fingerprint(p) for p in state.roster}
    if args.submitter is not None and args.submitter in linked:
        raise CliFailure(Exit.SUBMITTER, "submitter id matches a roster key; use a fresh account")
    cfg = state.full_config
    if args.ring_size < cfg.min_ring_size:
        print(
            f"warning: ring size {args.ring_size} is below the election minimum {cfg.min_ring_size}; "
            "this ballot will be rejected at tally",
            file=sys.stderr,
        )
    rng = make_rng(args.seed, "vote", ledger.head_hash.hex(), kp.public.hex())
    submitter = args.submitter or fresh_submitter(rng)
    entry = vote(ledger, open_store(args), kp, args.candidate, args.ring_size, rng, submitter=submitter)
    ledger.save(args.ledger)
    print(entry.index)
    return Exit.OK


def cmd_reveal(args) -> int:
    ledger = load_ledger(args)
    kp = read_key(Path(args.key) if args.key else manager_key_path(args, args.manager))
    reveal(ledger, args.manager, kp.secret)
    ledger.save(args.ledger)
    missing = ledger.state.escrow.missing_reveals()
    print(f"manager {args.manager} revealed; still waiting on: {', '.join(missing) or 'nobody'}")
    return Exit.OK


def _combined_secret(ledger: Ledger) -> Scalar:
    try:
        return combine_secret(ledger.state.escrow)
    except MissingReveal as exc:
        settlement = settle_deposits(ledger.state.escrow)
        for m in exc.missing:
            print(f"manager {m} did not reveal; deposit {settlement.forfeited.get(m, 0)} forfeited", file=sys.stderr)
        raise


def cmd_tally(args) -> int:
    ledger = load_ledger(args)
    if ledger.phase is not Phase.TALLY:
        raise PhaseError("voting has not been closed")
    secret = _combined_secret(ledger)
    report = tally(ledger, open_store(args), secret, workers=args.workers)
    Path(args.report).write_text(report.dumps(), encoding="utf-8")
    settlement = settle_deposits(ledger.state.escrow)
    for name, n in report.counts.items():
        print(f"{name}\t{n}")
    print(
        f"accepted {len(report.accepted)}, rejected {len(report.rejected)}; "
        f"deposits refunded {sum(settlement.refunded.values())}, forfeited {sum(settlement.forfeited.values())}"
    )
    return Exit.OK


def cmd_verify_report(args) -> int:
    ledger = load_ledger(args)
    secret = _combined_secret(ledger)
    text = Path(args.report).read_text(encoding="utf-8")
    TallyReport.loads(text)  # reject files that are not reports at all
    if verify_report(ledger, open_store(args), secret, text):
        print("report matches the ledger")
        return Exit.OK
    print("report does NOT match the ledger", file=sys.stderr)
    return Exit.REPORT_MISMATCH


def cmd_bench(args) -> int:
    rows = benchmod.bench_ring(args.sizes, args.reps, args.warmup, make_rng(args.seed or "bench", "bench"))
    table = benchmod.to_delimited(benchmod.timing_dicts(rows))
    print(table, end="")
    if len(rows) >= 2:
        fit = benchmod.linear_fit([r.ring_size for r in rows], [r.sign_mean_ms for r in rows])
        print(f"# sign time ~ {fit.slope:.4f} ms/member + {fit.intercept:.4f} ms, R^2 = {fit.r_squared:.4f}")
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    return Exit.OK


def cmd_cost(args) -> int:
    rows = benchmod.cost_table(args.sizes, args.modes, make_rng(args.seed or "cost", "cost"))
    table = benchmod.to_delimited(rows)
    print(table, end="")
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    return Exit.OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="anonvote",
        description="Anonymous self-tallying elections on a simulated bulletin board.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--ledger", default="election.ledger", help="ledger file (default: %(default)s)")
    p.add_argument("--store", default="election.store", help="payload store directory (default: %(default)s)")
    p.add_argument("--keys-dir", default="keys", help="where key files live (default: %(default)s)")
    p.add_argument("--seed", help="make randomness reproducible (demos and tests only)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", help="create the ledger: config, roster, escrow commitments")
    s.add_argument("--election-id", required=True)
    s.add_argument("--candidates", required=True, help="comma-separated names")
    s.add_argument("--managers", default="m1,m2", help="comma-separated key manager ids")
    group = s.add_mutually_exclusive_group()
    group.add_argument("--voters", type=int, default=5, help="generate this many voter keys")
    group.add_argument("--roster", help="file of hex public keys, one per line")
    s.add_argument("--min-ring-size", type=int, default=2)
    s.add_argument("--payload-mode", choices=[m.value for m in PayloadMode], default="inline")
    s.add_argument("--deposit", type=int, default=1)
    s.add_argument("--tx-cost-factor", type=int, default=10)
    s.add_argument("--defer-escrow", action="store_true", help="leave commitments to the commit subcommand")
    s.set_defaults(func=cmd_setup)

    s = sub.add_parser("register-manager", help="create a key manager's secret key file")
    s.add_argument("--id", required=True)
    s.set_defaults(func=cmd_register_manager)

    s = sub.add_parser("commit", help="publish a manager commitment and product step")
    s.add_argument("--manager", required=True)
    s.add_argument("--key", help="manager key file (default: keys-dir/manager-<id>.key)")
    s.set_defaults(func=cmd_commit)

    s = sub.add_parser("advance-phase", help="setup -> voting -> tally")
    s.add_argument("--authority", default="authority")
    s.set_defaults(func=cmd_advance_phase)

    s = sub.add_parser("vote", help="cast a ring-signed stealth ballot")
    s.add_argument("--key", required=True, help="voter key file")
    s.add_argument("--candidate", required=True)
    s.add_argument("--ring-size", type=int, default=2)
    s.add_argument("--submitter", help="account id to submit from (default: fresh random)")
    s.set_defaults(func=cmd_vote)

    s = sub.add_parser("reveal", help="open a manager's escrow share")
    s.add_argument("--manager", required=True)
    s.add_argument("--key")
    s.set_defaults(func=cmd_reveal)

    s = sub.add_parser("tally", help="count the ballots and write the report")
    s.add_argument("--report", default="election.report.json")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_tally)

    s = sub.add_parser("verify-report", help="recount and compare against a report file")
    s.add_argument("--report", default="election.report.json")
    s.set_defaults(func=cmd_verify_report)

    s = sub.add_parser("bench", help="ballot sign/verify time vs ring size")
    s.add_argument("--sizes", type=_sizes, default=[2, 4, 8, 16, 32, 64])
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--warmup", type=int, default=1)
    s.add_argument("--out", help="also write the table here")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("cost", help="ledger bytes per ballot vs ring size and payload mode")
    s.add_argument("--sizes", type=_sizes, default=[2, 8, 32])
    s.add_argument("--modes", type=_split, default=[m.value for m in PayloadMode])
    s.add_argument("--out")
    s.set_defaults(func=cmd_cost)
    return p


_ERROR_CODES = [
    (MissingReveal, Exit.MISSING_REVEAL),
    (PhaseError, Exit.PHASE),
    (RosterError, Exit.NOT_IN_ROSTER),
    (ChainError, Exit.LEDGER_CORRUPT),
    (EscrowError, Exit.ESCROW),
    (ConfigError, Exit.CONFIG),
    (RingError, Exit.CONFIG),
    (DecodeError, Exit.DECODE),
]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exc.code)
    except VotingError as exc:
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                print(f"error: {exc}", file=sys.stderr)
                return int(code)
        print(f"error: {exc}", file=sys.stderr)
        return int(Exit.FAILURE)


if __name__ == "__main__":
    sys.exit(main())
