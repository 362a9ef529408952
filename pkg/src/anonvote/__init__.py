"""Anonymous self-tallying elections: linkable ring signatures, stealth
ballots, escrowed election keys and a simulated bulletin board."""

from .errors import VotingError
from .group import G, L, GroupPoint, KeyPair, Scalar, encode_candidate, hash_to_point, hash_to_scalar, keygen
from .ledger import ElectionConfig, EntryType, Ledger, PayloadMode, PayloadStore, Phase, advance_phase, submit_ballot
from .ring import Ring, RingSignature, key_image, ring_sign, ring_verify
from .stealth import Ballot, SignedBallot, cast, make_ballot, match_ballot
from .tally import TallyReport, tally, verify_report

__version__ = "0.1.0"
