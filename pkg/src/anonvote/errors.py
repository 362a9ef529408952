"""Exception hierarchy shared by every layer of the voting stack."""


class VotingError(Exception):
    """Base class for all errors raised by anonvote."""


class DecodeError(VotingError, ValueError):
    """Bytes do not decode to a well-formed object."""


class RingError(VotingError, ValueError):
    """Ring signing or verification was called with inconsistent inputs."""


class EscrowError(VotingError):
    pass


class ProofError(EscrowError):
    pass


class RevealMismatch(EscrowError):
    """A revealed secret does not open the manager's commitment."""


class DuplicateReveal(EscrowError):
    pass


class UnknownManager(EscrowError):
    pass


class MissingReveal(EscrowError):
    """The election secret cannot be rebuilt because managers withheld shares."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing reveals from: " + ", ".join(self.missing))


class LedgerError(VotingError):
    pass


class PhaseError(VotingError):
    """An operation was attempted in a phase that does not admit it."""


class FramingError(LedgerError, DecodeError):
    """A ledger payload does not have the framing its entry type requires."""


class ChainError(LedgerError):
    """Hash-chain validation failed."""

    def __init__(self, index, message):
        self.index = index
        super().__init__(f"entry {index}: {message}")


class ConfigError(VotingError, ValueError):
    pass


class TallyError(VotingError):
    pass


class RosterError(VotingError):
    """A key that must be on the roster is not."""
