"""Exception types shared across the laboratory.

Everything raised on purpose derives from :class:`AuctionLabError`, so callers
can catch one base class at the CLI boundary and map it to an exit code.
"""


class AuctionLabError(Exception):
    """Base class for every deliberate failure in this package."""


# ---------------------------------------------------------------- group setup

class NotPrime(AuctionLabError):
    """A modulus or subgroup order failed the primality check."""


class OrderMismatch(AuctionLabError):
    """q does not divide p - 1, so no order-q subgroup exists."""


class BadGenerator(AuctionLabError):
    """The proposed generator is 1 or falls outside the order-q subgroup."""


# ------------------------------------------------------------------ key setup

class EmptyShareList(AuctionLabError):
    """Aggregation was asked to combine zero public key shares."""


class EmptyPartials(AuctionLabError):
    """Joint decryption was asked to combine zero decryption shares."""


# -------------------------------------------------------------- proof machinery

class AlreadyCommitted(AuctionLabError):
    """A one-shot prover session was asked to commit twice."""


class NotCommitted(AuctionLabError):
    """A prover session was asked to respond before committing."""


class WitnessMismatch(AuctionLabError):
    """The supplied witness does not actually satisfy the statement."""


class ProofRejected(AuctionLabError):
    """An honest verifier rejected a proof during a protocol round."""

    def __init__(self, author, round_name: str, detail: str = ""):
        self.author = author
        self.round_name = round_name
        self.detail = detail
        super().__init__(
            f"proof by {author!r} rejected in round {round_name!r}"
            + (f": {detail}" if detail else "")
        )


class ModeMismatch(AuctionLabError):
    """An interactive-only manoeuvre was attempted under non-interactive proofs."""


# ------------------------------------------------------------------- protocol

class PriceOutOfRange(AuctionLabError):
    """A bid names a price index outside 1..k."""


class InvalidBidVector(AuctionLabError):
    """A 0/1 vector is not a well-formed one-hot-per-bidder bid encoding."""


class MissingShares(AuctionLabError):
    """A computation needed contributions that are not on the board yet."""


class RestartRequired(AuctionLabError):
    """A pre-publication sanity check demands a fresh protocol run."""

    def __init__(self, reason: str, cells=None):
        self.reason = reason
        self.cells = list(cells or [])
        super().__init__(reason)


# ------------------------------------------------------------------- recovery

class InconsistentExponents(AuctionLabError):
    """Recovered bid entries are not 0/1 one-hot rows; input was not a true image."""


class NotAPower(AuctionLabError):
    """A group element is not among the tabulated powers of the marker."""


# ------------------------------------------------------------- authentication

class AuthRejected(AuctionLabError):
    """A post failed tag verification against the claimed author's key."""

    def __init__(self, author, round_name: str):
        self.author = author
        self.round_name = round_name
        super().__init__(f"post claiming author {author!r} rejected in round {round_name!r}")


class UnknownAuthor(AuctionLabError):
    """The registry has no key for the named author."""


# ------------------------------------------------------------------------ CLI

class UsageError(AuctionLabError):
    """Bad command line arguments; message names the offending flag."""


class IoError(AuctionLabError):
    """Report or transcript files could not be written."""
