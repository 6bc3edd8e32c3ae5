"""Three-move proofs of exponent knowledge and equality, plus their
non-interactive hashed form.

Supported statements:

* knowledge of x with g^x = v (single generator);
* one common exponent across several generator/target pairs;
* a ciphertext encrypts 1 or the price marker (an OR of two equality
  statements, composed by simulating the false branch);
* a ciphertext vector encrypts exactly one marker (equality on aggregates).

Interactive runs are deliberately unhardened: the verifier's challenge is
whatever the caller's challenge source supplies, and an honest prover will
happily open fresh sessions for the same statement.  That is the behaviour
the relay attacks in :mod:`auctionlab.attacks` exploit.  The hashed variant
derives the challenge from a canonical serialization of the statement and
commitment, which removes the verifier from the loop entirely.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import AlreadyCommitted, NotCommitted, WitnessMismatch
from .elgamal import Ciphertext
from .groups import GroupParams

CHALLENGE_HASH = "sha256"

# A challenge source maps (statement, flat commitment tuple) to a scalar.
ChallengeSource = Callable[[object, tuple[int, ...]], int]


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PDLStatement:
    """Knowledge of x with g^x = v."""

    g: int
    v: int


@dataclass(frozen=True)
class EQDLStatement:
    """One exponent x with gens[i]^x = targets[i] for every i."""

    gens: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        if len(self.gens) != len(self.targets) or not self.gens:
            raise ValueError("generator and target vectors must match and be non-empty")


@dataclass(frozen=True)
class BidValidityStatement:
    """(alpha, beta) encrypts 1 or the marker under joint key y."""

    y: int
    g: int
    marker: int
    alpha: int
    beta: int


@dataclass(frozen=True)
class SumValidityStatement:
    """The componentwise product of the vector encrypts exactly one marker."""

    y: int
    g: int
    marker: int
    alphas: tuple[int, ...]
    betas: tuple[int, ...]


def branch_statements(params: GroupParams, stmt: BidValidityStatement):
    """The two equality statements underneath the OR: plaintext 1 / marker."""
    plain = EQDLStatement(gens=(stmt.g, stmt.y), targets=(stmt.beta, stmt.alpha))
    marked = EQDLStatement(
        gens=(stmt.g, stmt.y),
        targets=(stmt.beta, stmt.alpha * params.inv(stmt.marker) % params.p),
    )
    return plain, marked


def sum_statement_core(params: GroupParams, stmt: SumValidityStatement) -> EQDLStatement:
    """Aggregate form: prod(alpha)/marker = y^R and prod(beta) = g^R."""
    v = params.mul(*stmt.alphas) * params.inv(stmt.marker) % params.p
    w = params.mul(*stmt.betas)
    return EQDLStatement(gens=(stmt.y, stmt.g), targets=(v, w))


# --------------------------------------------------------------------------
# Transcripts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Transcript:
    """One completed three-move run: commitment(s), challenge, response."""

    commitment: tuple[int, ...]
    challenge: int
    response: int
    hash_name: str = CHALLENGE_HASH


@dataclass(frozen=True)
class OrTranscript:
    """Two branch transcripts whose challenges split the outer challenge."""

    branches: tuple[Transcript, Transcript]
    challenge: int
    hash_name: str = CHALLENGE_HASH

    @property
    def commitment(self) -> tuple[int, ...]:
        return self.branches[0].commitment + self.branches[1].commitment


# --------------------------------------------------------------------------
# Canonical serialization and the hashed challenge
# --------------------------------------------------------------------------

_DOMAIN_TAGS = {
    PDLStatement: b"know-dl",
    EQDLStatement: b"same-dl",
    BidValidityStatement: b"bid-cell",
    SumValidityStatement: b"bid-sum",
}


def _statement_elements(stmt) -> list[int]:
    if isinstance(stmt, PDLStatement):
        return [stmt.g, stmt.v]
    if isinstance(stmt, EQDLStatement):
        return [len(stmt.gens), *stmt.gens, *stmt.targets]
    if isinstance(stmt, BidValidityStatement):
        return [stmt.y, stmt.g, stmt.marker, stmt.alpha, stmt.beta]
    if isinstance(stmt, SumValidityStatement):
        return [len(stmt.alphas), stmt.y, stmt.g, stmt.marker, *stmt.alphas, *stmt.betas]
    raise TypeError(f"unknown statement type: {type(stmt).__name__}")


def serialize_statement(params: GroupParams, stmt, commitments: Iterable[int]) -> bytes:
    """Domain tag, then p, q, g, statement elements and commitments, each as
    fixed-width big-endian bytes with a length prefix."""
    width = (params.p.bit_length() + 7) // 8
    parts = [_DOMAIN_TAGS[type(stmt)]]
    for v in (params.p, params.q, params.g, *_statement_elements(stmt), *commitments):
        enc = int(v).to_bytes(width, "big")
        parts.append(len(enc).to_bytes(4, "big"))
        parts.append(enc)
    return b"".join(parts)


def fiat_shamir_challenge(params: GroupParams, stmt, commitments: Iterable[int]) -> int:
    data = serialize_statement(params, stmt, commitments)
    digest = hashlib.new(CHALLENGE_HASH, data).digest()
    return int.from_bytes(digest, "big") % params.q


def fiat_shamir_source(params: GroupParams) -> ChallengeSource:
    return lambda stmt, com: fiat_shamir_challenge(params, stmt, com)


def verifier_source(params: GroupParams, rng: random.Random) -> ChallengeSource:
    """An interactive verifier: uniformly random challenge, statement ignored."""
    return lambda stmt, com: rng.randrange(params.q)


# --------------------------------------------------------------------------
# Interactive prover sessions (single generator and equality statements)
# --------------------------------------------------------------------------

class ProverSession:
    """One-shot commit/respond state machine for a knowledge or equality
    statement.  Reuse is refused; open a new session to prove again."""

    def __init__(self, params: GroupParams, stmt, witness: int):
        if not isinstance(stmt, (PDLStatement, EQDLStatement)):
            raise TypeError("sessions cover single-exponent statements only")
        self.params = params
        self.stmt = stmt
        self.witness = witness % params.q
        self.nonce: int | None = None
        self.phase = "created"

    def _gens(self) -> tuple[int, ...]:
        if isinstance(self.stmt, PDLStatement):
            return (self.stmt.g,)
        return self.stmt.gens

    def commit(self, rng: random.Random) -> tuple[int, ...]:
        if self.phase != "created":
            raise AlreadyCommitted("session already produced its commitment")
        self.nonce = rng.randrange(self.params.q)
        self.phase = "committed"
        return tuple(self.params.exp(gen, self.nonce) for gen in self._gens())

    def respond(self, challenge: int) -> int:
        if self.phase != "committed":
            raise NotCommitted("no live commitment to answer")
        self.phase = "responded"
        return (self.nonce + challenge * self.witness) % self.params.q


def prove_pdl(params: GroupParams, stmt: PDLStatement, witness: int,
              rng: random.Random, challenge_source: ChallengeSource) -> Transcript:
    """Full three-move run for a knowledge statement."""
    session = ProverSession(params, stmt, witness)
    com = session.commit(rng)
    c = challenge_source(stmt, com) % params.q
    return Transcript(commitment=com, challenge=c, response=session.respond(c))


def verify_pdl(params: GroupParams, stmt: PDLStatement, tr: Transcript) -> bool:
    (z,) = tr.commitment
    lhs = params.exp(stmt.g, tr.response)
    rhs = z * params.exp(stmt.v, tr.challenge) % params.p
    return lhs == rhs


def eqdl_run(params: GroupParams, stmt: EQDLStatement, witness: int,
             rng: random.Random, challenge_source: ChallengeSource) -> Transcript:
    """Full three-move run for an equality statement."""
    session = ProverSession(params, stmt, witness)
    com = session.commit(rng)
    c = challenge_source(stmt, com) % params.q
    return Transcript(commitment=com, challenge=c, response=session.respond(c))


def verify_eqdl(params: GroupParams, stmt: EQDLStatement, tr: Transcript) -> bool:
    if len(tr.commitment) != len(stmt.gens):
        return False
    for gen, target, com in zip(stmt.gens, stmt.targets, tr.commitment):
        lhs = params.exp(gen, tr.response)
        rhs = com * params.exp(target, tr.challenge) % params.p
        if lhs != rhs:
            return False
    return True


# --------------------------------------------------------------------------
# OR composition for bid cells
# --------------------------------------------------------------------------

def _simulate_eqdl(params: GroupParams, stmt: EQDLStatement,
                   rng: random.Random) -> Transcript:
    """Accepting transcript with no witness: pick challenge and response first,
    then solve for the commitment."""
    c = rng.randrange(params.q)
    s = rng.randrange(params.q)
    com = tuple(
        params.exp(gen, s) * params.exp(target, -c) % params.p
        for gen, target in zip(stmt.gens, stmt.targets)
    )
    return Transcript(commitment=com, challenge=c, response=s)


def bid_validity_prove(params: GroupParams, stmt: BidValidityStatement,
                       r: int, is_marker: bool, rng: random.Random,
                       challenge_source: ChallengeSource) -> OrTranscript:
    """Prove the cell encrypts 1 or the marker without revealing which.

    The branch we do not hold a witness for is simulated with a pre-chosen
    sub-challenge; the outer challenge then pins the real branch's share.
    """
    plaintext = stmt.marker if is_marker else 1
    expect_alpha = plaintext * params.exp(stmt.y, r) % params.p
    expect_beta = params.exp(stmt.g, r)
    if (expect_alpha, expect_beta) != (stmt.alpha, stmt.beta):
        raise WitnessMismatch("ciphertext does not open to the claimed plaintext")

    plain_stmt, marked_stmt = branch_statements(params, stmt)
    real_idx = 1 if is_marker else 0
    sim_stmt = plain_stmt if is_marker else marked_stmt

    simulated = _simulate_eqdl(params, sim_stmt, rng)
    real = ProverSession(params, (plain_stmt, marked_stmt)[real_idx], r)
    real_com = real.commit(rng)

    if real_idx == 0:
        flat = real_com + simulated.commitment
    else:
        flat = simulated.commitment + real_com
    c = challenge_source(stmt, flat) % params.q
    c_real = (c - simulated.challenge) % params.q
    real_tr = Transcript(commitment=real_com, challenge=c_real,
                         response=real.respond(c_real))

    branches = (real_tr, simulated) if real_idx == 0 else (simulated, real_tr)
    return OrTranscript(branches=branches, challenge=c)


def bid_validity_verify(params: GroupParams, stmt: BidValidityStatement,
                        tr: OrTranscript) -> bool:
    plain_stmt, marked_stmt = branch_statements(params, stmt)
    b0, b1 = tr.branches
    if (b0.challenge + b1.challenge) % params.q != tr.challenge % params.q:
        return False
    return verify_eqdl(params, plain_stmt, b0) and verify_eqdl(params, marked_stmt, b1)


# --------------------------------------------------------------------------
# Sum validity (exactly one marker across the vector)
# --------------------------------------------------------------------------

def sum_validity_prove(params: GroupParams, stmt: SumValidityStatement,
                       r_sum: int, rng: random.Random,
                       challenge_source: ChallengeSource) -> Transcript:
    """Honest attempt with the prover's known randomiser sum.  If the vector
    does not contain exactly one marker the transcript will not verify."""
    core = sum_statement_core(params, stmt)
    session = ProverSession(params, core, r_sum)
    com = session.commit(rng)
    c = challenge_source(stmt, com) % params.q
    return Transcript(commitment=com, challenge=c, response=session.respond(c))


def sum_validity_verify(params: GroupParams, stmt: SumValidityStatement,
                        tr: Transcript) -> bool:
    return verify_eqdl(params, sum_statement_core(params, stmt), tr)


# --------------------------------------------------------------------------
# Uniform verification entry point
# --------------------------------------------------------------------------

def verify_transcript(params: GroupParams, stmt, tr, require_hashed: bool) -> bool:
    """Check a transcript's algebra; under hashed challenges also check the
    challenge is exactly the canonical hash of statement and commitment."""
    if isinstance(stmt, BidValidityStatement):
        if not isinstance(tr, OrTranscript) or not bid_validity_verify(params, stmt, tr):
            return False
    elif isinstance(stmt, SumValidityStatement):
        if not isinstance(tr, Transcript) or not sum_validity_verify(params, stmt, tr):
            return False
    elif isinstance(stmt, PDLStatement):
        if not isinstance(tr, Transcript) or not verify_pdl(params, stmt, tr):
            return False
    elif isinstance(stmt, EQDLStatement):
        if not isinstance(tr, Transcript) or not verify_eqdl(params, stmt, tr):
            return False
    else:
        raise TypeError(f"unknown statement type: {type(stmt).__name__}")
    if require_hashed:
        expect = fiat_shamir_challenge(params, stmt, tr.commitment)
        if tr.challenge % params.q != expect:
            return False
        if tr.hash_name != CHALLENGE_HASH:
            return False
    return True


# --------------------------------------------------------------------------
# Transcript <-> board payload helpers
# --------------------------------------------------------------------------

def transcript_to_payload(tr) -> dict:
    if isinstance(tr, OrTranscript):
        return {
            "or": [transcript_to_payload(b) for b in tr.branches],
            "chal": tr.challenge,
            "hash": tr.hash_name,
        }
    return {
        "com": list(tr.commitment),
        "chal": tr.challenge,
        "resp": tr.response,
        "hash": tr.hash_name,
    }


def transcript_from_payload(payload: dict):
    if "or" in payload:
        b0, b1 = (transcript_from_payload(b) for b in payload["or"])
        return OrTranscript(branches=(b0, b1), challenge=payload["chal"],
                            hash_name=payload["hash"])
    return Transcript(commitment=tuple(payload["com"]), challenge=payload["chal"],
                      response=payload["resp"], hash_name=payload["hash"])


def make_bid_ciphertext(params: GroupParams, y: int, marker: int,
                        is_marker: bool, r: int) -> Ciphertext:
    """Convenience used by tests and the protocol: encrypt 1 or the marker."""
    from .elgamal import encrypt

    return encrypt(params, marker if is_marker else 1, y, r)
