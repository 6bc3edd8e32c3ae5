"""Turning decrypted outcome exponents back into everyone's bids.

The outcome stage of the auction evaluates, in the exponent, a linear map
over the concatenated 0/1 bid vectors of all n bidders (k prices each).  The
map's nk x nk matrix has a rigid block layout:

* diagonal blocks: ones everywhere except the diagonal,
* blocks right of the diagonal: strictly upper-triangular ones,
* blocks left of the diagonal: upper-triangular ones including the diagonal.

Equivalently, entry l[i][j] of the image counts: all bids at prices above j,
bidder i's own bid at prices below j, and bids exactly at j by bidders
ranked before i.  A cell with count zero is the winning cell.

That structure makes the map injective on valid bid vectors and invertible
by a single backward sweep over price levels (highest first) with running
prefix sums.  The sweep is instrumented: every scalar addition on vector
entries is counted, and the count grows linearly in nk, far inside the
quadratic budget the naive cell-by-cell summation would spend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentExponents, InvalidBidVector, NotAPower
from .groups import GroupParams


@dataclass(frozen=True)
class StructuredMatrix:
    """The nk x nk outcome map for n bidders and k prices."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("need at least one bidder and one price")

    @property
    def size(self) -> int:
        return self.n * self.k

    def entry(self, row: int, col: int) -> int:
        """Matrix entry at 0-based (row, col), from the block layout."""
        bi, pj = divmod(row, self.k)   # block row: bidder i, price j
        bh, pd = divmod(col, self.k)   # block col: bidder h, price d
        if bi == bh:
            return 1 if pd != pj else 0          # others' prices in own block
        if bh > bi:
            return 1 if pd > pj else 0           # strictly above the diagonal
        return 1 if pd >= pj else 0              # at or above the diagonal

    def dense(self) -> np.ndarray:
        """Materialized matrix; intended for desk-scale checking only."""
        size = self.size
        out = np.zeros((size, size), dtype=np.int64)
        for row in range(size):
            for col in range(size):
                out[row, col] = self.entry(row, col)
        return out


def build_matrix(n: int, k: int) -> StructuredMatrix:
    return StructuredMatrix(n=n, k=k)


def validate_bid_vector(b, n: int, k: int) -> None:
    """b must be length nk, entries 0/1, exactly one 1 per bidder block."""
    if len(b) != n * k:
        raise InvalidBidVector(f"length {len(b)} != n*k = {n * k}")
    for v in b:
        if v not in (0, 1):
            raise InvalidBidVector(f"entry {v!r} is not 0/1")
    for i in range(n):
        block = b[i * k:(i + 1) * k]
        if sum(block) != 1:
            raise InvalidBidVector(f"bidder {i + 1} block sums to {sum(block)}, not 1")


def apply_f(matrix: StructuredMatrix, b) -> list[int]:
    """Image of a valid bid vector under the outcome map, via the counting
    form with cumulative sums (no dense materialization)."""
    n, k = matrix.n, matrix.k
    validate_bid_vector(b, n, k)
    grid = np.asarray(b, dtype=np.int64).reshape(n, k)

    col_totals = grid.sum(axis=0)                      # bids per price
    above = np.concatenate([np.cumsum(col_totals[::-1])[::-1][1:], [0]])
    own_below = np.concatenate([np.zeros((n, 1), dtype=np.int64),
                                np.cumsum(grid, axis=1)[:, :-1]], axis=1)
    ranked_before = np.concatenate([np.zeros((1, k), dtype=np.int64),
                                    np.cumsum(grid, axis=0)[:-1, :]], axis=0)

    image = above[np.newaxis, :] + own_below + ranked_before
    return [int(v) for v in image.reshape(-1)]


@dataclass(frozen=True)
class RecoveredBids:
    """Solver output: the 0/1 vector, per-bidder prices, and the work done."""

    b: tuple[int, ...]
    n: int
    k: int
    additions: int

    def prices(self) -> list[int]:
        """1-based price per bidder."""
        out = []
        for i in range(self.n):
            block = self.b[i * self.k:(i + 1) * self.k]
            out.append(block.index(1) + 1)
        return out


def recover_bids(image, n: int, k: int) -> RecoveredBids:
    """Invert the outcome map by back-substitution, highest price first.

    Within a price level, bidder r's entry needs the entries of lower-ranked
    bidders at the same level plus everything at higher levels except bidder
    r's own; both are maintained as running sums, so each cell costs O(1)
    additions.  Raises InconsistentExponents if the image was not produced
    by a valid bid vector.
    """
    if len(image) != n * k:
        raise InconsistentExponents(f"length {len(image)} != n*k = {n * k}")
    l = [list(image[i * k:(i + 1) * k]) for i in range(n)]
    x = [[0] * k for _ in range(n)]
    adds = 0

    row_suffix = [0] * n     # per bidder: sum of x at prices above the current one
    total_suffix = 0         # sum of x at prices above the current one, all bidders

    for t in range(k - 1, -1, -1):
        prefix = 0           # sum of x at price t for bidders ranked before r
        for r in range(n):
            val = 1 - l[r][t]
            adds += 1
            if r > 0:
                val += prefix
                adds += 1
            if t < k - 1:
                val += total_suffix - row_suffix[r]
                adds += 2
            if val not in (0, 1):
                raise InconsistentExponents(
                    f"cell ({r + 1},{t + 1}) solves to {val}, not 0/1")
            x[r][t] = val
            prefix += val
            adds += 1
        for r in range(n):
            row_suffix[r] += x[r][t]
            adds += 1
        total_suffix += prefix
        adds += 1

    flat = tuple(v for row in x for v in row)
    for i in range(n):
        if sum(flat[i * k:(i + 1) * k]) != 1:
            raise InconsistentExponents(f"bidder {i + 1} block is not one-hot")
    return RecoveredBids(b=flat, n=n, k=k, additions=adds)


def count_operations(n: int, k: int) -> int:
    """Instrumented addition count of the solver on a worst-case image."""
    matrix = build_matrix(n, k)
    bids = [k - (i % k) for i in range(n)]            # spread over all prices
    b = [0] * (n * k)
    for i, price in enumerate(bids):
        b[i * k + price - 1] = 1
    image = apply_f(matrix, b)
    result = recover_bids(image, n, k)
    if list(result.b) != b:
        raise InconsistentExponents("round-trip mismatch while counting")
    return result.additions


def exponent_from_power(params: GroupParams, value: int, marker: int,
                        limit: int) -> int:
    """Find e in 0..limit with marker^e = value, else raise NotAPower."""
    acc = 1
    for e in range(limit + 1):
        if acc == value:
            return e
        acc = acc * marker % params.p
    raise NotAPower(f"{value} is not marker^e for e in 0..{limit}")
