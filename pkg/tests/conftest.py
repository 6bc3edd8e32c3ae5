"""Shared helpers: deterministic randomness for frozen-value tests."""

import random

import pytest

from auctionlab.groups import SMALL_GROUP


class FixedNonce(random.Random):
    """Returns scripted values from randrange, in order, then repeats the
    last one.  Lets a test pin a prover's nonce and freeze the transcript."""

    def __init__(self, *values):
        super().__init__(0)
        self._values = list(values)
        self._pos = 0

    def randrange(self, *args, **kwargs):
        value = self._values[min(self._pos, len(self._values) - 1)]
        self._pos += 1
        return value


@pytest.fixture
def small():
    return SMALL_GROUP


def fixed_challenge(c):
    """Challenge source that ignores the statement and always answers c."""
    return lambda stmt, commitments: c
