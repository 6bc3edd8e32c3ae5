"""Group parameter validation and modular arithmetic."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from auctionlab.errors import BadGenerator, NotPrime, OrderMismatch
from auctionlab.groups import (
    DEFAULT_MARKER,
    GROUPS_BY_NAME,
    LARGE_GROUP,
    MID_GROUP,
    SMALL_GROUP,
    is_prime,
    validate_group,
)


class TestPrimality:
    def test_small_primes(self):
        for n in (2, 3, 5, 7, 11, 23, 1019, 2039):
            assert is_prime(n)

    def test_small_composites(self):
        for n in (0, 1, 4, 9, 21, 25, 1024, 2047):
            assert not is_prime(n)

    def test_large_group_primes(self):
        assert is_prime(LARGE_GROUP.p)
        assert is_prime(LARGE_GROUP.q)


class TestValidation:
    def test_desk_scale_group(self):
        params = validate_group(23, 11, 2)
        assert (params.p, params.q, params.g) == (23, 11, 2)

    def test_composite_modulus_rejected(self):
        with pytest.raises(NotPrime):
            validate_group(25, 11, 2)

    def test_composite_order_rejected(self):
        with pytest.raises(NotPrime):
            validate_group(23, 12, 2)

    def test_order_must_divide(self):
        # 7 is prime but does not divide 22
        with pytest.raises(OrderMismatch):
            validate_group(23, 7, 2)

    def test_generator_of_wrong_order_rejected(self):
        # 5 has order 22 mod 23, not 11
        with pytest.raises(BadGenerator):
            validate_group(23, 11, 5)

    def test_identity_is_not_a_generator(self):
        with pytest.raises(BadGenerator):
            validate_group(23, 11, 1)

    def test_named_groups_are_valid(self):
        for name, params in GROUPS_BY_NAME.items():
            validate_group(params.p, params.q, params.g)
            marker = DEFAULT_MARKER[name]
            assert params.is_element(marker) and marker != 1


class TestArithmetic:
    def test_exp_oracle(self, small):
        assert small.exp(2, 10) == 12
        assert small.exp(2, 11) == 1

    def test_inverse_oracle(self, small):
        assert small.inv(8) == 3
        assert small.inv(16) == 13

    def test_subgroup_membership(self, small):
        assert small.is_element(4)
        assert not small.is_element(5)
        assert not small.is_element(7)

    def test_subgroup_enumeration(self, small):
        elems = sorted(small.elements())
        assert elems == [1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18]
        assert len(elems) == small.q

    def test_mul_variadic(self, small):
        assert small.mul(8, 9) == 3
        assert small.mul() == 1

    def test_random_scalar_bounds(self, small):
        rng = random.Random(1)
        draws = [small.random_scalar(rng) for _ in range(200)]
        assert all(0 <= d < small.q for d in draws)
        nonzero = [small.random_scalar(rng, nonzero=True) for _ in range(200)]
        assert all(1 <= d < small.q for d in nonzero)


class TestProperties:
    @given(x=st.integers(1, 10), y=st.integers(1, 10))
    @settings(max_examples=50)
    def test_exp_homomorphic(self, x, y):
        g = SMALL_GROUP
        assert g.exp(g.g, x + y) == g.mul(g.exp(g.g, x), g.exp(g.g, y))

    @given(x=st.integers(1, 22))
    @settings(max_examples=50)
    def test_inverse_cancels(self, x):
        g = SMALL_GROUP
        assert g.mul(x, g.inv(x)) == 1

    @given(e=st.integers(0, 3 * 1019))
    @settings(max_examples=50)
    def test_exponent_arithmetic_mod_order(self, e):
        g = MID_GROUP
        assert g.exp(g.g, e) == g.exp(g.g, e % g.q)
