"""Tests for the exhaustive domain-wall oracle, the below-bound breaking search and majority-vote decoding."""

from fractions import Fraction

import numpy as np
import pytest

from bounds import certify_tightness, choi1_bound, tight_bound
from embedding import build_embedded, distribute_fields
from errors import SizeCapError
from ising import SpinConfig
from oracle import (find_domain_wall, isolated_chain, majority_vote_batch, majority_vote_decode, probe_tightness,
                    strengths_above, verify_no_domain_wall)
from tests.factories import small_embedded_instance


def choi2_dist(bundle):
    return distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "choi2")


class TestVerify:
    def test_star3_passes_just_above_tight(self, star3):
        dist = choi2_dist(star3)
        tight, _ = tight_bound(star3.problem, star3.hardware, star3.embedding, dist, 0)
        check = verify_no_domain_wall(star3.problem, star3.hardware, star3.embedding, dist,
                                      [tight + Fraction(1, 64), 0, 0, 0])
        assert check.passed
        assert check.energies_match
        assert check.logical_minimum == -18
        assert check.domain_wall is None

    def test_zero_strength_leaves_a_free_centre(self, star3):
        dist = choi2_dist(star3)
        check = verify_no_domain_wall(star3.problem, star3.hardware, star3.embedding, dist, 0)
        assert not check.passed
        assert check.domain_wall.qubit == 0

    def test_size_cap(self, star3):
        dist = choi2_dist(star3)
        with pytest.raises(SizeCapError):
            verify_no_domain_wall(star3.problem, star3.hardware, star3.embedding, dist, 7, max_physical=6)

    def test_strengths_above(self):
        assert strengths_above({0: Fraction(6), 1: Fraction(0)}, "1/8") == {0: Fraction(49, 8), 1: Fraction(1, 8)}


class TestBreakingSearch:
    def test_isolated_chain_layout(self, star3):
        sub, neighbors = isolated_chain(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 0, 6)
        assert neighbors == [1, 2, 3]
        assert sub.num_qubits == 7
        assert sub.local_fields[:4] == (0, 1, 1, 1)
        assert (0, 1, Fraction(-6)) in sub.couplers
        assert (1, 4, Fraction(5)) in sub.couplers

    def test_star3_breaks_just_below_tight(self, star3):
        dist = choi2_dist(star3)
        _, witness = tight_bound(star3.problem, star3.hardware, star3.embedding, dist, 0)
        result = probe_tightness(star3.problem, star3.hardware, star3.embedding, dist, 0, witness, Fraction(1, 100))
        assert result.found
        assert result.chain_strength == Fraction(599, 100)
        assert len(result.chain_config) == 4
        assert len(set(result.chain_config)) == 2

    def test_choi1_strength_never_breaks(self, star3):
        dist = choi2_dist(star3)
        _, witness = tight_bound(star3.problem, star3.hardware, star3.embedding, dist, 0)
        result = probe_tightness(star3.problem, star3.hardware, star3.embedding, dist, 0, witness, Fraction(1, 100),
                                 strength=choi1_bound(star3.problem, 0))
        assert not result.found
        assert result.assignments_checked == 8

    def test_uncertified_witness_has_no_breaking_pattern(self, unsplittable_chain):
        bundle = unsplittable_chain
        dist = distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "uniform")
        _, witness = tight_bound(bundle.problem, bundle.hardware, bundle.embedding, dist, 0)
        assert not certify_tightness(bundle.problem, bundle.embedding, dist, 0, witness)
        for epsilon in (Fraction(1, 64), Fraction(4)):
            result = probe_tightness(bundle.problem, bundle.hardware, bundle.embedding, dist, 0, witness, epsilon)
            assert not result.found
            assert result.assignments_checked == 2

    def test_single_node_chain_is_vacuous(self, star3):
        result = probe_tightness(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 1, None,
                                 Fraction(1, 64))
        assert not result.found


class TestSandwich:
    @pytest.mark.parametrize("epsilon", [Fraction(1, 64), Fraction(1, 8), Fraction(1)])
    def test_tight_bound_separates_verify_and_breaking_search(self, epsilon):
        rng = np.random.default_rng(314159)
        searched = 0
        for _ in range(200):
            bundle = small_embedded_instance(rng)
            problem, hw, emb = bundle.problem, bundle.hardware, bundle.embedding
            dist = distribute_fields(problem, hw, emb, "uniform")

            bounds = {i: tight_bound(problem, hw, emb, dist, i) for i in range(problem.num_qubits)}
            strengths = [bounds[i][0] + epsilon for i in range(problem.num_qubits)]
            assert verify_no_domain_wall(problem, hw, emb, dist, strengths).passed

            for i, (value, witness) in bounds.items():
                if witness is None or value <= epsilon:
                    continue
                if not certify_tightness(problem, emb, dist, i, witness):
                    continue
                result = probe_tightness(problem, hw, emb, dist, i, witness, epsilon)
                assert result.found, f"qubit {i} of {problem.to_dict()} on {emb.to_dict()}"
                searched += 1
        assert searched > 0


class TestMajorityVote:
    def test_broken_and_tied_chains(self, star3):
        dist = choi2_dist(star3)
        embedded = build_embedded(star3.problem, star3.hardware, star3.embedding, dist, -1)
        config = SpinConfig((1, 1, -1, 1, -1, 1, 1))
        vote = majority_vote_decode(config, embedded)
        assert vote.spins == (1, -1, 1, 1)
        assert vote.broken == (True, False, False, False)
        assert vote.tied == (False, False, False, False)
        assert vote.any_broken

    def test_tie_goes_to_plus_one(self, capped_instance):
        bundle = capped_instance
        dist = distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "uniform")
        embedded = build_embedded(bundle.problem, bundle.hardware, bundle.embedding, dist, -1)
        vote = majority_vote_decode(SpinConfig((-1, 1, 1, 1, 1)), embedded)
        assert vote.spins[0] == 1
        assert vote.tied[0]
        assert vote.broken[0]
        assert vote.to_dict() == {"spins": [1, 1, 1, 1], "broken": [0], "tied": [0]}

    def test_batch_agrees_with_single_decode(self, star3):
        dist = choi2_dist(star3)
        embedded = build_embedded(star3.problem, star3.hardware, star3.embedding, dist, -1)
        rng = np.random.default_rng(5)
        samples = rng.choice([-1, 1], size=(32, 7))
        logical, broken = majority_vote_batch(samples, embedded)
        for row, spins, flag in zip(samples, logical, broken):
            vote = majority_vote_decode(SpinConfig(tuple(int(s) for s in row)), embedded)
            assert tuple(int(s) for s in spins) == vote.spins
            assert bool(flag) == vote.any_broken

    def test_aligned_config_has_no_wall(self, star3):
        dist = choi2_dist(star3)
        embedded = build_embedded(star3.problem, star3.hardware, star3.embedding, dist, -1)
        assert find_domain_wall(embedded, embedded.lift(SpinConfig((1, -1, 1, 1)))) is None
