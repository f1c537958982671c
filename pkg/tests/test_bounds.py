"""Tests for the chain strength bound calculators."""

from fractions import Fraction

import numpy as np
import pytest

from bounds import (ChainSubsets, admissibility_profile, best_constant_condition, breaking_threshold, c_value,
                    certify_tightness, check_admissible, choi1_bound, choi2_bound, locally_determinable,
                    minimum_admissible_strength, optimize_all, optimize_distribution, subset_candidates,
                    tight_bound)
from embedding import HardwareGraph, MinorEmbedding, distribute_fields
from errors import SignError, SizeCapError
from ising import IsingProblem
from models import SubsetWitness
from oracle import verify_no_domain_wall
from tests.factories import single_chain_instance, small_embedded_instance


def choi2_dist(bundle):
    return distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "choi2")


class TestClosedForm:
    def test_star3_values(self, star3):
        assert c_value(star3.problem, 0) == 12
        assert choi1_bound(star3.problem, 0) == 18
        assert choi2_bound(star3.problem, star3.hardware, star3.embedding, 0) == 8
        assert not locally_determinable(star3.problem, 0)

    def test_locally_determinable_choi2_is_zero(self):
        problem = IsingProblem(2, (5, 0), ((0, 1, 1),))
        hw = HardwareGraph(3, ((0, 1), (1, 2)))
        emb = MinorEmbedding(((0, 1), (2,)), {(0, 1): (1, 2)})
        assert locally_determinable(problem, 0)
        assert choi2_bound(problem, hw, emb, 0) == 0

    def test_single_node_chain_choi2_is_zero(self, star3):
        assert choi2_bound(star3.problem, star3.hardware, star3.embedding, 1) == 0


class TestChainSubsets:
    def test_count_and_boundaries(self, star3):
        subsets = ChainSubsets.for_qubit(star3.hardware, star3.embedding, 0)
        assert subsets.count == 14
        assert subsets.boundary(0b0001) == 3
        assert subsets.boundary(0b0111) == 1
        assert subsets.nodes(0b0110) == (1, 2)

    def test_blocks_cover_all_masks_in_order(self, star3):
        subsets = ChainSubsets(star3.embedding.chains[0], [(0, 1), (0, 2), (0, 3)], block_size=4)
        masks = np.concatenate([block[0] for block in subsets.blocks()])
        assert masks.tolist() == list(range(1, 15))

    def test_size_cap(self, star3):
        with pytest.raises(SizeCapError):
            ChainSubsets.for_qubit(star3.hardware, star3.embedding, 0, max_chain_size=3)


class TestTightBound:
    def test_star3_tight_bound_and_witness(self, star3):
        value, witness = tight_bound(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 0)
        assert value == 6
        assert witness.subset == (0, 1, 2)
        assert witness.mask == 7
        assert witness.boundary_size == 1
        assert witness.h_sum == 2
        assert witness.j_sum == 10

    @pytest.mark.parametrize("mask, expected", [
        (0b0001, 0),   # centre
        (0b0010, 4),   # one leaf
        (0b0110, 3),   # two leaves
        (0b1110, 0),   # three leaves
        (0b0011, 2),   # centre and one leaf
        (0b0111, 6),   # centre and two leaves
    ])
    def test_star3_case_values(self, star3, mask, expected):
        candidates = subset_candidates(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 0)
        assert candidates[mask - 1].mask == mask
        assert candidates[mask - 1].value == expected

    def test_case_values_are_symmetric(self, star3):
        candidates = subset_candidates(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 0)
        assert sorted({c.value for c in candidates}) == [0, 2, 3, 4, 6]
        assert max(c.value for c in candidates) == 6

    def test_single_node_chain(self, star3):
        value, witness = tight_bound(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 2)
        assert value == 0
        assert witness is None

    def test_float_mode_matches_exact(self, star3):
        problem = star3.problem.to_float()
        dist = distribute_fields(problem, star3.hardware, star3.embedding, "choi2")
        value, witness = tight_bound(problem, star3.hardware, star3.embedding, dist, 0)
        assert value == pytest.approx(6.0)
        assert witness.mask == 7

    def test_ordering_and_scaling_on_random_instances(self):
        rng = np.random.default_rng(20240611)
        for _ in range(500):
            bundle = single_chain_instance(rng)
            hw, emb = bundle.hardware, bundle.embedding
            dist = choi2_dist(bundle)
            tight, _ = tight_bound(bundle.problem, hw, emb, dist, 0)
            choi2 = choi2_bound(bundle.problem, hw, emb, 0)
            choi1 = choi1_bound(bundle.problem, 0)
            assert c_value(bundle.problem, 0) >= 0
            assert tight <= choi2 <= choi1

            for factor in (Fraction(1, 3), Fraction(2), Fraction(7)):
                scaled = bundle.problem.scaled(factor)
                scaled_dist = distribute_fields(scaled, hw, emb, "choi2")
                assert tight_bound(scaled, hw, emb, scaled_dist, 0)[0] == factor * tight
                assert choi2_bound(scaled, hw, emb, 0) == factor * choi2
                assert choi1_bound(scaled, 0) == factor * choi1


class TestCertification:
    def test_star3_witness_is_certified(self, star3):
        dist = choi2_dist(star3)
        _, witness = tight_bound(star3.problem, star3.hardware, star3.embedding, dist, 0)
        assert certify_tightness(star3.problem, star3.embedding, dist, 0, witness)

    def test_missing_witness_is_vacuous(self, star3):
        assert certify_tightness(star3.problem, star3.embedding, choi2_dist(star3), 1, None)

    def test_non_negative_fields_meet_the_condition(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            bundle = single_chain_instance(rng)
            problem = bundle.problem
            if problem.local_fields[0] <= 0:
                continue
            dist = distribute_fields(problem, bundle.hardware, bundle.embedding, "uniform")
            _, witness = tight_bound(problem, bundle.hardware, bundle.embedding, dist, 0)
            assert best_constant_condition(problem, bundle.embedding, dist, 0, witness)

    def test_condition_without_a_breaking_pattern(self, unsplittable_chain):
        bundle = unsplittable_chain
        dist = distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "uniform")
        value, witness = tight_bound(bundle.problem, bundle.hardware, bundle.embedding, dist, 0)
        assert value == 5
        assert witness.subset == (0,)
        assert best_constant_condition(bundle.problem, bundle.embedding, dist, 0, witness)
        assert breaking_threshold(witness.h_sum, witness.j_sum, 10, 1, 1) == -5
        assert not certify_tightness(bundle.problem, bundle.embedding, dist, 0, witness)

    def test_condition_can_fail(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "custom",
                                 custom={0: {0: -6, 1: Fraction(9, 2), 2: Fraction(9, 2), 3: 0},
                                         1: {4: 0}, 2: {5: 0}, 3: {6: 0}})
        witness = SubsetWitness(qubit=0, subset=(1, 2), mask=6, boundary_size=2,
                                h_sum=Fraction(9), j_sum=Fraction(10), value=Fraction(1, 2))
        assert not certify_tightness(star3.problem, star3.embedding, dist, 0, witness)

    def test_mirrored_condition_needs_equal_value(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "custom",
                                 custom={0: {0: -6, 1: 3, 2: 3, 3: 3}, 1: {4: 0}, 2: {5: 0}, 3: {6: 0}})
        candidates = subset_candidates(star3.problem, star3.hardware, star3.embedding, dist, 0)
        leaves_only = candidates[0b1110 - 1]
        assert leaves_only.value == 2
        assert certify_tightness(star3.problem, star3.embedding, dist, 0, leaves_only)


class TestAdmissibility:
    def test_choi2_split_needs_no_strength(self, star3):
        assert minimum_admissible_strength(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), 0) == 0

    def test_single_split_on_centre(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "single")
        assert minimum_admissible_strength(star3.problem, star3.hardware, star3.embedding, dist, 0) == 1

        report = check_admissible(star3.problem, star3.hardware, star3.embedding, dist, Fraction(1, 2))
        assert not report.admissible
        assert len(report.violations) == 1
        violation = report.violations[0]
        assert violation.subset == (0,)
        assert violation.boundary_size == 3
        assert violation.slack == Fraction(-3, 2)
        assert report.minimum_strength[0] == 1

        assert check_admissible(star3.problem, star3.hardware, star3.embedding, dist, 1).admissible

    def test_profile(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "single")
        profile = admissibility_profile(star3.problem, star3.hardware, star3.embedding, dist, 0,
                                        [Fraction(0), Fraction(2)])
        assert profile[0][1].subset == (0,)
        assert profile[0][1].slack == -3
        assert profile[1][1] is None

    def test_negative_magnitude_rejected(self, star3):
        with pytest.raises(SignError):
            check_admissible(star3.problem, star3.hardware, star3.embedding, choi2_dist(star3), -1)

    @pytest.mark.parametrize("strategy", ["uniform", "choi2", "single"])
    def test_choi1_strength_is_admissible(self, strategy):
        rng = np.random.default_rng(1123)
        for _ in range(100):
            bundle = small_embedded_instance(rng)
            problem, hw, emb = bundle.problem, bundle.hardware, bundle.embedding
            dist = distribute_fields(problem, hw, emb, strategy)
            strengths = {i: choi1_bound(problem, i) for i in range(problem.num_qubits)}
            report = check_admissible(problem, hw, emb, dist, strengths)
            assert report.admissible, f"{problem.to_dict()} on {emb.to_dict()}"

    @pytest.mark.parametrize("strength", [Fraction(0), Fraction(1, 3), Fraction(5)])
    def test_zero_fields_are_admissible(self, strength):
        rng = np.random.default_rng(4242)
        for _ in range(50):
            bundle = small_embedded_instance(rng)
            problem = IsingProblem(bundle.problem.num_qubits, (0,) * bundle.problem.num_qubits,
                                   bundle.problem.couplers)
            dist = distribute_fields(problem, bundle.hardware, bundle.embedding, "uniform")
            report = check_admissible(problem, bundle.hardware, bundle.embedding, dist, strength)
            assert report.admissible
            assert all(v == 0 for v in report.minimum_strength.values())


class TestOptimizer:
    def test_star3_best_constant(self, star3):
        dist, bound = optimize_distribution(star3.problem, star3.hardware, star3.embedding, 0)
        assert abs(bound - 5) <= Fraction(1, 1024)
        assert dist.strategy == "optimized"
        values = dist.for_qubit(0)
        assert sum(values.values()) == 3
        assert all(v >= 0 for v in values.values())

    def test_optimized_split_achieves_reported_bound(self, star3):
        dist, bounds = optimize_all(star3.problem, star3.hardware, star3.embedding)
        value, _ = tight_bound(star3.problem, star3.hardware, star3.embedding, dist, 0)
        assert value == bounds[0]
        assert bounds[1] == 0

    def test_never_worse_than_uniform(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            bundle = single_chain_instance(rng, max_chain=4, max_neighbors=3)
            hw, emb = bundle.hardware, bundle.embedding
            _, bound = optimize_distribution(bundle.problem, hw, emb, 0, resolution_bits=6, max_passes=8)
            uniform = distribute_fields(bundle.problem, hw, emb, "uniform")
            assert bound <= tight_bound(bundle.problem, hw, emb, uniform, 0)[0]

    def test_never_worse_than_choi2(self):
        rng = np.random.default_rng(99)
        for _ in range(40):
            bundle = single_chain_instance(rng, max_chain=4, max_neighbors=3)
            hw, emb = bundle.hardware, bundle.embedding
            dist, bound = optimize_distribution(bundle.problem, hw, emb, 0, resolution_bits=6, max_passes=8)
            choi2 = choi2_dist(bundle)
            assert bound <= tight_bound(bundle.problem, hw, emb, choi2, 0)[0]
            assert tight_bound(bundle.problem, hw, emb, dist, 0)[0] == bound
            if dist.mixed_sign:
                assert dist.mixed_sign == (0,)
                assert dist.for_qubit(0) == choi2.for_qubit(0)
            else:
                sign = 1 if bundle.problem.local_fields[0] >= 0 else -1
                assert all(sign * v >= 0 for v in dist.for_qubit(0).values())

    def test_bound_covers_admissibility(self):
        rng = np.random.default_rng(31)
        epsilon = Fraction(1, 64)
        for _ in range(40):
            bundle = single_chain_instance(rng, max_chain=4, max_neighbors=3)
            problem, hw, emb = bundle.problem, bundle.hardware, bundle.embedding
            dist, bound = optimize_distribution(problem, hw, emb, 0, resolution_bits=6, max_passes=8)
            assert bound >= minimum_admissible_strength(problem, hw, emb, dist, 0)

            full = distribute_fields(problem, hw, emb, "uniform").merged(dist)
            strengths = [bound + epsilon] + [0] * (problem.num_qubits - 1)
            assert verify_no_domain_wall(problem, hw, emb, full, strengths).passed

    def test_zero_field_pair_matches_grid_scan(self, zero_field_pair):
        problem, hw, emb = zero_field_pair.problem, zero_field_pair.hardware, zero_field_pair.embedding
        rest = {1: {2: 0}, 2: {3: 0}}
        scan = {}
        for step in range(-128, 129):
            t = Fraction(step, 64)
            dist = distribute_fields(problem, hw, emb, "custom", custom={0: {0: t, 1: -t}, **rest})
            scan[t] = tight_bound(problem, hw, emb, dist, 0)[0]
            assert scan[t] == 2 + abs(t)
        assert min(scan.values()) == 2
        assert [t for t, value in scan.items() if value == 2] == [0]

        uniform = distribute_fields(problem, hw, emb, "uniform")
        assert tight_bound(problem, hw, emb, uniform, 0)[0] == 2
        dist, bound = optimize_distribution(problem, hw, emb, 0)
        assert bound == 2
        assert dist.for_qubit(0) == {0: 0, 1: 0}
        assert dist.mixed_sign == ()
