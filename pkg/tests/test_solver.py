"""Tests for simulated annealing, time-to-solution and chain strength sweeps."""

import math
from fractions import Fraction

import numpy as np
import pytest

from embedding import build_embedded, distribute_fields
from errors import ChainBoundError
from ising import IsingProblem, enumerate_ground_states
from solver import (AnnealSchedule, SweepPoint, SweepResult, point_seed, solve_exhaustive, solve_sa,
                    sweep_chain_strength, sweep_chain_strength_sync, sweep_embeddings, tts)

FRUSTRATED = IsingProblem(6, (1, -1, 0, 2, 0, -1), ((0, 1, 1), (1, 2, -2), (2, 3, 1), (4, 5, 3), (0, 5, -1)))


class TestTimeToSolution:
    def test_known_value(self):
        assert tts(0.5, 0.999, 2) == pytest.approx(19.931568569324174, rel=1e-6)

    def test_monotone_in_success_probability(self):
        values = [tts(s, 0.999, 1.0) for s in np.linspace(0.01, 0.99, 100)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_floor_and_infinity(self):
        assert tts(0.9995, 0.999, 3.0) == 3.0
        assert tts(1.0, 0.999, 3.0) == 3.0
        assert math.isinf(tts(0.0))

    @pytest.mark.parametrize("s, target, anneal_time", [(-0.1, 0.99, 1), (1.5, 0.99, 1), (0.5, 1.0, 1), (0.5, 0.9, 0)])
    def test_invalid_arguments(self, s, target, anneal_time):
        with pytest.raises(ValueError):
            tts(s, target, anneal_time)


class TestAnnealing:
    def test_matches_exhaustive_minimum(self):
        exact = solve_exhaustive(FRUSTRATED)
        result = solve_sa(FRUSTRATED, AnnealSchedule(), seed=3, sweeps=500, restarts=20)
        assert result.best_energy == pytest.approx(float(exact.energy))
        assert len(result.energies) == 20
        assert result.samples.shape == (20, 6)

    def test_embedded_star_reaches_ground_state(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "choi2")
        embedded = build_embedded(star3.problem, star3.hardware, star3.embedding, dist, Fraction(-61, 10))
        exact = solve_exhaustive(embedded.physical)
        result = solve_sa(embedded.physical.to_float(), AnnealSchedule(), seed=0, restarts=10)
        assert result.best_energy == pytest.approx(float(exact.energy))

    def test_empty_problem(self):
        result = solve_sa(IsingProblem(3, (0, 0, 0), ()), AnnealSchedule(sweeps=5), seed=1)
        assert result.best_energy == 0

    def test_same_seed_same_samples(self):
        first = solve_sa(FRUSTRATED, AnnealSchedule(sweeps=50), seed=42, restarts=8)
        second = solve_sa(FRUSTRATED, AnnealSchedule(sweeps=50), seed=42, restarts=8)
        np.testing.assert_array_equal(first.samples, second.samples)
        assert first.best_config == second.best_config

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            AnnealSchedule(sweeps=0)
        with pytest.raises(ValueError):
            AnnealSchedule(t_initial=0.01, t_final=0.1)

    def test_schedule_from_config(self):
        schedule = AnnealSchedule.from_config({"annealing": {"t_initial": 2, "sweeps": 10}})
        assert schedule == AnnealSchedule(2.0, 0.05, 10)


class TestSweep:
    def test_duplicate_grid_values_share_a_stream(self):
        grid = [1.0, 2.0, 1.0]
        assert point_seed(7, grid, 2).generate_state(2).tolist() == point_seed(7, grid, 0).generate_state(2).tolist()
        assert point_seed(7, grid, 1).generate_state(1)[0] != point_seed(7, grid, 0).generate_state(1)[0]
        expected = np.random.SeedSequence([7, 0, 1]).generate_state(2).tolist()
        assert point_seed(7, grid, 0, embedding=1).generate_state(2).tolist() == expected

    def test_csv_header(self):
        result = SweepResult([SweepPoint(F=1.0, success_prob=0.5, broken_rate=0.1, tts=2.0, samples=4, seed=9)])
        assert result.to_csv().splitlines()[0] == "F,success_prob,broken_rate,tts,samples,seed"

    def test_interior_optimum_under_coupling_cap(self, capped_instance):
        bundle = capped_instance
        assert enumerate_ground_states(bundle.problem).energy == -5
        dist = distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, "uniform")
        result = sweep_chain_strength_sync(
            bundle.problem, bundle.hardware, bundle.embedding, dist, [0.05, 2.0, 300.0],
            AnnealSchedule(5.0, 0.05, 300), samples=100, seed=0, target=0.999, anneal_time=2.0, cap=1.0,
        )
        assert result.chain_strength_grid == [0.05, 2.0, 300.0]
        assert result.best_index() == 1
        assert result.points[0].broken_rate > 0.5
        assert result.points[1].success_prob > result.points[2].success_prob

    def test_same_seed_same_csv(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "choi2")
        runs = [
            sweep_chain_strength_sync(star3.problem, star3.hardware, star3.embedding, dist, [1.0, 7.0, 1.0],
                                      AnnealSchedule(sweeps=40), samples=16, seed=5).to_csv()
            for _ in range(2)
        ]
        assert runs[0] == runs[1]
        rows = runs[0].splitlines()[1:]
        assert rows[0] == rows[2]

    def test_empty_grid(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "choi2")
        with pytest.raises(ChainBoundError):
            sweep_chain_strength_sync(star3.problem, star3.hardware, star3.embedding, dist, [])

    @pytest.mark.asyncio
    async def test_multiple_embeddings_keep_the_best_point(self, star3):
        dist = distribute_fields(star3.problem, star3.hardware, star3.embedding, "choi2")
        options = dict(schedule=AnnealSchedule(sweeps=40), samples=16, seed=5)
        combined = await sweep_embeddings(star3.problem, star3.hardware,
                                          [(star3.embedding, dist), (star3.embedding, dist)], [2.0, 7.0], **options)
        singles = [
            await sweep_chain_strength(star3.problem, star3.hardware, star3.embedding, dist, [2.0, 7.0],
                                       embedding=e, **options)
            for e in range(2)
        ]
        for index, point in enumerate(combined.points):
            assert point.tts == min(s.points[index].tts for s in singles)
