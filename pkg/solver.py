"""
Classical solvers for (embedded) Ising problems and chain strength sweeps.

Simulated annealing runs all restarts as one vectorised population with
sequential single-spin Metropolis updates and a geometric temperature
schedule. Random numbers come from numpy's PCG64 bit generator seeded with a
SeedSequence; sweep point streams derive from (seed, [embedding,] first index
of the grid value).
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding, build_embedded, require_valid
from errors import ChainBoundError
from ising import GroundStateSet, IsingProblem, SpinConfig, enumerate_ground_states
from oracle import majority_vote_batch

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["F", "success_prob", "broken_rate", "tts", "samples", "seed"]


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric temperature ladder from t_initial down to t_final over `sweeps` sweeps."""
    t_initial: float = 5.0
    t_final: float = 0.05
    sweeps: int = 1000

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError(f"Annealing needs at least one sweep, got {self.sweeps}")
        if self.t_final <= 0 or self.t_initial < self.t_final:
            raise ValueError(f"Temperatures must satisfy 0 < t_final <= t_initial, got {self.t_initial}, {self.t_final}")

    def temperatures(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.t_final], dtype=np.float64)
        return np.geomspace(self.t_initial, self.t_final, self.sweeps)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "AnnealSchedule":
        section = config.get('annealing', {})
        return cls(
            t_initial=float(section.get('t_initial', 5.0)),
            t_final=float(section.get('t_final', 0.05)),
            sweeps=int(section.get('sweeps', 1000)),
        )


@dataclass
class AnnealResult:
    best_config: SpinConfig
    best_energy: float
    energies: List[float]          # Final energy per restart
    samples: np.ndarray            # Final spins per restart, shape (restarts, n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "energy": self.best_energy,
            "config": list(self.best_config.spins),
            "restart_energies": self.energies,
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[r, e] for r, e in enumerate(self.energies)]
        return f"Simulated annealing (best energy {self.best_energy:g})", ["Restart", "Energy"], rows


def _dense(problem: IsingProblem) -> Tuple[np.ndarray, np.ndarray]:
    n = problem.num_qubits
    fields = np.array([float(h) for h in problem.local_fields], dtype=np.float64)
    coupling = np.zeros((n, n), dtype=np.float64)
    for i, j, value in problem.couplers:
        coupling[i, j] = coupling[j, i] = float(value)
    return fields, coupling


def batch_energies(problem: IsingProblem, spins: np.ndarray) -> np.ndarray:
    """Energies of a (samples x n) spin matrix in float64."""
    fields, coupling = _dense(problem)
    spins = np.asarray(spins, dtype=np.float64)
    return spins @ fields + 0.5 * np.einsum("ri,ij,rj->r", spins, coupling, spins)


def solve_exhaustive(problem: IsingProblem, max_qubits: int = 24, workers: int = 1) -> GroundStateSet:
    return enumerate_ground_states(problem, max_qubits=max_qubits, workers=workers)


def solve_sa(problem: IsingProblem, schedule: AnnealSchedule = AnnealSchedule(),
             seed: Union[int, np.random.SeedSequence] = 0, sweeps: Optional[int] = None,
             restarts: int = 1) -> AnnealResult:
    """Best configuration over `restarts` independent anneals; deterministic given the seed."""
    if sweeps is not None:
        schedule = AnnealSchedule(schedule.t_initial, schedule.t_final, sweeps)
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}")

    n = problem.num_qubits
    rng = np.random.Generator(np.random.PCG64(seed))
    fields, coupling = _dense(problem)
    spins = rng.choice(np.array([-1.0, 1.0]), size=(restarts, n))

    for temperature in schedule.temperatures():
        for k in range(n):
            local = fields[k] + spins @ coupling[:, k]
            delta = 2.0 * spins[:, k] * local
            accept = rng.random(restarts) < np.exp(-np.maximum(delta, 0.0) / temperature)
            spins[accept, k] *= -1.0

    energies = batch_energies(problem, spins)
    best = int(np.argmin(energies))
    samples = spins.astype(np.int64)
    best_config = SpinConfig(tuple(int(s) for s in samples[best])) if n else SpinConfig(())
    logger.debug(f"SA finished {restarts} restart(s) x {schedule.sweeps} sweeps; best energy {energies[best]:g}")
    return AnnealResult(best_config, float(energies[best]), [float(e) for e in energies], samples)


def tts(success_prob: float, target: float = 0.999, anneal_time: float = 1.0) -> float:
    """
    Time to reach the solution with probability `target`: t_a log(1 - p) / log(1 - s).

    Floored at t_a when s >= p; infinite when s = 0.
    """
    if not 0 < target < 1:
        raise ValueError(f"Target probability must lie in (0, 1), got {target}")
    if anneal_time <= 0:
        raise ValueError(f"Anneal time must be positive, got {anneal_time}")
    if not 0 <= success_prob <= 1:
        raise ValueError(f"Success probability must lie in [0, 1], got {success_prob}")
    if success_prob >= target:
        return float(anneal_time)
    if success_prob == 0:
        return math.inf
    return anneal_time * math.log(1 - target) / math.log(1 - success_prob)


@dataclass
class SweepPoint:
    F: float
    success_prob: float
    broken_rate: float
    tts: float
    samples: int
    seed: int
    embedding: int = 0


@dataclass
class SweepResult:
    points: List[SweepPoint] = field(default_factory=list)
    target: float = 0.999
    anneal_time: float = 1.0

    @property
    def chain_strength_grid(self) -> List[float]:
        return [p.F for p in self.points]

    def best_index(self) -> int:
        """Grid index of the smallest TTS (first on ties)."""
        return int(np.argmin([p.tts for p in self.points]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{column: getattr(p, column) for column in SWEEP_COLUMNS} for p in self.points],
                            columns=SWEEP_COLUMNS)

    def to_csv(self, path: Optional[str] = None) -> str:
        text = self.to_frame().to_csv(index=False, lineterminator="\n")
        if path is not None:
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
        return text

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target,
            "anneal_time": self.anneal_time,
            "points": [{column: (str(getattr(p, column)) if column == "tts" and math.isinf(p.tts)
                                 else getattr(p, column)) for column in SWEEP_COLUMNS}
                       for p in self.points],
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[p.F, f"{p.success_prob:.4f}", f"{p.broken_rate:.4f}", f"{p.tts:.4g}", p.samples, p.seed]
                for p in self.points]
        return "Chain strength sweep", SWEEP_COLUMNS, rows


def point_seed(seed: int, grid: Sequence[float], index: int, embedding: int = 0) -> np.random.SeedSequence:
    """Stream for a grid point; duplicated grid values share the stream of their first occurrence."""
    first = list(grid).index(grid[index])
    if embedding:
        return np.random.SeedSequence([seed, first, embedding])
    return np.random.SeedSequence([seed, first])


def run_point(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
              magnitude: float, logical_minimum: float, schedule: AnnealSchedule, samples: int,
              sequence: np.random.SeedSequence, target: float, anneal_time: float,
              cap: Optional[float] = None, majority: bool = False, embedding: int = 0) -> SweepPoint:
    """One sweep point: embed at -|F|, anneal, decode by majority vote, score against the logical minimum."""
    embedded = build_embedded(problem, hw, emb, dist, -magnitude, strict_sign=False)
    if cap is not None:
        embedded, _ = embedded.scaled_to_cap(cap)
    result = solve_sa(embedded.physical.to_float(), schedule, seed=sequence, restarts=samples)

    logical, broken = majority_vote_batch(result.samples, embedded)
    energies = batch_energies(problem, logical)
    optimal = np.isclose(energies, logical_minimum, rtol=1e-9, atol=1e-9)
    success = optimal if majority else optimal & ~broken

    success_prob = float(success.mean())
    return SweepPoint(
        F=float(magnitude),
        success_prob=success_prob,
        broken_rate=float(broken.mean()),
        tts=tts(success_prob, target, anneal_time),
        samples=samples,
        seed=int(sequence.generate_state(1)[0]),
        embedding=embedding,
    )


async def sweep_chain_strength(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                               dist: HFieldDistribution, grid: Sequence, schedule: AnnealSchedule = AnnealSchedule(),
                               samples: int = 100, seed: int = 0, target: float = 0.999, anneal_time: float = 1.0,
                               cap: Optional[float] = None, majority: bool = False,
                               embedding: int = 0) -> SweepResult:
    """Success probability, broken-chain rate and TTS per chain strength magnitude, ordered by grid index."""
    if not grid:
        raise ChainBoundError("Chain strength grid is empty")
    require_valid(problem, hw, emb)
    grid = [float(F) for F in grid]
    logical_minimum = float(enumerate_ground_states(problem).energy)
    logger.info(f"Sweeping {len(grid)} chain strengths with {samples} samples each"
                + (f" under coupling cap {cap}" if cap is not None else ""))

    tasks = [
        asyncio.to_thread(run_point, problem, hw, emb, dist, F, logical_minimum, schedule, samples,
                          point_seed(seed, grid, index, embedding), target, anneal_time, cap, majority, embedding)
        for index, F in enumerate(grid)
    ]
    points = await asyncio.gather(*tasks)
    return SweepResult(list(points), target, anneal_time)


async def sweep_embeddings(problem: IsingProblem, hw: HardwareGraph,
                           embeddings: Sequence[Tuple[MinorEmbedding, HFieldDistribution]], grid: Sequence,
                           **kwargs) -> SweepResult:
    """Per grid point, the embedding with the smallest TTS (first embedding on ties)."""
    if not embeddings:
        raise ChainBoundError("At least one embedding is required")
    results = await asyncio.gather(*[
        sweep_chain_strength(problem, hw, emb, dist, grid, embedding=e, **kwargs)
        for e, (emb, dist) in enumerate(embeddings)
    ])
    points = []
    for index in range(len(grid)):
        candidates = [result.points[index] for result in results]
        points.append(min(candidates, key=lambda p: p.tts))
    return SweepResult(points, results[0].target, results[0].anneal_time)


def sweep_chain_strength_sync(*args, **kwargs) -> SweepResult:
    return asyncio.run(sweep_chain_strength(*args, **kwargs))
