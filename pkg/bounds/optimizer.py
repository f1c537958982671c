# bounds/optimizer.py

"""
Field distribution optimizer: minimise the tight bound of one chain over all
splits of h_i with sgn(h_i) * h_{i(k)} >= 0 on every node.

Working variables are y_k = sgn(h_i) * h_{i(k)} on the simplex sum(y) = |h_i|.
Each start is improved by coordinate descent over pairwise transfers (bounded
Brent line search on a float model, snapped to the refinement grid and accepted
only on an exact strict improvement), then polished by a halving pattern search.

Choi's leaf-corrected split can leave the sign-coherent region when its leaf
share exceeds a leaf's external sum. It is still compared at the end and
returned when it beats the search, with the qubit listed in `mixed_sign`.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from scipy.optimize import minimize_scalar

from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding, external_field_sums, leaf_count, leaves
from ising import IsingProblem
from numeric import Number, divide, sgn

from .choi import c_value
from .subsets import MAX_CHAIN_SIZE, ChainSubsets, tight_value

logger = logging.getLogger(__name__)


class DistributionOptimizer:
    """Deterministic multi-start search for the field split with the smallest tight bound."""

    def __init__(self, resolution_bits: int = 10, max_passes: int = 64, max_chain_size: int = MAX_CHAIN_SIZE):
        self.resolution_bits = resolution_bits
        self.max_passes = max_passes
        self.max_chain_size = max_chain_size

    def optimize(self, problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                 i: int) -> Tuple[HFieldDistribution, Number]:
        chain = emb.chains[i]
        h_i = problem.local_fields[i]
        zero = Fraction(0) if problem.exact else 0.0
        j_sums = external_field_sums(problem, hw, emb)[i]

        if len(chain) == 1:
            return HFieldDistribution({i: {chain[0]: h_i}}, strategy="optimized"), zero

        subsets = ChainSubsets.for_qubit(hw, emb, i, self.max_chain_size)
        j_vec = [j_sums[node] for node in chain]
        sign = sgn(h_i)
        magnitude = abs(h_i)

        def exact_objective(y: Sequence[Number]) -> Number:
            return tight_value(subsets, [sign * v for v in y], j_vec, h_i)[0]

        float_j = [float(v) for v in j_vec]

        def float_objective(y: Sequence[float]) -> float:
            return float(tight_value(subsets, [sign * v for v in y], float_j, float(h_i))[0])

        choi2 = self._choi2_split(problem, hw, emb, i, j_vec, magnitude)
        if magnitude == 0:
            y = [zero] * len(chain)
            return self._outside_region(i, chain, sign, y, exact_objective(y), choi2, exact_objective)

        resolution = divide(magnitude + sum(j_vec, zero), 1 << self.resolution_bits)
        best_y, best_value = None, None
        for label, start in self._starts(emb, i, magnitude, choi2):
            y, value = self._descend(start, exact_objective, float_objective, resolution)
            y, value = self._polish(y, value, exact_objective, magnitude, resolution)
            logger.debug(f"Qubit {i}: start '{label}' converged to {value}")
            if best_value is None or value < best_value:
                best_y, best_value = y, value

        logger.info(f"Qubit {i}: optimized tight bound {best_value}")
        return self._outside_region(i, chain, sign, best_y, best_value, choi2, exact_objective)

    def _outside_region(self, i: int, chain: Sequence[int], sign: int, y: Sequence[Number], value: Number,
                        choi2: Optional[List[Number]], exact_objective) -> Tuple[HFieldDistribution, Number]:
        """Prefer a mixed-sign choi2 split over the search result when its bound is smaller."""
        if choi2 is None or all(v >= 0 for v in choi2):
            return self._distribution(i, chain, sign, y), value
        choi2_value = exact_objective(choi2)
        if choi2_value >= value:
            return self._distribution(i, chain, sign, y), value
        logger.warning(f"Qubit {i}: mixed-sign choi2 split gives {choi2_value}, below the sign-coherent {value}")
        return self._distribution(i, chain, sign, choi2, mixed_sign=True), choi2_value

    @staticmethod
    def _distribution(i: int, chain: Sequence[int], sign: int, y: Sequence[Number],
                      mixed_sign: bool = False) -> HFieldDistribution:
        return HFieldDistribution({i: {node: sign * v for node, v in zip(chain, y)}}, strategy="optimized",
                                  mixed_sign=(i,) if mixed_sign else ())

    @staticmethod
    def _choi2_split(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, i: int,
                     j_vec: Sequence[Number], magnitude: Number) -> Optional[List[Number]]:
        """Choi's split in working variables, None for locally determinable qubits."""
        c = c_value(problem, i)
        if c < 0:
            return None
        chain = emb.chains[i]
        leaf_set = set(leaves(hw, emb, i))
        share = divide(c, leaf_count(hw, emb, i))
        zero = magnitude * 0
        return [j_vec[k] - (share if chain[k] in leaf_set else zero) for k in range(len(chain))]

    def _starts(self, emb: MinorEmbedding, i: int, magnitude: Number,
                choi2: Optional[List[Number]]) -> List[Tuple[str, List[Number]]]:
        chain = emb.chains[i]
        size = len(chain)
        zero = magnitude * 0
        starts = []
        for k in range(size):
            starts.append((f"vertex {chain[k]}", [magnitude if m == k else zero for m in range(size)]))
        starts.append(("uniform", [divide(magnitude, size)] * size))
        if choi2 is not None and all(v >= 0 for v in choi2):
            starts.append(("choi2", choi2))

        unique, seen = [], set()
        for label, y in starts:
            key = tuple(y)
            if key not in seen:
                seen.add(key)
                unique.append((label, list(y)))
        return unique

    def _snap(self, t: float, resolution: Number, low: Number, high: Number) -> Number:
        steps = round(t / float(resolution))
        snapped = resolution * steps
        return min(max(snapped, low), high)

    def _descend(self, y: List[Number], exact_objective, float_objective,
                 resolution: Number) -> Tuple[List[Number], Number]:
        value = exact_objective(y)
        size = len(y)
        for _ in range(self.max_passes):
            improved = False
            for a in range(size):
                for b in range(size):
                    if a == b:
                        continue
                    low, high = -y[b], y[a]
                    if low == high:
                        continue

                    def along(t, a=a, b=b):
                        trial = [float(v) for v in y]
                        trial[a] -= t
                        trial[b] += t
                        return float_objective(trial)

                    result = minimize_scalar(along, bounds=(float(low), float(high)), method="bounded",
                                             options={"xatol": float(resolution) / 4})
                    best_t, best_value = None, value
                    for t in (self._snap(result.x, resolution, low, high), low, high):
                        if t == 0:
                            continue
                        trial = list(y)
                        trial[a] -= t
                        trial[b] += t
                        trial_value = exact_objective(trial)
                        if trial_value < best_value:
                            best_t, best_value = t, trial_value
                    if best_t is not None:
                        y = list(y)
                        y[a] -= best_t
                        y[b] += best_t
                        value = best_value
                        improved = True
            if not improved:
                break
        return y, value

    def _polish(self, y: List[Number], value: Number, exact_objective, magnitude: Number,
                resolution: Number) -> Tuple[List[Number], Number]:
        size = len(y)
        step = divide(magnitude, 2)
        while step >= resolution:
            for _ in range(self.max_passes):
                improved = False
                for a in range(size):
                    for b in range(size):
                        if a == b or y[a] == 0:
                            continue
                        t = min(step, y[a])
                        trial = list(y)
                        trial[a] -= t
                        trial[b] += t
                        trial_value = exact_objective(trial)
                        if trial_value < value:
                            y, value = trial, trial_value
                            improved = True
                if not improved:
                    break
            step = divide(step, 2)
        return y, value


def optimize_distribution(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, i: int,
                          resolution_bits: int = 10, max_passes: int = 64,
                          max_chain_size: int = MAX_CHAIN_SIZE) -> Tuple[HFieldDistribution, Number]:
    """Best field split for chain i and its tight bound; sign-coherent unless `mixed_sign` lists i."""
    optimizer = DistributionOptimizer(resolution_bits, max_passes, max_chain_size)
    return optimizer.optimize(problem, hw, emb, i)


def optimize_all(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                 qubits: Optional[Sequence[int]] = None, **kwargs) -> Tuple[HFieldDistribution, Dict[int, Number]]:
    optimizer = DistributionOptimizer(**kwargs)
    merged = HFieldDistribution({}, strategy="optimized")
    bounds = {}
    for i in (range(problem.num_qubits) if qubits is None else qubits):
        dist, bound = optimizer.optimize(problem, hw, emb, i)
        merged = merged.merged(dist)
        bounds[i] = bound
    return merged, bounds
