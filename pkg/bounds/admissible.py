# bounds/admissible.py

"""
Admissibility of a chain strength: no chain subset may be forced to break.

For F >= 0 and every proper nonempty subset W of a chain,
C(W) = J(W) + |dW| * F - |h(W)| must be non-negative.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding, per_qubit_strengths
from errors import SignError
from ising import IsingProblem
from models import AdmissibilityReport, AdmissibilityViolation
from numeric import Number, normalize

from .subsets import MAX_CHAIN_SIZE, ChainSubsets, ScaledValues, best_ratio, chain_vectors

logger = logging.getLogger(__name__)


def _slack_scan(subsets: ChainSubsets, h_vec: Sequence[Number], j_vec: Sequence[Number], strength: Number):
    """Yield (masks, boundary, slack numerators) per block with the shared scale."""
    scale = ScaledValues(list(h_vec) + list(j_vec) + [strength])
    size = subsets.size
    h_arr = scale.array[:size]
    j_arr = scale.array[size:2 * size]
    f = scale.array[2 * size]
    for masks, bits, boundary in subsets.blocks():
        slack = bits @ j_arr + boundary.astype(scale.array.dtype) * f - np.abs(bits @ h_arr)
        yield scale, masks, boundary, slack


def _scaled_value(scale: ScaledValues, numerator) -> Number:
    if scale.exact:
        return Fraction(int(numerator), scale.denominator)
    return float(numerator)


def _check_strength(strength: Number) -> Number:
    strength = normalize(strength)
    if strength < 0:
        raise SignError(f"Admissibility is checked on chain strength magnitudes; got {strength}")
    return strength


def check_admissible(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
                     strengths, max_chain_size: int = MAX_CHAIN_SIZE) -> AdmissibilityReport:
    """Report every chain subset with C(W) < 0 at the given per-qubit magnitudes."""
    dist.validate(problem, emb)
    magnitudes = [_check_strength(s) for s in per_qubit_strengths(strengths, problem.num_qubits)]

    violations: List[AdmissibilityViolation] = []
    minimum = {}
    for i in range(problem.num_qubits):
        subsets = ChainSubsets.for_qubit(hw, emb, i, max_chain_size)
        minimum[i] = minimum_admissible_strength(problem, hw, emb, dist, i, max_chain_size)
        if subsets.size <= 1:
            continue
        h_vec, j_vec = chain_vectors(problem, hw, emb, dist, i)
        for scale, masks, boundary, slack in _slack_scan(subsets, h_vec, j_vec, magnitudes[i]):
            for k in np.flatnonzero(slack < 0):
                mask = int(masks[k])
                violations.append(AdmissibilityViolation(
                    qubit=i,
                    subset=subsets.nodes(mask),
                    boundary_size=int(boundary[k]),
                    slack=_scaled_value(scale, slack[k]),
                ))

    if violations:
        logger.info(f"Found {len(violations)} inadmissible chain subset(s)")
    return AdmissibilityReport(admissible=not violations, violations=violations, minimum_strength=minimum)


def minimum_admissible_strength(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                                dist: HFieldDistribution, i: int,
                                max_chain_size: int = MAX_CHAIN_SIZE) -> Number:
    """Smallest F >= 0 admissible for chain i: max over W of (|h(W)| - J(W)) / |dW|, clipped at 0."""
    zero = Fraction(0) if problem.exact else 0.0
    subsets = ChainSubsets.for_qubit(hw, emb, i, max_chain_size)
    if subsets.size <= 1:
        return zero
    h_vec, j_vec = chain_vectors(problem, hw, emb, dist, i)
    scale = ScaledValues(list(h_vec) + list(j_vec))
    h_arr = scale.array[:subsets.size]
    j_arr = scale.array[subsets.size:]
    value, _ = best_ratio(subsets, scale, lambda bits, boundary: np.abs(bits @ h_arr) - bits @ j_arr)
    return max(value, zero)


def admissibility_profile(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                          dist: HFieldDistribution, i: int, strengths: Sequence[Number],
                          max_chain_size: int = MAX_CHAIN_SIZE) -> List[Tuple[Number, Optional[AdmissibilityViolation]]]:
    """For each trial magnitude, the most violated subset of chain i (smallest mask on ties) or None."""
    dist.validate(problem, emb, qubits=[i])
    subsets = ChainSubsets.for_qubit(hw, emb, i, max_chain_size)
    h_vec, j_vec = chain_vectors(problem, hw, emb, dist, i) if subsets.size > 1 else ([], [])

    profile = []
    for strength in strengths:
        strength = _check_strength(strength)
        worst = None
        if subsets.size > 1:
            for scale, masks, boundary, slack in _slack_scan(subsets, h_vec, j_vec, strength):
                k = int(np.argmin(slack))
                if slack[k] >= 0:
                    continue
                value = _scaled_value(scale, slack[k])
                if worst is None or value < worst.slack:
                    worst = AdmissibilityViolation(i, subsets.nodes(int(masks[k])), int(boundary[k]), value)
        profile.append((strength, worst))
    return profile
