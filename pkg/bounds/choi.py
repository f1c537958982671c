# bounds/choi.py

"""
Closed-form chain strength bounds from the logical neighbourhood alone.
"""

import logging
from fractions import Fraction

from embedding import HardwareGraph, MinorEmbedding, leaf_count
from ising import IsingProblem
from numeric import Number, divide

logger = logging.getLogger(__name__)


def c_value(problem: IsingProblem, i: int) -> Number:
    """C(i) = sum_j |J_ij| - |h_i|."""
    return problem.abs_coupling(i) - abs(problem.local_fields[i])


def locally_determinable(problem: IsingProblem, i: int) -> bool:
    """A qubit whose field outweighs all its couplers has its spin fixed by sgn(h_i)."""
    return c_value(problem, i) < 0


def choi1_bound(problem: IsingProblem, i: int) -> Number:
    return abs(problem.local_fields[i]) + problem.abs_coupling(i)


def choi2_bound(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, i: int) -> Number:
    """
    (l(i) - 1) / l(i) * C(i), valid together with the choi2 field distribution.

    Returns zero for locally determinable qubits and for single-node chains.
    """
    c = c_value(problem, i)
    zero = Fraction(0) if problem.exact else 0.0
    if c < 0:
        logger.debug(f"Qubit {i} is locally determinable (C = {c}); choi2 bound reported as 0")
        return zero
    leaves = leaf_count(hw, emb, i)
    return divide(c * (leaves - 1), leaves)
