# bounds/subsets.py

"""
Tight per-chain bound by enumerating every proper nonempty subset W of a chain.

Subset W is encoded as a bitmask over the chain nodes in sorted order: bit k
set means the k-th node is in W. The boundary |dW| counts chain-tree edges
with exactly one endpoint in W. Subsets need not be connected.
"""

import logging
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding, chain_tree_edges, external_field_sums
from errors import SizeCapError
from ising import IsingProblem
from models import SubsetWitness
from numeric import Number, integer_array, numbers_equal, scale_to_integers, sgn

logger = logging.getLogger(__name__)

MAX_CHAIN_SIZE = 30
DEFAULT_BLOCK_SIZE = 1 << 15


class ChainSubsets:
    """Bitmask enumeration of the proper nonempty subsets of one chain."""

    def __init__(self, chain: Sequence[int], tree_edges: Sequence[Tuple[int, int]],
                 block_size: int = DEFAULT_BLOCK_SIZE):
        self.chain = tuple(chain)
        self.size = len(self.chain)
        self.block_size = block_size
        position = {node: k for k, node in enumerate(self.chain)}
        self.edge_positions = np.array(
            [(position[p], position[q]) for p, q in tree_edges], dtype=np.int64
        ).reshape(-1, 2)

    @classmethod
    def for_qubit(cls, hw: HardwareGraph, emb: MinorEmbedding, i: int,
                  max_chain_size: int = MAX_CHAIN_SIZE) -> "ChainSubsets":
        chain = emb.chains[i]
        if len(chain) > max_chain_size:
            raise SizeCapError(
                f"Chain of qubit {i} has {len(chain)} nodes; subset enumeration is capped at {max_chain_size}. "
                f"Split the chain or raise bounds.max_chain_size"
            )
        return cls(chain, chain_tree_edges(hw, emb, i))

    @property
    def count(self) -> int:
        return max((1 << self.size) - 2, 0)

    def blocks(self) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Yield (masks, membership bits, boundary sizes) for masks 1 .. 2^L - 2 in ascending order."""
        last = (1 << self.size) - 1
        shifts = np.arange(self.size, dtype=np.int64)
        for start in range(1, last, self.block_size):
            stop = min(start + self.block_size, last)
            masks = np.arange(start, stop, dtype=np.int64)
            bits = (masks[:, None] >> shifts) & 1
            crossing = bits[:, self.edge_positions[:, 0]] ^ bits[:, self.edge_positions[:, 1]]
            yield masks, bits, crossing.sum(axis=1)

    def members(self, mask: int) -> List[int]:
        return [k for k in range(self.size) if (mask >> k) & 1]

    def nodes(self, mask: int) -> Tuple[int, ...]:
        return tuple(self.chain[k] for k in self.members(mask))

    def boundary(self, mask: int) -> int:
        return sum(1 for a, b in self.edge_positions if ((mask >> int(a)) & 1) != ((mask >> int(b)) & 1))


class ScaledValues:
    """
    Coefficients as an integer array over a common denominator (exact mode)
    or as a float64 array. Ratios are rebuilt exactly from the integers.
    """

    def __init__(self, values: Sequence[Number]):
        scaled = scale_to_integers(list(values))
        if scaled is None:
            self.exact = False
            self.denominator = 1
            self.array = np.asarray([float(v) for v in values], dtype=np.float64)
        else:
            integers, self.denominator = scaled
            self.exact = True
            self.array = integer_array(integers, 2 * len(integers))

    def ratio(self, numerator, boundary) -> Number:
        if self.exact:
            return Fraction(int(numerator), self.denominator * int(boundary))
        return float(numerator) / float(boundary)


def best_ratio(subsets: ChainSubsets, scale: ScaledValues,
               numerator: Callable[[np.ndarray, np.ndarray], np.ndarray],
               maximize: bool = True) -> Tuple[Optional[Number], Optional[int]]:
    """
    Extreme of numerator(bits, boundary) / |dW| over all subsets.

    The ratio is compared exactly by grouping subsets on their boundary size.
    Ties go to the smallest mask. Returns (None, None) for chains without subsets.
    """
    best_value, best_mask = None, None
    for masks, bits, boundary in subsets.blocks():
        values = numerator(bits, boundary)
        for size in np.unique(boundary):
            selected = boundary == size
            group = values[selected]
            top = group.max() if maximize else group.min()
            value = scale.ratio(top, size)
            mask = int(masks[selected][group == top][0])
            better = best_value is None or (value > best_value if maximize else value < best_value)
            if better or (value == best_value and mask < best_mask):
                best_value, best_mask = value, mask
    return best_value, best_mask


def chain_vectors(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                  dist: HFieldDistribution, i: int) -> Tuple[List[Number], List[Number]]:
    """Per chain node (sorted), the distributed field h_{i(k)} and the external coupler weight J_{i(k)}."""
    chain = emb.chains[i]
    j_sums = external_field_sums(problem, hw, emb)[i]
    return dist.vector(i, chain), [j_sums[node] for node in chain]


def candidate_value(h_w: Number, j_w: Number, h_i: Number, j_total: Number, boundary: int) -> Number:
    """M(W) = min(|h(W) - J(W)|, |h(W) - h_i - J(complement)|) / |dW|."""
    smallest = min(abs(h_w - j_w), abs(h_w - h_i - (j_total - j_w)))
    if isinstance(smallest, Fraction):
        return smallest / boundary
    return float(smallest) / boundary


def make_witness(subsets: ChainSubsets, i: int, h_vec: Sequence[Number], j_vec: Sequence[Number],
                 h_i: Number, mask: int) -> SubsetWitness:
    members = subsets.members(mask)
    h_w = sum((h_vec[k] for k in members), Fraction(0))
    j_w = sum((j_vec[k] for k in members), Fraction(0))
    j_total = sum(j_vec, Fraction(0))
    boundary = subsets.boundary(mask)
    return SubsetWitness(
        qubit=i,
        subset=subsets.nodes(mask),
        mask=mask,
        boundary_size=boundary,
        h_sum=h_w,
        j_sum=j_w,
        value=candidate_value(h_w, j_w, h_i, j_total, boundary),
    )


def tight_value(subsets: ChainSubsets, h_vec: Sequence[Number], j_vec: Sequence[Number],
                h_i: Number) -> Tuple[Optional[Number], Optional[int]]:
    """Max over W of M(W) for raw per-node vectors; the optimizer calls this directly."""
    scale = ScaledValues(list(h_vec) + list(j_vec) + [h_i])
    size = subsets.size
    h_arr = scale.array[:size]
    j_arr = scale.array[size:2 * size]
    hi = scale.array[2 * size]
    j_total = j_arr.sum()

    def numerator(bits, boundary):
        h_w = bits @ h_arr
        j_w = bits @ j_arr
        return np.minimum(np.abs(h_w - j_w), np.abs(h_w - hi - (j_total - j_w)))

    return best_ratio(subsets, scale, numerator)


def subset_candidates(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                      dist: HFieldDistribution, i: int,
                      max_chain_size: int = MAX_CHAIN_SIZE) -> List[SubsetWitness]:
    """Every proper nonempty subset of chain i with its candidate value, in mask order."""
    subsets = ChainSubsets.for_qubit(hw, emb, i, max_chain_size)
    h_vec, j_vec = chain_vectors(problem, hw, emb, dist, i)
    h_i = problem.local_fields[i]
    return [make_witness(subsets, i, h_vec, j_vec, h_i, mask) for mask in range(1, (1 << subsets.size) - 1)]


def tight_bound(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
                i: int, max_chain_size: int = MAX_CHAIN_SIZE) -> Tuple[Number, Optional[SubsetWitness]]:
    """
    M_i = max over proper nonempty W of M(W; h, J), with the maximizing witness.

    Single-node chains have no subsets and need no chain strength: (0, None).
    """
    dist.validate(problem, emb, qubits=[i])
    subsets = ChainSubsets.for_qubit(hw, emb, i, max_chain_size)
    if subsets.size <= 1:
        return (Fraction(0) if problem.exact else 0.0), None

    h_vec, j_vec = chain_vectors(problem, hw, emb, dist, i)
    h_i = problem.local_fields[i]
    value, mask = tight_value(subsets, h_vec, j_vec, h_i)
    witness = make_witness(subsets, i, h_vec, j_vec, h_i, mask)
    logger.debug(f"Qubit {i}: tight bound {value} at subset {list(witness.subset)} (|dW| = {witness.boundary_size})")
    return witness.value, witness


def breaking_threshold(h_w: Number, j_w: Number, h_i: Number, j_total: Number, boundary: int) -> Number:
    """
    Largest |F| at which some neighbour spin pattern breaks the chain with
    W up and its complement down: min(J(W) - h(W), h_i + J(complement) - h(W)) / |dW|.

    Neighbours pulling W down (-J(W)) and the complement up (+J(complement))
    realise it; a non-positive value means no pattern splits the chain along W.
    """
    smallest = min(j_w - h_w, h_i + (j_total - j_w) - h_w)
    if isinstance(smallest, Fraction):
        return smallest / boundary
    return float(smallest) / boundary


def best_constant_condition(problem: IsingProblem, emb: MinorEmbedding, dist: HFieldDistribution, i: int,
                            witness: SubsetWitness) -> bool:
    """
    With s = sgn(h_i) and W' the complement, the condition on W is
        s h(W) <= |h_i| + J(W')  or  s h(W') <= |h_i| - J(W)
    and the mirrored condition (W and W' swapped) certifies M(W'), which
    only counts when M(W') equals the witness value.
    """
    dist.validate(problem, emb, qubits=[i])
    h_i = problem.local_fields[i]
    sign = sgn(h_i)
    total_j = problem.abs_coupling(i)

    h_w = sign * witness.h_sum
    h_rest = sign * (h_i - witness.h_sum)
    j_w = witness.j_sum
    j_rest = total_j - j_w
    magnitude = abs(h_i)

    if h_w <= magnitude + j_rest or h_rest <= magnitude - j_w:
        return True
    backward = h_rest <= magnitude + j_w or h_w <= magnitude - j_rest
    mirrored = candidate_value(h_i - witness.h_sum, j_rest, h_i, total_j, witness.boundary_size)
    return bool(backward and numbers_equal(mirrored, witness.value))


def breaks_at_bound(problem: IsingProblem, witness: SubsetWitness) -> bool:
    """True when the witness or its complement splits the chain right up to the witness value."""
    h_i = problem.local_fields[witness.qubit]
    total_j = problem.abs_coupling(witness.qubit)
    forward = breaking_threshold(witness.h_sum, witness.j_sum, h_i, total_j, witness.boundary_size)
    backward = breaking_threshold(h_i - witness.h_sum, total_j - witness.j_sum, h_i, total_j,
                                  witness.boundary_size)
    return any(value >= witness.value or numbers_equal(value, witness.value) for value in (forward, backward))


def certify_tightness(problem: IsingProblem, emb: MinorEmbedding, dist: HFieldDistribution, i: int,
                      witness: Optional[SubsetWitness]) -> bool:
    """
    True when the witness bound is the best constant for this qubit: the
    best-constant condition holds and a neighbour spin pattern breaks the
    chain at every |F| below the witness value.

    A chain without subsets is certified vacuously.
    """
    if witness is None:
        return True
    logger.debug(f"Certifying qubit {i} on a chain of {len(emb.chains[i])} nodes at subset {list(witness.subset)}")
    return best_constant_condition(problem, emb, dist, i, witness) and breaks_at_bound(problem, witness)
