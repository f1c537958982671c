"""
Brute-force checks of chain strength bounds on small instances.

verify_no_domain_wall enumerates every physical ground state and requires
aligned chains plus energy equality with the logical problem. probe_tightness
isolates one chain, freezes each neighbouring chain to a spin value and looks
for an external assignment under which a broken chain beats both aligned ones.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from embedding import EmbeddedIsing, HardwareGraph, HFieldDistribution, MinorEmbedding, build_embedded, \
    chain_tree_edges, per_qubit_strengths, require_valid
from errors import SizeCapError
from ising import IsingProblem, SpinConfig, energy_spectrum, enumerate_ground_states
from models import DomainWallCheck, DomainWallReport, MajorityVote, ProbeResult, SubsetWitness
from numeric import Number, divide, normalize, numbers_equal

logger = logging.getLogger(__name__)

DEFAULT_MAX_PHYSICAL = 22


def find_domain_wall(embedded: EmbeddedIsing, config: SpinConfig) -> Optional[DomainWallReport]:
    """First chain (by qubit index) that is not aligned in `config`."""
    for i, chain in enumerate(embedded.chains):
        spins = embedded.chain_spins(config, i)
        if len(set(spins)) > 1:
            subset = tuple(node for node, s in zip(chain, spins) if s == 1)
            return DomainWallReport(
                qubit=i,
                subset=subset,
                positive=True,
                found_in_ground_state=True,
                witness_config=tuple(config.spins),
            )
    return None


def verify_no_domain_wall(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
                          strengths, max_physical: int = DEFAULT_MAX_PHYSICAL, workers: int = 1) -> DomainWallCheck:
    """
    Embed with chain couplers -|F_i| and check every physical ground state.

    Passes iff no ground state breaks a chain and the physical minimum minus
    the aligned chain offset equals the logical minimum.
    """
    magnitudes = per_qubit_strengths(strengths, problem.num_qubits)
    embedded = build_embedded(problem, hw, emb, dist, [-m for m in magnitudes], strict_sign=False)
    size = len(embedded.nodes)
    if size > max_physical:
        raise SizeCapError(f"Domain wall verification is capped at {max_physical} physical qubits, got {size}")

    logical = enumerate_ground_states(problem)
    physical = enumerate_ground_states(embedded.physical, max_qubits=max_physical, workers=workers)
    offset = embedded.offset
    energies_match = numbers_equal(physical.energy - offset, logical.energy)

    wall = None
    for config in physical.configs:
        wall = find_domain_wall(embedded, config)
        if wall is not None:
            break

    passed = energies_match and wall is None
    if passed:
        logger.debug(f"No domain wall in {len(physical.configs)} ground state(s)")
    else:
        logger.info(f"Domain wall verification failed (energies match: {energies_match}, wall: {wall})")
    return DomainWallCheck(
        passed=passed,
        logical_minimum=logical.energy,
        embedded_minimum=physical.energy,
        offset=offset,
        energies_match=energies_match,
        ground_states=len(physical.configs),
        domain_wall=wall,
    )


def isolated_chain(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
                   i: int, magnitude: Number) -> Tuple[IsingProblem, List[int]]:
    """
    Chain i alone plus one frozen spin per logical neighbour.

    Qubits 0..L-1 are the chain nodes in sorted order; qubit L + m is the
    node tau(j, i) of the m-th neighbour j. Returns the problem and the
    neighbour indices.
    """
    chain = emb.chains[i]
    position = {node: k for k, node in enumerate(chain)}
    neighbors = problem.neighbors(i)
    size = len(chain) + len(neighbors)

    zero = Fraction(0) if problem.exact else 0.0
    fields = [dist.values[i][node] for node in chain] + [zero] * len(neighbors)
    couplers = [(position[p], position[q], -magnitude) for p, q in chain_tree_edges(hw, emb, i)]
    for m, (j, value) in enumerate(neighbors):
        couplers.append((position[emb.tau(i, j)], len(chain) + m, value))
    return IsingProblem(size, tuple(fields), tuple(couplers)), [j for j, _ in neighbors]


def probe_tightness(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution, i: int,
                    witness: Optional[SubsetWitness], epsilon, strength=None,
                    max_physical: int = DEFAULT_MAX_PHYSICAL) -> ProbeResult:
    """
    Search external neighbour spins for which no aligned chain i is optimal.

    The chain strength magnitude is witness.value - epsilon / |dW| unless
    `strength` overrides it. Patterns are scanned in binary order and the
    first breaking one is reported; not found is exhaustive.
    """
    require_valid(problem, hw, emb)
    dist.validate(problem, emb, qubits=[i])
    zero = Fraction(0) if problem.exact else 0.0
    if witness is None or len(emb.chains[i]) <= 1:
        return ProbeResult(found=False, qubit=i, chain_strength=zero if strength is None else normalize(strength))

    if strength is None:
        magnitude = witness.value - divide(normalize(epsilon), witness.boundary_size)
    else:
        magnitude = normalize(strength)

    sub, neighbors = isolated_chain(problem, hw, emb, dist, i, magnitude)
    if sub.num_qubits > max_physical:
        raise SizeCapError(f"Tightness probe is capped at {max_physical} qubits, chain {i} needs {sub.num_qubits}")

    length = len(emb.chains[i])
    values, _ = energy_spectrum(sub)
    table = values.reshape(1 << len(neighbors), 1 << length)
    aligned = np.minimum(table[:, 0], table[:, -1])
    broken = table[:, 1:-1]
    best_broken = broken.min(axis=1)
    hits = np.flatnonzero(best_broken < aligned)
    logger.debug(f"Probe of qubit {i} at |F| = {magnitude}: {len(hits)} breaking pattern(s) of {len(table)}")

    if len(hits) == 0:
        return ProbeResult(found=False, qubit=i, chain_strength=magnitude, assignments_checked=len(table))

    pattern = int(hits[0])
    chain_index = int(np.argmin(broken[pattern])) + 1
    neighbor_spins = {j: (1 if (pattern >> m) & 1 else -1) for m, j in enumerate(neighbors)}
    chain_config = tuple(SpinConfig.from_index(chain_index, length).spins)
    return ProbeResult(
        found=True,
        qubit=i,
        chain_strength=magnitude,
        neighbor_spins=neighbor_spins,
        chain_config=chain_config,
        assignments_checked=pattern + 1,
    )


def majority_vote_decode(config: SpinConfig, embedded: EmbeddedIsing) -> MajorityVote:
    """Per chain, the sign of the spin sum; ties go to +1. Any disagreement flags the chain broken."""
    spins, broken, tied = [], [], []
    for i in range(len(embedded.chains)):
        chain_spins = embedded.chain_spins(config, i)
        total = sum(chain_spins)
        spins.append(1 if total >= 0 else -1)
        broken.append(len(set(chain_spins)) > 1)
        tied.append(total == 0)
    return MajorityVote(tuple(spins), tuple(broken), tuple(tied))


def majority_vote_batch(samples: np.ndarray, embedded: EmbeddedIsing) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised majority vote over a (samples x physical) spin matrix.

    Returns the (samples x logical) decoded spins and a per-sample flag that
    is True when any chain is broken.
    """
    samples = np.asarray(samples)
    logical = np.empty((samples.shape[0], len(embedded.chains)), dtype=np.int64)
    broken = np.zeros(samples.shape[0], dtype=bool)
    for i, chain in enumerate(embedded.chains):
        columns = samples[:, [embedded.position(node) for node in chain]]
        total = columns.sum(axis=1)
        logical[:, i] = np.where(total >= 0, 1, -1)
        broken |= np.abs(total) != len(chain)
    return logical, broken


def strengths_above(bounds: Dict[int, Number], epsilon) -> Dict[int, Number]:
    """Per-qubit magnitudes bound + epsilon."""
    epsilon = normalize(epsilon)
    return {i: value + epsilon for i, value in bounds.items()}
