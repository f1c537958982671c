"""
Minor embeddings (iota, tau) of a logical Ising problem into a hardware graph.

A chain iota(i) is the set of physical nodes representing logical qubit i.
tau(i, j) is the node of chain i that carries the logical coupler J_ij.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from errors import ConstraintError, EmbeddingValidationError, InstanceError, SignError
from ising import IsingProblem, SpinConfig
from models import EmbeddingIssue, ValidationReport
from numeric import Number, divide, normalize, numbers_equal, parse_number, sgn, to_json_number

logger = logging.getLogger(__name__)

STRATEGIES = ("uniform", "choi2", "single", "custom")


@dataclass(frozen=True)
class HardwareGraph:
    """Physical graph U: undirected edges stored as (p, q) with p < q."""
    num_nodes: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        edges = []
        for p, q in self.edges:
            p, q = int(p), int(q)
            if p == q:
                raise InstanceError(f"Self-loop on hardware node {p}")
            if not (0 <= p < self.num_nodes and 0 <= q < self.num_nodes):
                raise InstanceError(f"Hardware edge ({p}, {q}) out of range for {self.num_nodes} nodes")
            if p > q:
                p, q = q, p
            if (p, q) in seen:
                raise InstanceError(f"Duplicate hardware edge ({p}, {q})")
            seen.add((p, q))
            edges.append((p, q))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "_edge_set", frozenset(seen))

    def has_edge(self, p: int, q: int) -> bool:
        return (min(p, q), max(p, q)) in self._edge_set

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_nodes))
        graph.add_edges_from(self.edges)
        return graph

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HardwareGraph":
        try:
            return cls(int(data["num_nodes"]), tuple((int(p), int(q)) for p, q in data.get("edges", [])))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InstanceError):
                raise
            raise InstanceError(f"Malformed hardware graph: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {"num_nodes": self.num_nodes, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class MinorEmbedding:
    """Chains per logical qubit and the logical-edge to physical-edge map."""
    chains: Tuple[Tuple[int, ...], ...]
    edge_map: Mapping[Tuple[int, int], Tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        chains = tuple(tuple(sorted(int(p) for p in chain)) for chain in self.chains)
        edge_map = {}
        for (i, j), (tau_ij, tau_ji) in dict(self.edge_map).items():
            i, j, tau_ij, tau_ji = int(i), int(j), int(tau_ij), int(tau_ji)
            if i > j:
                i, j, tau_ij, tau_ji = j, i, tau_ji, tau_ij
            edge_map[(i, j)] = (tau_ij, tau_ji)
        object.__setattr__(self, "chains", chains)
        object.__setattr__(self, "edge_map", edge_map)

    @property
    def num_physical(self) -> int:
        return sum(len(chain) for chain in self.chains)

    def tau(self, i: int, j: int) -> Optional[int]:
        """Node of chain i coupled to chain j, or None when (i, j) is unmapped."""
        if i < j:
            pair = self.edge_map.get((i, j))
            return pair[0] if pair else None
        pair = self.edge_map.get((j, i))
        return pair[1] if pair else None

    def owner(self, node: int) -> Optional[int]:
        for i, chain in enumerate(self.chains):
            if node in chain:
                return i
        return None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MinorEmbedding":
        try:
            chains = tuple(tuple(int(p) for p in chain) for chain in data["chains"])
            edge_map = {(int(i), int(j)): (int(a), int(b)) for i, j, a, b in data.get("edge_map", [])}
        except (KeyError, TypeError, ValueError) as e:
            raise InstanceError(f"Malformed embedding: {e}") from e
        return cls(chains, edge_map)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "chains": [list(chain) for chain in self.chains],
            "edge_map": [[i, j, a, b] for (i, j), (a, b) in sorted(self.edge_map.items())],
        }


@dataclass(frozen=True)
class HFieldDistribution:
    """Per logical qubit, the split of h_i over the nodes of its chain."""
    values: Mapping[int, Mapping[int, Number]]
    strategy: str = "custom"
    fallbacks: Tuple[int, ...] = ()
    mixed_sign: Tuple[int, ...] = ()

    def for_qubit(self, i: int) -> Dict[int, Number]:
        return dict(self.values[i])

    def vector(self, i: int, chain: Sequence[int]) -> List[Number]:
        entries = self.values[i]
        return [entries[node] for node in chain]

    def merged(self, other: "HFieldDistribution") -> "HFieldDistribution":
        values = {i: dict(v) for i, v in self.values.items()}
        values.update({i: dict(v) for i, v in other.values.items()})
        return HFieldDistribution(values, strategy=other.strategy, fallbacks=self.fallbacks + other.fallbacks,
                                  mixed_sign=self.mixed_sign + other.mixed_sign)

    def validate(self, problem: IsingProblem, emb: MinorEmbedding, qubits: Optional[Sequence[int]] = None) -> None:
        """Raise ConstraintError unless every listed chain sums exactly to h_i."""
        for i in (range(problem.num_qubits) if qubits is None else qubits):
            if i not in self.values:
                raise ConstraintError(f"No field distribution given for logical qubit {i}")
            entries = self.values[i]
            if set(entries) != set(emb.chains[i]):
                raise ConstraintError(
                    f"Distribution nodes {sorted(entries)} do not match chain {list(emb.chains[i])} of qubit {i}"
                )
            total = sum(entries.values(), Fraction(0))
            if not numbers_equal(total, problem.local_fields[i]):
                raise ConstraintError(
                    f"Field distribution of qubit {i} sums to {total}, expected h_i = {problem.local_fields[i]}"
                )

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = True) -> "HFieldDistribution":
        try:
            values = {
                int(i): {int(node): parse_number(value, exact) for node, value in entries}
                for i, entries in data["h_dist"].items()
            }
            fallbacks = tuple(int(i) for i in data.get("fallbacks", ()))
            mixed_sign = tuple(int(i) for i in data.get("mixed_sign", ()))
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise InstanceError(f"Malformed field distribution: {e}") from e
        return cls(values, strategy=data.get("strategy", "custom"), fallbacks=fallbacks, mixed_sign=mixed_sign)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "h_dist": {
                str(i): [[node, to_json_number(value)] for node, value in sorted(entries.items())]
                for i, entries in sorted(self.values.items())
            },
            "fallbacks": list(self.fallbacks),
            "mixed_sign": list(self.mixed_sign),
        }


@dataclass(frozen=True)
class EmbeddedIsing:
    """
    Physical Ising problem over the nodes used by the embedding.

    Physical qubit k of `physical` is hardware node nodes[k].
    """
    physical: IsingProblem
    nodes: Tuple[int, ...]
    chains: Tuple[Tuple[int, ...], ...]
    chain_edges: Tuple[Tuple[Tuple[int, int, Number], ...], ...]
    logical_edges: Mapping[Tuple[int, int], Tuple[int, int]]

    def position(self, node: int) -> int:
        return self.nodes.index(node)

    @property
    def offset(self) -> Number:
        """Energy of all chain couplers when every chain is aligned."""
        return sum((value for edges in self.chain_edges for _, _, value in edges), Fraction(0))

    def lift(self, config: SpinConfig) -> SpinConfig:
        """Chain-homogeneous physical configuration for a logical configuration."""
        spins = [0] * len(self.nodes)
        for i, chain in enumerate(self.chains):
            for node in chain:
                spins[self.position(node)] = config[i]
        return SpinConfig(tuple(spins))

    def chain_spins(self, config: SpinConfig, i: int) -> List[int]:
        return [config[self.position(node)] for node in self.chains[i]]

    def scaled_to_cap(self, cap) -> Tuple["EmbeddedIsing", Number]:
        """Rescale the whole Hamiltonian so every coupler magnitude is at most `cap`."""
        largest = max([abs(value) for _, _, value in self.physical.couplers], default=0)
        if cap is None or largest <= cap or largest == 0:
            return self, 1
        factor = normalize(cap) / largest
        chain_edges = tuple(tuple((p, q, value * factor) for p, q, value in edges) for edges in self.chain_edges)
        logger.debug(f"Rescaling embedded problem by {factor} to respect coupling cap {cap}")
        return EmbeddedIsing(self.physical.scaled(factor), self.nodes, self.chains, chain_edges,
                             self.logical_edges), factor


def chain_tree_edges(hw: HardwareGraph, emb: MinorEmbedding, i: int) -> List[Tuple[int, int]]:
    """Hardware edges induced by chain i, sorted."""
    chain = set(emb.chains[i])
    return sorted((p, q) for p, q in hw.edges if p in chain and q in chain)


def leaf_count(hw: HardwareGraph, emb: MinorEmbedding, i: int) -> int:
    """Number of leaves l(i) of the chain tree; a single-node chain counts as one leaf."""
    chain = emb.chains[i]
    if len(chain) <= 1:
        return 1
    degree = {node: 0 for node in chain}
    for p, q in chain_tree_edges(hw, emb, i):
        degree[p] += 1
        degree[q] += 1
    return sum(1 for d in degree.values() if d == 1)


def leaves(hw: HardwareGraph, emb: MinorEmbedding, i: int) -> List[int]:
    chain = emb.chains[i]
    if len(chain) <= 1:
        return list(chain)
    degree = {node: 0 for node in chain}
    for p, q in chain_tree_edges(hw, emb, i):
        degree[p] += 1
        degree[q] += 1
    return [node for node in chain if degree[node] == 1]


def validate_embedding(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding) -> ValidationReport:
    """Check the minor-embedding conditions and report every violation found."""
    issues: List[EmbeddingIssue] = []

    if len(emb.chains) != problem.num_qubits:
        issues.append(EmbeddingIssue(
            kind="chain_count_mismatch", qubits=[],
            description="Number of chains differs from number of logical qubits",
            details=f"{len(emb.chains)} chains for {problem.num_qubits} logical qubits",
        ))

    graph = hw.to_networkx()
    owners: Dict[int, int] = {}
    for i, chain in enumerate(emb.chains):
        if not chain:
            issues.append(EmbeddingIssue("empty_chain", [i], f"Chain of qubit {i} is empty", ""))
            continue
        out_of_range = [p for p in chain if not 0 <= p < hw.num_nodes]
        if out_of_range:
            issues.append(EmbeddingIssue(
                "node_out_of_range", [i], f"Chain of qubit {i} uses unknown hardware nodes",
                f"nodes {out_of_range} not in [0, {hw.num_nodes})",
            ))
            continue
        for p in chain:
            if p in owners:
                issues.append(EmbeddingIssue(
                    "chain_overlap", sorted([owners[p], i]),
                    f"Chains of qubits {owners[p]} and {i} overlap",
                    f"hardware node {p} is shared",
                ))
            else:
                owners[p] = i

        sub = graph.subgraph(chain)
        if not nx.is_connected(sub):
            issues.append(EmbeddingIssue(
                "chain_disconnected", [i], f"Chain of qubit {i} is disconnected",
                f"components {[sorted(c) for c in nx.connected_components(sub)]}",
            ))
        elif not nx.is_tree(sub):
            issues.append(EmbeddingIssue(
                "chain_not_tree", [i], f"Chain of qubit {i} contains a cycle",
                f"{sub.number_of_edges()} induced edges on {len(chain)} nodes",
            ))

    for i, j, _ in problem.couplers:
        if (i, j) not in emb.edge_map:
            issues.append(EmbeddingIssue(
                "unmapped_logical_edge", [i, j], f"Logical edge ({i}, {j}) has no physical edge", "",
            ))
            continue
        tau_ij, tau_ji = emb.edge_map[(i, j)]
        if i < len(emb.chains) and tau_ij not in emb.chains[i]:
            issues.append(EmbeddingIssue(
                "tau_outside_chain", [i, j], f"tau({i},{j}) is not in the chain of qubit {i}", f"node {tau_ij}",
            ))
        if j < len(emb.chains) and tau_ji not in emb.chains[j]:
            issues.append(EmbeddingIssue(
                "tau_outside_chain", [i, j], f"tau({j},{i}) is not in the chain of qubit {j}", f"node {tau_ji}",
            ))
        if not hw.has_edge(tau_ij, tau_ji):
            issues.append(EmbeddingIssue(
                "missing_hardware_edge", [i, j], f"Logical edge ({i}, {j}) maps to a non-edge",
                f"hardware has no edge ({tau_ij}, {tau_ji})",
            ))

    logical_edges = set(problem.edges)
    for (i, j) in emb.edge_map:
        if (i, j) not in logical_edges:
            issues.append(EmbeddingIssue(
                "extra_edge_map_entry", [i, j], f"Edge map entry ({i}, {j}) is not a logical coupler", "",
            ))

    report = ValidationReport(valid=not issues, issues=issues)
    logger.debug(f"Embedding validation finished with {len(issues)} issue(s)")
    return report


def require_valid(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding) -> None:
    report = validate_embedding(problem, hw, emb)
    if not report.valid:
        summary = "; ".join(issue.description for issue in report.issues)
        raise EmbeddingValidationError(f"Invalid minor embedding: {summary}", report)


def external_field_sums(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding) -> Dict[int, Dict[int, Number]]:
    """Per logical qubit i and node k of its chain, J_{i(k)} = sum of |J_ij| over edges landing on k."""
    require_valid(problem, hw, emb)
    zero = Fraction(0) if problem.exact else 0.0
    sums = {i: {node: zero for node in chain} for i, chain in enumerate(emb.chains)}
    for i, j, value in problem.couplers:
        tau_ij, tau_ji = emb.edge_map[(i, j)]
        sums[i][tau_ij] += abs(value)
        sums[j][tau_ji] += abs(value)
    return sums


def distribute_fields(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, strategy: str = "choi2",
                      roots: Optional[Mapping[int, int]] = None,
                      custom: Optional[Mapping[int, Mapping[int, Number]]] = None) -> HFieldDistribution:
    """
    Split every h_i over its chain.

    uniform: equal shares; single: everything on the root node (first chain
    node unless `roots` names one); choi2: Choi's leaf-corrected split, with
    a per-qubit fallback to uniform when C(i) < 0; custom: caller supplied.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown distribution strategy '{strategy}', expected one of {STRATEGIES}")
    require_valid(problem, hw, emb)

    if strategy == "custom":
        if custom is None:
            raise ConstraintError("The custom strategy requires explicit per-node values")
        dist = HFieldDistribution({int(i): {int(k): normalize(v) for k, v in entries.items()}
                                   for i, entries in custom.items()}, strategy="custom")
        dist.validate(problem, emb)
        return dist

    j_sums = external_field_sums(problem, hw, emb) if strategy == "choi2" else None
    values: Dict[int, Dict[int, Number]] = {}
    fallbacks: List[int] = []
    for i, chain in enumerate(emb.chains):
        h_i = problem.local_fields[i]
        if strategy == "single":
            root = (roots or {}).get(i, chain[0])
            if root not in chain:
                raise ConstraintError(f"Root node {root} is not in the chain of qubit {i}")
            values[i] = {node: (h_i if node == root else h_i * 0) for node in chain}
        elif strategy == "choi2":
            c_i = problem.abs_coupling(i) - abs(h_i)
            if c_i < 0:
                logger.warning(f"Qubit {i} is locally determinable (C = {c_i}); using the uniform split instead of choi2")
                fallbacks.append(i)
                values[i] = {node: divide(h_i, len(chain)) for node in chain}
                continue
            leaf_set = set(leaves(hw, emb, i))
            share = divide(c_i, leaf_count(hw, emb, i))
            values[i] = {
                node: sgn(h_i) * (j_sums[i][node] - (share if node in leaf_set else 0))
                for node in chain
            }
        else:
            values[i] = {node: divide(h_i, len(chain)) for node in chain}

    dist = HFieldDistribution(values, strategy=strategy, fallbacks=tuple(fallbacks))
    dist.validate(problem, emb)
    return dist


def per_qubit_strengths(strength: Union[Number, Sequence[Number], Mapping[int, Number]], count: int) -> List[Number]:
    if isinstance(strength, Mapping):
        return [normalize(strength[i]) for i in range(count)]
    if isinstance(strength, (list, tuple)):
        if len(strength) != count:
            raise ValueError(f"Expected {count} chain strengths, got {len(strength)}")
        return [normalize(s) for s in strength]
    return [normalize(strength)] * count


def build_embedded(problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding, dist: HFieldDistribution,
                   chain_strength, strict_sign: bool = True) -> EmbeddedIsing:
    """
    Embedded Ising problem with chain couplers F_i (negative) on every chain edge.

    With strict_sign=False the oracle may build zero or positive chain couplers.
    """
    require_valid(problem, hw, emb)
    dist.validate(problem, emb)
    strengths = per_qubit_strengths(chain_strength, problem.num_qubits)

    nodes = tuple(sorted(node for chain in emb.chains for node in chain))
    position = {node: k for k, node in enumerate(nodes)}

    fields = [None] * len(nodes)
    couplers = []
    chain_edges = []
    for i, chain in enumerate(emb.chains):
        for node in chain:
            fields[position[node]] = dist.values[i][node]
        edges = chain_tree_edges(hw, emb, i)
        if edges and strict_sign and strengths[i] >= 0:
            raise SignError(f"Chain strength of qubit {i} must be negative, got {strengths[i]}")
        chain_edges.append(tuple((p, q, strengths[i]) for p, q in edges))
        couplers.extend((position[p], position[q], strengths[i]) for p, q in edges)

    logical_edges = {}
    for i, j, value in problem.couplers:
        tau_ij, tau_ji = emb.edge_map[(i, j)]
        couplers.append((position[tau_ij], position[tau_ji], value))
        logical_edges[(i, j)] = (tau_ij, tau_ji)

    physical = IsingProblem(len(nodes), tuple(fields), tuple(couplers))
    return EmbeddedIsing(physical, nodes, emb.chains, tuple(chain_edges), logical_edges)


def minor_embedding_energy(embedded: EmbeddedIsing) -> Number:
    """Sum of |F| over every chain edge."""
    return sum((abs(value) for edges in embedded.chain_edges for _, _, value in edges), Fraction(0))
