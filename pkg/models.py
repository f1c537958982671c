"""
Report data models shared by the embedding, bounds and oracle modules.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from numeric import Number, to_json_number


@dataclass
class EmbeddingIssue:
    """One violated minor-embedding condition."""
    kind: str                  # Machine-readable category, e.g. "chain_overlap"
    qubits: List[int]          # Logical qubits involved
    description: str           # Brief description of the issue
    details: str               # Offending nodes / edges

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "qubits": self.qubits,
            "description": self.description,
            "details": self.details,
        }


@dataclass
class ValidationReport:
    valid: bool
    issues: List[EmbeddingIssue] = field(default_factory=list)

    def kinds(self) -> List[str]:
        return [issue.kind for issue in self.issues]

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.valid, "issues": [issue.to_dict() for issue in self.issues]}

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[issue.kind, ", ".join(map(str, issue.qubits)), issue.description, issue.details]
                for issue in self.issues]
        title = "Embedding is valid" if self.valid else "Embedding validation issues"
        return title, ["Kind", "Qubits", "Description", "Details"], rows


@dataclass(frozen=True)
class SubsetWitness:
    """A proper nonempty subset W of a chain with its candidate bound M(W; h, J)."""
    qubit: int
    subset: Tuple[int, ...]    # Physical nodes in W
    mask: int                  # Bit k set when the k-th chain node (sorted) is in W
    boundary_size: int         # |dW|, chain-tree edges crossing W
    h_sum: Number              # h(W)
    j_sum: Number              # J(W)
    value: Number              # min(|h(W) - J(W)|, |h(W) - h_i - J(complement)|) / |dW|

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subset": list(self.subset),
            "boundary": self.boundary_size,
            "hW": to_json_number(self.h_sum),
            "JW": to_json_number(self.j_sum),
            "value": to_json_number(self.value),
        }


@dataclass
class QubitBounds:
    """All bounds for one logical qubit."""
    qubit: int
    chain_size: int
    leaves: int
    c_value: Number
    locally_determinable: bool
    choi1: Number
    choi2: Optional[Number]
    tight: Number
    witness: Optional[SubsetWitness]
    certified: bool
    distribution: Dict[int, Number]
    optimized_bound: Optional[Number] = None
    optimized_distribution: Optional[Dict[int, Number]] = None
    admissible_at: List[Tuple[Number, Optional["AdmissibilityViolation"]]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "C": to_json_number(self.c_value),
            "l": self.leaves,
            "locally_determinable": self.locally_determinable,
            "choi1": to_json_number(self.choi1),
            "choi2": None if self.choi2 is None else to_json_number(self.choi2),
            "tight": to_json_number(self.tight),
            "witness": None if self.witness is None else {
                "subset": list(self.witness.subset),
                "boundary": self.witness.boundary_size,
            },
            "certified": self.certified,
            "h_dist": [to_json_number(self.distribution[node]) for node in sorted(self.distribution)],
        }
        if self.optimized_bound is not None:
            data["optimized"] = {
                "bound": to_json_number(self.optimized_bound),
                "h_dist": [to_json_number(self.optimized_distribution[node])
                           for node in sorted(self.optimized_distribution)],
            }
        if self.admissible_at:
            data["admissible_at"] = [
                {"F": to_json_number(strength),
                 "violated": None if worst is None else list(worst.subset)}
                for strength, worst in self.admissible_at
            ]
        return data


@dataclass
class ChainBoundReport:
    """Per-qubit bound summary for a whole embedded problem."""
    strategy: str
    qubits: List[QubitBounds]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "qubits": {str(q.qubit): q.to_dict() for q in self.qubits},
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        headers = ["Qubit", "Chain", "C", "Choi-1", "Choi-2", "Tight", "Witness", "Certified", "Optimized"]
        rows = []
        for q in self.qubits:
            rows.append([
                q.qubit,
                q.chain_size,
                to_json_number(q.c_value),
                to_json_number(q.choi1),
                "-" if q.choi2 is None else to_json_number(q.choi2),
                to_json_number(q.tight),
                "-" if q.witness is None else "{" + ", ".join(map(str, q.witness.subset)) + "}",
                "yes" if q.certified else "no",
                "-" if q.optimized_bound is None else to_json_number(q.optimized_bound),
            ])
        return f"Chain strength bounds ({self.strategy} distribution)", headers, rows


@dataclass(frozen=True)
class AdmissibilityViolation:
    """A subset with C(W) = J(W) + |dW| F - |h(W)| < 0."""
    qubit: int
    subset: Tuple[int, ...]
    boundary_size: int
    slack: Number

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubit": self.qubit,
            "subset": list(self.subset),
            "boundary": self.boundary_size,
            "slack": to_json_number(self.slack),
        }


@dataclass
class AdmissibilityReport:
    admissible: bool
    violations: List[AdmissibilityViolation] = field(default_factory=list)
    minimum_strength: Dict[int, Number] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "admissible": self.admissible,
            "violations": [v.to_dict() for v in self.violations],
            "minimum_strength": {str(i): to_json_number(v) for i, v in sorted(self.minimum_strength.items())},
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[v.qubit, "{" + ", ".join(map(str, v.subset)) + "}", v.boundary_size, to_json_number(v.slack)]
                for v in self.violations]
        title = "Embedding is admissible" if self.admissible else "Admissibility violations"
        return title, ["Qubit", "Subset", "Boundary", "Slack C(W)"], rows


@dataclass(frozen=True)
class DomainWallReport:
    """A broken chain found in a ground state of the embedded problem."""
    qubit: int
    subset: Tuple[int, ...]    # Nodes of the chain aligned together
    positive: bool             # True when the spins inside `subset` are +1
    found_in_ground_state: bool
    witness_config: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubit": self.qubit,
            "subset": list(self.subset),
            "positive": self.positive,
            "found_in_ground_state": self.found_in_ground_state,
            "witness_config": list(self.witness_config),
        }


@dataclass
class DomainWallCheck:
    passed: bool
    logical_minimum: Number
    embedded_minimum: Number
    offset: Number
    energies_match: bool
    ground_states: int
    domain_wall: Optional[DomainWallReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "logical_minimum": to_json_number(self.logical_minimum),
            "embedded_minimum": to_json_number(self.embedded_minimum),
            "offset": to_json_number(self.offset),
            "energies_match": self.energies_match,
            "ground_states": self.ground_states,
            "domain_wall": None if self.domain_wall is None else self.domain_wall.to_dict(),
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [
            ["passed", self.passed],
            ["logical minimum", to_json_number(self.logical_minimum)],
            ["embedded minimum", to_json_number(self.embedded_minimum)],
            ["chain offset", to_json_number(self.offset)],
            ["energies match", self.energies_match],
            ["ground states", self.ground_states],
        ]
        if self.domain_wall is not None:
            rows.append(["domain wall", f"qubit {self.domain_wall.qubit}: {list(self.domain_wall.subset)}"])
        return "No-domain-wall verification", ["Check", "Value"], rows


@dataclass
class ProbeResult:
    found: bool
    qubit: int
    chain_strength: Number
    neighbor_spins: Dict[int, int] = field(default_factory=dict)
    chain_config: Tuple[int, ...] = ()
    assignments_checked: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "found": self.found,
            "qubit": self.qubit,
            "chain_strength": to_json_number(self.chain_strength),
            "neighbor_spins": {str(j): s for j, s in sorted(self.neighbor_spins.items())},
            "chain_config": list(self.chain_config),
            "assignments_checked": self.assignments_checked,
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [
            ["found", self.found],
            ["qubit", self.qubit],
            ["chain strength", to_json_number(self.chain_strength)],
            ["neighbor spins", ", ".join(f"{j}:{s:+d}" for j, s in sorted(self.neighbor_spins.items())) or "-"],
            ["breaking chain config", list(self.chain_config) or "-"],
        ]
        return "Tightness probe", ["Field", "Value"], rows


@dataclass
class MajorityVote:
    """Logical configuration decoded from chain spins, with per-chain flags."""
    spins: Tuple[int, ...]
    broken: Tuple[bool, ...]
    tied: Tuple[bool, ...]

    @property
    def any_broken(self) -> bool:
        return any(self.broken)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spins": list(self.spins),
            "broken": [i for i, flag in enumerate(self.broken) if flag],
            "tied": [i for i, flag in enumerate(self.tied) if flag],
        }
