"""
Logical Ising problems, spin configurations, energies and exhaustive ground states.

Energy convention: E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j.
Configuration encoding: spin s_i lives at bit i, bit value 1 means s_i = +1.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from errors import DimensionError, InstanceError, SizeCapError
from numeric import Number, integer_array, is_exact, normalize, parse_number, scale_to_integers, to_json_number

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUBITS = 24
DEFAULT_BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class IsingProblem:
    """Logical Ising problem with local fields h_i and couplers J_ij (i < j)."""
    num_qubits: int
    local_fields: Tuple[Number, ...]
    couplers: Tuple[Tuple[int, int, Number], ...] = ()

    def __post_init__(self):
        if self.num_qubits < 0:
            raise InstanceError(f"num_qubits must be non-negative, got {self.num_qubits}")
        fields = tuple(normalize(h) for h in self.local_fields)
        if len(fields) != self.num_qubits:
            raise InstanceError(f"Expected {self.num_qubits} local fields, got {len(fields)}")

        seen = set()
        couplers = []
        for entry in self.couplers:
            i, j, value = entry
            i, j = int(i), int(j)
            if i == j:
                raise InstanceError(f"Self-coupler on qubit {i}")
            if not (0 <= i < self.num_qubits and 0 <= j < self.num_qubits):
                raise InstanceError(f"Coupler ({i}, {j}) out of range for {self.num_qubits} qubits")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise InstanceError(f"Duplicate coupler ({i}, {j})")
            seen.add((i, j))
            couplers.append((i, j, normalize(value)))

        object.__setattr__(self, "local_fields", fields)
        object.__setattr__(self, "couplers", tuple(couplers))

    @property
    def exact(self) -> bool:
        return is_exact(self.local_fields) and is_exact(c[2] for c in self.couplers)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, j, _ in self.couplers]

    def coupling(self, i: int, j: int):
        a, b = (i, j) if i < j else (j, i)
        for p, q, value in self.couplers:
            if (p, q) == (a, b):
                return value
        return None

    def neighbors(self, i: int) -> List[Tuple[int, Number]]:
        """Neighbours of qubit i with the coupler value, sorted by neighbour index."""
        result = []
        for p, q, value in self.couplers:
            if p == i:
                result.append((q, value))
            elif q == i:
                result.append((p, value))
        return sorted(result, key=lambda item: item[0])

    def abs_coupling(self, i: int) -> Number:
        """Sum of |J_ij| over the neighbourhood of i."""
        return sum((abs(value) for _, value in self.neighbors(i)), Fraction(0) if self.exact else 0.0)

    def scaled(self, factor) -> "IsingProblem":
        factor = normalize(factor)
        return IsingProblem(
            self.num_qubits,
            tuple(h * factor for h in self.local_fields),
            tuple((i, j, value * factor) for i, j, value in self.couplers),
        )

    def with_negated_fields(self) -> "IsingProblem":
        return IsingProblem(self.num_qubits, tuple(-h for h in self.local_fields), self.couplers)

    def relabeled(self, permutation: Sequence[int]) -> "IsingProblem":
        """Qubit i of this problem becomes qubit permutation[i] of the result."""
        if sorted(permutation) != list(range(self.num_qubits)):
            raise DimensionError("Relabeling must be a permutation of the qubit indices")
        fields = [None] * self.num_qubits
        for i, h in enumerate(self.local_fields):
            fields[permutation[i]] = h
        couplers = tuple((permutation[i], permutation[j], value) for i, j, value in self.couplers)
        return IsingProblem(self.num_qubits, tuple(fields), couplers)

    def to_float(self) -> "IsingProblem":
        return IsingProblem(
            self.num_qubits,
            tuple(float(h) for h in self.local_fields),
            tuple((i, j, float(value)) for i, j, value in self.couplers),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = True) -> "IsingProblem":
        try:
            num_qubits = int(data["num_qubits"])
            fields = tuple(parse_number(h, exact) for h in data.get("h", [0] * num_qubits))
            couplers = tuple(
                (int(i), int(j), parse_number(value, exact)) for i, j, value in data.get("couplers", [])
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InstanceError(f"Malformed Ising problem: {e}") from e
        return cls(num_qubits, fields, couplers)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_qubits": self.num_qubits,
            "h": [to_json_number(h) for h in self.local_fields],
            "couplers": [[i, j, to_json_number(value)] for i, j, value in self.couplers],
        }


@dataclass(frozen=True)
class SpinConfig:
    """Assignment of +1/-1 to every qubit of a problem."""
    spins: Tuple[int, ...]

    def __post_init__(self):
        spins = tuple(int(s) for s in self.spins)
        for s in spins:
            if s not in (-1, 1):
                raise DimensionError(f"Spin values must be -1 or +1, got {s}")
        object.__setattr__(self, "spins", spins)

    def __len__(self) -> int:
        return len(self.spins)

    def __getitem__(self, index):
        return self.spins[index]

    def __iter__(self):
        return iter(self.spins)

    def __neg__(self) -> "SpinConfig":
        return SpinConfig(tuple(-s for s in self.spins))

    @property
    def index(self) -> int:
        return sum(1 << k for k, s in enumerate(self.spins) if s == 1)

    @classmethod
    def from_index(cls, index: int, num_qubits: int) -> "SpinConfig":
        return cls(tuple(1 if (index >> k) & 1 else -1 for k in range(num_qubits)))

    def relabeled(self, permutation: Sequence[int]) -> "SpinConfig":
        spins = [0] * len(self.spins)
        for i, s in enumerate(self.spins):
            spins[permutation[i]] = s
        return SpinConfig(tuple(spins))


@dataclass(frozen=True)
class GroundStateSet:
    """Minimum energy together with every configuration attaining it, in binary order."""
    energy: Number
    configs: Tuple[SpinConfig, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "energy": to_json_number(self.energy),
            "configs": [list(c.spins) for c in self.configs],
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[c.index, " ".join(f"{s:+d}" for s in c.spins)] for c in self.configs]
        return f"Ground states (energy {to_json_number(self.energy)})", ["Index", "Spins"], rows


def energy(problem: IsingProblem, config: SpinConfig) -> Number:
    """Evaluate sum h_i s_i + sum J_ij s_i s_j."""
    if len(config) != problem.num_qubits:
        raise DimensionError(
            f"Configuration has {len(config)} spins but the problem has {problem.num_qubits} qubits"
        )
    total = Fraction(0) if problem.exact else 0.0
    for h, s in zip(problem.local_fields, config.spins):
        total += h * s
    for i, j, value in problem.couplers:
        total += value * config.spins[i] * config.spins[j]
    return total


def spin_block(start: int, stop: int, num_qubits: int) -> np.ndarray:
    """Spin matrix for configuration indices [start, stop); row r is config start + r."""
    indices = np.arange(start, stop, dtype=np.int64)
    bits = (indices[:, None] >> np.arange(num_qubits, dtype=np.int64)) & 1
    return 2 * bits - 1


def energy_spectrum(problem: IsingProblem, start: int = 0, stop: int = None) -> Tuple[np.ndarray, int]:
    """
    Energies of configurations [start, stop) in binary order.

    Exact problems are evaluated on integers: the returned array holds
    energy * denominator as integers (int64, or Python ints when int64
    could overflow) and the denominator is returned alongside.
    Float problems return a float64 array and denominator 1.
    """
    n = problem.num_qubits
    if stop is None:
        stop = 1 << n
    spins = spin_block(start, stop, n)

    coefficients = list(problem.local_fields) + [value for _, _, value in problem.couplers]
    scaled = scale_to_integers(coefficients)
    if scaled is not None:
        integers, denominator = scaled
        coefficient_array = integer_array(integers, len(integers))
    else:
        denominator = 1
        coefficient_array = np.asarray([float(c) for c in coefficients], dtype=np.float64)
    dtype = coefficient_array.dtype

    fields = coefficient_array[:n]
    values = spins.astype(dtype) @ fields if n else np.zeros(len(spins), dtype=dtype)
    if problem.couplers:
        left = np.array([i for i, _, _ in problem.couplers], dtype=np.int64)
        right = np.array([j for _, j, _ in problem.couplers], dtype=np.int64)
        weights = coefficient_array[n:]
        values = values + (spins[:, left] * spins[:, right]).astype(dtype) @ weights
    return values, denominator


def _block_minimum(problem: IsingProblem, start: int, stop: int):
    values, denominator = energy_spectrum(problem, start, stop)
    best = values.min()
    indices = np.flatnonzero(values == best) + start
    return best, indices, denominator


def enumerate_ground_states(problem: IsingProblem,
                            max_qubits: int = DEFAULT_MAX_QUBITS,
                            block_size: int = DEFAULT_BLOCK_SIZE,
                            workers: int = 1) -> GroundStateSet:
    """Exhaustively find the minimum energy and all minimising configurations."""
    n = problem.num_qubits
    if n > max_qubits:
        raise SizeCapError(f"Exhaustive enumeration capped at {max_qubits} qubits, problem has {n}")

    total = 1 << n
    blocks = [(start, min(start + block_size, total)) for start in range(0, total, block_size)]
    logger.debug(f"Enumerating {total} configurations in {len(blocks)} blocks with {workers} worker(s)")

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _block_minimum(problem, *b), blocks))
    else:
        results = [_block_minimum(problem, *b) for b in blocks]

    best = min(r[0] for r in results)
    denominator = results[0][2]
    indices = [int(k) for r in results if r[0] == best for k in r[1]]

    if problem.exact:
        minimum = Fraction(int(best), denominator)
    else:
        minimum = float(best)
    configs = tuple(SpinConfig.from_index(k, n) for k in indices)
    return GroundStateSet(minimum, configs)
