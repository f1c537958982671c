"""
Job-shop scheduling as a time-indexed penalty Hamiltonian.

x_{n,k,t} = 1 means operation k of job n starts at time t, for t in [0, T).
H_T = E * (h1 + h2 + h3 + h4):
    h1  every operation starts exactly once, (sum_t x - 1)^2
    h2  consecutive operations of a job keep their order, t + tau_{n,k} > t'
    h3  last operations finish by T, t + tau > T
    h4  operations sharing a machine do not overlap and do not start together
        unless one of them has zero duration
The QUBO is mapped to Ising spins through x = (1 + s) / 2 with the constant
tracked as `offset`, so qubo(x) = energy(problem, s) + offset exactly.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from bounds import c_value
from errors import DimensionError, InstanceError
from ising import IsingProblem, SpinConfig
from numeric import Number, normalize, numbers_equal, parse_number, to_json_number

logger = logging.getLogger(__name__)

Operation = Tuple[int, int]
Variable = Tuple[int, int, int]


@dataclass(frozen=True)
class JspInstance:
    """N jobs of K operations each, with machine and duration tables."""
    machines: Tuple[Tuple[int, ...], ...]
    durations: Tuple[Tuple[int, ...], ...]
    timespan: int
    energy_scale: Number = Fraction(1)

    def __post_init__(self):
        machines = tuple(tuple(int(m) for m in row) for row in self.machines)
        durations = tuple(tuple(int(d) for d in row) for row in self.durations)
        if not machines:
            raise InstanceError("A job-shop instance needs at least one job")
        width = len(machines[0])
        if width == 0 or any(len(row) != width for row in machines):
            raise InstanceError("Every job must have the same positive number of operations")
        if len(durations) != len(machines) or any(len(row) != width for row in durations):
            raise InstanceError("Duration table does not match the machine table")
        if any(m < 0 for row in machines for m in row):
            raise InstanceError("Machine indices must be non-negative")
        if any(d < 0 for row in durations for d in row):
            raise InstanceError("Durations must be non-negative")
        if int(self.timespan) < 1:
            raise InstanceError(f"Timespan must be at least 1, got {self.timespan}")
        scale = normalize(self.energy_scale)
        if scale <= 0:
            raise InstanceError(f"Energy scale must be positive, got {self.energy_scale}")
        object.__setattr__(self, "machines", machines)
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "timespan", int(self.timespan))
        object.__setattr__(self, "energy_scale", scale)

    @property
    def num_jobs(self) -> int:
        return len(self.machines)

    @property
    def ops_per_job(self) -> int:
        return len(self.machines[0])

    @property
    def num_machines(self) -> int:
        return max(m for row in self.machines for m in row) + 1

    @property
    def operations(self) -> List[Operation]:
        return [(n, k) for n in range(self.num_jobs) for k in range(self.ops_per_job)]

    @property
    def num_variables(self) -> int:
        return self.num_jobs * self.ops_per_job * self.timespan

    def duration(self, op: Operation) -> int:
        return self.durations[op[0]][op[1]]

    def machine(self, op: Operation) -> int:
        return self.machines[op[0]][op[1]]

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = True) -> "JspInstance":
        try:
            return cls(
                machines=tuple(tuple(row) for row in data["machines"]),
                durations=tuple(tuple(row) for row in data["durations"]),
                timespan=int(data["timespan"]),
                energy_scale=parse_number(data.get("energy_scale", 1), exact),
            )
        except (KeyError, TypeError) as e:
            raise InstanceError(f"Malformed job-shop instance: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "machines": [list(row) for row in self.machines],
            "durations": [list(row) for row in self.durations],
            "timespan": self.timespan,
            "energy_scale": to_json_number(self.energy_scale),
        }


@dataclass(frozen=True)
class PenaltyTerm:
    """One unit penalty: fires when every listed variable is 1."""
    family: str
    variables: Tuple[Variable, ...]


@dataclass
class JspEncoding:
    instance: JspInstance
    index: Dict[Variable, int]
    problem: IsingProblem
    offset: Number
    linear: Dict[int, Number]
    quadratic: Dict[Tuple[int, int], Number]
    constant: Number
    terms: List[PenaltyTerm] = field(default_factory=list)

    def variable(self, n: int, k: int, t: int) -> int:
        return self.index[(n, k, t)]

    def qubo_value(self, bits: Sequence[int]) -> Number:
        """H_T evaluated directly on a 0/1 assignment in flat variable order."""
        if len(bits) != len(self.index):
            raise DimensionError(f"Expected {len(self.index)} bits, got {len(bits)}")
        total = self.constant
        for v, a in self.linear.items():
            total += a * bits[v]
        for (u, v), b in self.quadratic.items():
            total += b * bits[u] * bits[v]
        return total


@dataclass
class Schedule:
    starts: Tuple[Tuple[int, ...], ...]
    makespan: int

    def to_dict(self) -> Dict[str, Any]:
        return {"starts": [list(row) for row in self.starts], "makespan": self.makespan}


@dataclass
class Violation:
    family: str
    variables: List[Variable]
    description: str

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "variables": [list(v) for v in self.variables],
                "description": self.description}


@dataclass
class JspDecoding:
    schedule: Optional[Schedule]
    violations: List[Violation]

    @property
    def feasible(self) -> bool:
        return self.schedule is not None and not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feasible": self.feasible,
            "schedule": None if self.schedule is None else self.schedule.to_dict(),
            "violations": [v.to_dict() for v in self.violations],
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        rows = [[v.family, v.description] for v in self.violations]
        if self.schedule is not None:
            for n, row in enumerate(self.schedule.starts):
                rows.append(["start", f"job {n}: " + ", ".join(map(str, row))])
            rows.append(["makespan", self.schedule.makespan])
        title = "Feasible schedule" if self.feasible else "Infeasible assignment"
        return title, ["Item", "Detail"], rows


@dataclass
class GapReport:
    energy_scale: Number
    c_values: Dict[Variable, Number]
    expected_c: Number
    rule_value: Number
    measured_rule_value: Number

    @property
    def matches(self) -> Dict[Variable, bool]:
        return {v: numbers_equal(c, self.expected_c) for v, c in self.c_values.items()}

    def to_dict(self) -> Dict[str, Any]:
        values = list(self.c_values.values())
        matches = self.matches
        return {
            "energy_scale": to_json_number(self.energy_scale),
            "expected_C": to_json_number(self.expected_c),
            "C": [{"variable": list(v), "C": to_json_number(c), "matches": matches[v]}
                  for v, c in self.c_values.items()],
            "min_C": to_json_number(min(values)),
            "max_C": to_json_number(max(values)),
            "matching": sum(matches.values()),
            "rule_value": to_json_number(self.rule_value),
            "measured_rule_value": to_json_number(self.measured_rule_value),
        }

    def table(self) -> Tuple[str, List[str], List[List[Any]]]:
        matches = self.matches
        rows = [[f"x[{n},{k},{t}]", to_json_number(c), "yes" if matches[(n, k, t)] else "no"]
                for (n, k, t), c in self.c_values.items()]
        rows.append(["rule (C + E) / 2", to_json_number(self.rule_value), ""])
        return "Job-shop gap quantities", ["Variable", "C", "C = E/2"], rows


def machine_conflict(t_a: int, tau_a: int, t_b: int, tau_b: int) -> bool:
    """Start inside the other's run, or a joint start when both have positive duration."""
    if t_a == t_b:
        return tau_a > 0 and tau_b > 0
    if t_a < t_b:
        return t_b - t_a < tau_a
    return t_a - t_b < tau_b


def penalty_terms(instance: JspInstance) -> List[PenaltyTerm]:
    """Unit penalties of the h2, h3 and h4 families, in deterministic order."""
    T = instance.timespan
    K = instance.ops_per_job
    terms: List[PenaltyTerm] = []

    for n in range(instance.num_jobs):
        for k in range(K - 1):
            tau = instance.durations[n][k]
            for t in range(T):
                for t2 in range(T):
                    if t + tau > t2:
                        terms.append(PenaltyTerm("h2", ((n, k, t), (n, k + 1, t2))))

    for n in range(instance.num_jobs):
        tau = instance.durations[n][K - 1]
        for t in range(T):
            if t + tau > T:
                terms.append(PenaltyTerm("h3", ((n, K - 1, t),)))

    operations = instance.operations
    for a, b in itertools.combinations(operations, 2):
        if instance.machine(a) != instance.machine(b):
            continue
        tau_a, tau_b = instance.duration(a), instance.duration(b)
        for t in range(T):
            for t2 in range(T):
                if machine_conflict(t, tau_a, t2, tau_b):
                    terms.append(PenaltyTerm("h4", ((a[0], a[1], t), (b[0], b[1], t2))))
    return terms


def encode(instance: JspInstance) -> JspEncoding:
    """Build the penalty QUBO and its exact Ising form."""
    T = instance.timespan
    index = {(n, k, t): (n * instance.ops_per_job + k) * T + t
             for n, k in instance.operations for t in range(T)}
    scale = instance.energy_scale
    zero = scale * 0

    linear: Dict[int, Number] = defaultdict(lambda: zero)
    quadratic: Dict[Tuple[int, int], Number] = defaultdict(lambda: zero)
    constant = zero

    def add_pair(u: int, v: int, weight: Number):
        key = (u, v) if u < v else (v, u)
        quadratic[key] += weight

    # h1: (sum_t x - 1)^2 = 1 - sum_t x + 2 sum_{t<t'} x x'
    for n, k in instance.operations:
        variables = [index[(n, k, t)] for t in range(T)]
        constant += scale
        for v in variables:
            linear[v] -= scale
        for u, v in itertools.combinations(variables, 2):
            add_pair(u, v, 2 * scale)

    terms = penalty_terms(instance)
    for term in terms:
        if len(term.variables) == 1:
            linear[index[term.variables[0]]] += scale
        else:
            add_pair(index[term.variables[0]], index[term.variables[1]], scale)

    count = len(index)
    fields = [zero] * count
    couplers = []
    offset = constant
    for v, a in linear.items():
        fields[v] += a / 2
        offset += a / 2
    for (u, v), b in sorted(quadratic.items()):
        if b == 0:
            continue
        fields[u] += b / 4
        fields[v] += b / 4
        offset += b / 4
        couplers.append((u, v, b / 4))

    problem = IsingProblem(count, tuple(fields), tuple(couplers))
    logger.info(f"Encoded {instance.num_jobs}x{instance.ops_per_job} job shop over T={T}: "
                f"{count} variables, {len(couplers)} couplers, {len(terms)} order/horizon/machine penalties")
    return JspEncoding(
        instance=instance,
        index=index,
        problem=problem,
        offset=offset,
        linear=dict(linear),
        quadratic={key: b for key, b in quadratic.items() if b != 0},
        constant=constant,
        terms=terms,
    )


def spins_to_bits(config: SpinConfig) -> List[int]:
    return [(s + 1) // 2 for s in config.spins]


def decode(encoding: JspEncoding, config: SpinConfig) -> JspDecoding:
    """Start times when every operation starts once, and every violated penalty by family."""
    if len(config) != len(encoding.index):
        raise DimensionError(f"Configuration has {len(config)} spins, encoding has {len(encoding.index)} variables")
    instance = encoding.instance
    bits = spins_to_bits(config)
    on = {var for var, v in encoding.index.items() if bits[v] == 1}

    violations: List[Violation] = []
    starts: Dict[Operation, int] = {}
    for n, k in instance.operations:
        chosen = [var for var in sorted(on) if var[:2] == (n, k)]
        if len(chosen) == 1:
            starts[(n, k)] = chosen[0][2]
        else:
            violations.append(Violation("h1", chosen, f"operation ({n},{k}) starts {len(chosen)} times"))

    for term in encoding.terms:
        if all(var in on for var in term.variables):
            description = " | ".join(f"{n},{k},{t}" for n, k, t in term.variables)
            violations.append(Violation(term.family, list(term.variables), f"({description})"))

    schedule = None
    if len(starts) == len(instance.operations):
        rows = tuple(tuple(starts[(n, k)] for k in range(instance.ops_per_job)) for n in range(instance.num_jobs))
        makespan = max(starts[op] + instance.duration(op) for op in instance.operations)
        schedule = Schedule(rows, makespan)
    if violations:
        logger.debug(f"Decoded assignment violates {len(violations)} penalty term(s)")
    return JspDecoding(schedule, violations)


def schedule_is_feasible(instance: JspInstance, starts: Dict[Operation, int]) -> bool:
    """Direct check of precedence, horizon and machine rules for a start-time table."""
    for n in range(instance.num_jobs):
        for k in range(instance.ops_per_job - 1):
            if starts[(n, k)] + instance.durations[n][k] > starts[(n, k + 1)]:
                return False
        last = (n, instance.ops_per_job - 1)
        if starts[last] + instance.duration(last) > instance.timespan:
            return False
    for a, b in itertools.combinations(instance.operations, 2):
        if instance.machine(a) == instance.machine(b) and machine_conflict(
                starts[a], instance.duration(a), starts[b], instance.duration(b)):
            return False
    return True


def feasible_schedules(instance: JspInstance) -> List[Tuple[Tuple[int, ...], ...]]:
    """Every start-time table in [0, T) satisfying the scheduling rules, by brute force."""
    operations = instance.operations
    found = []
    for times in itertools.product(range(instance.timespan), repeat=len(operations)):
        starts = dict(zip(operations, times))
        if schedule_is_feasible(instance, starts):
            found.append(tuple(tuple(starts[(n, k)] for k in range(instance.ops_per_job))
                               for n in range(instance.num_jobs)))
    return found


def report_gap_quantities(encoding: JspEncoding) -> GapReport:
    """
    Measured C(i) of every encoded variable against the E/2 figure quoted for
    this encoding, and the chain strength rule (C + Delta) / 2 with Delta = E.
    """
    scale = encoding.instance.energy_scale
    values = {var: c_value(encoding.problem, v) for var, v in sorted(encoding.index.items(), key=lambda kv: kv[1])}
    expected = scale / 2
    measured = (max(values.values()) + scale) / 2
    report = GapReport(
        energy_scale=scale,
        c_values=values,
        expected_c=expected,
        rule_value=(expected + scale) / 2,
        measured_rule_value=measured,
    )
    mismatched = sum(1 for ok in report.matches.values() if not ok)
    if mismatched:
        logger.info(f"{mismatched} of {len(values)} variables have C different from E/2")
    return report
