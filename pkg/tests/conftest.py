"""Shared fixtures: the four-node star chain and a small instance for sweep tests."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from embedding import HardwareGraph, MinorEmbedding
from ising import IsingProblem
from loaders import InstanceBundle

REPO_ROOT = Path(__file__).resolve().parent.parent


def bundle_dict(bundle: InstanceBundle) -> dict:
    return {
        "problem": bundle.problem.to_dict(),
        "hardware": bundle.hardware.to_dict(),
        "embedding": bundle.embedding.to_dict(),
    }


@pytest.fixture
def star3() -> InstanceBundle:
    """Qubit 0 on a star chain (centre 0, leaves 1-3), each leaf coupled with |J| = 5 to a one-node chain."""
    problem = IsingProblem(4, (3, 0, 0, 0), ((0, 1, 5), (0, 2, 5), (0, 3, 5)))
    hardware = HardwareGraph(7, ((0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)))
    embedding = MinorEmbedding(((0, 1, 2, 3), (4,), (5,), (6,)),
                               {(0, 1): (1, 4), (0, 2): (2, 5), (0, 3): (3, 6)})
    return InstanceBundle(problem, hardware, embedding)


@pytest.fixture
def star3_file(tmp_path, star3) -> str:
    path = tmp_path / "star3.json"
    path.write_text(json.dumps(bundle_dict(star3)), encoding="utf-8")
    return str(path)


@pytest.fixture
def capped_instance() -> InstanceBundle:
    """
    Four logical qubits, qubit 0 on a two-node chain whose nodes are pulled
    apart by J01 = +1 and J02 = -3/2. Logical ground state is all +1 at -5.
    """
    problem = IsingProblem(
        4,
        (0, -2, -2, Fraction(1, 2)),
        ((0, 1, 1), (0, 2, Fraction(-3, 2)), (1, 3, -1)),
    )
    hardware = HardwareGraph(5, ((0, 1), (0, 2), (1, 3), (2, 4)))
    embedding = MinorEmbedding(((0, 1), (2,), (3,), (4,)),
                               {(0, 1): (0, 2), (0, 2): (1, 3), (1, 3): (2, 4)})
    return InstanceBundle(problem, hardware, embedding)


@pytest.fixture
def capped_file(tmp_path, capped_instance) -> str:
    path = tmp_path / "capped.json"
    path.write_text(json.dumps(bundle_dict(capped_instance)), encoding="utf-8")
    return str(path)


@pytest.fixture
def config_path() -> str:
    return str(REPO_ROOT / "config.yaml")


@pytest.fixture
def unsplittable_chain() -> InstanceBundle:
    """
    Qubit 0 (h = 10) on a two-node chain with one weak coupler J01 = 1 on
    node 1. Under the uniform split every node field outweighs its
    external coupling, so no neighbour pattern can break the chain.
    """
    problem = IsingProblem(2, (10, 0), ((0, 1, 1),))
    hardware = HardwareGraph(3, ((0, 1), (1, 2)))
    embedding = MinorEmbedding(((0, 1), (2,)), {(0, 1): (1, 2)})
    return InstanceBundle(problem, hardware, embedding)


@pytest.fixture
def zero_field_pair() -> InstanceBundle:
    """Qubit 0 (h = 0) on a two-node chain, each node coupled with |J| = 2 to its own one-node neighbour."""
    problem = IsingProblem(3, (0, 0, 0), ((0, 1, 2), (0, 2, -2)))
    hardware = HardwareGraph(4, ((0, 1), (0, 2), (1, 3)))
    embedding = MinorEmbedding(((0, 1), (2,), (3,)), {(0, 1): (0, 2), (0, 2): (1, 3)})
    return InstanceBundle(problem, hardware, embedding)
