# loaders.py

"""
JSON input and output for problems, hardware graphs, embeddings, field
distributions and job-shop instances.

An instance bundle is one JSON object with "problem", "hardware" and
"embedding" keys, each in its own documented format.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding
from errors import InstanceError
from ising import IsingProblem
from jsp import JspInstance
from numeric import parse_number

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstanceBundle:
    problem: IsingProblem
    hardware: HardwareGraph
    embedding: MinorEmbedding


def validate_inputs(*paths: Optional[str]) -> None:
    """Check that every given input path exists and is a JSON file."""
    for path in paths:
        if path is None:
            continue
        file = Path(path)
        if not file.exists():
            raise FileNotFoundError(f"Input file not found: {path}")
        if not file.is_file():
            raise IsADirectoryError(f"Input path is not a file: {path}")
        if file.suffix.lower() != '.json':
            logger.warning(f"Input file {path} does not have a .json extension")
    logger.debug("Input validation passed")


def load_json(path: str) -> Dict[str, Any]:
    validate_inputs(path)
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise InstanceError(f"Expected a JSON object in {path}")
    return data


def dump_json(data: Any, path: Optional[str] = None) -> str:
    text = json.dumps(data, indent=2)
    if path is not None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"Wrote {path}")
    return text


def load_problem(path: str, exact: bool = True) -> IsingProblem:
    return IsingProblem.from_dict(load_json(path), exact)


def load_bundle(path: str, exact: bool = True) -> InstanceBundle:
    data = load_json(path)
    missing = [key for key in ("problem", "hardware", "embedding") if key not in data]
    if missing:
        raise InstanceError(f"Instance bundle {path} is missing {', '.join(missing)}")
    return InstanceBundle(
        problem=IsingProblem.from_dict(data["problem"], exact),
        hardware=HardwareGraph.from_dict(data["hardware"]),
        embedding=MinorEmbedding.from_dict(data["embedding"]),
    )


def load_distribution(path: str, exact: bool = True) -> HFieldDistribution:
    return HFieldDistribution.from_dict(load_json(path), exact)


def load_jsp(path: str, exact: bool = True) -> JspInstance:
    return JspInstance.from_dict(load_json(path), exact)


def parse_grid(text: str, exact: bool = False) -> List:
    """Comma separated chain strength magnitudes, e.g. "0.5,1,3/2"."""
    values = [item.strip() for item in text.split(",") if item.strip()]
    if not values:
        raise InstanceError("Chain strength grid is empty")
    return [parse_number(value, exact) for value in values]
