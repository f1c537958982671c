"""
Bound hub: computes every per-qubit bound and assembles the chain bound report.
"""

import asyncio
import logging
from typing import Any, Dict, Optional, Sequence

from bounds import (DistributionOptimizer, admissibility_profile, c_value, certify_tightness, choi1_bound,
                    choi2_bound, locally_determinable, tight_bound)
from embedding import HardwareGraph, HFieldDistribution, MinorEmbedding, distribute_fields, leaf_count, require_valid
from ising import IsingProblem
from models import ChainBoundReport, QubitBounds

logger = logging.getLogger(__name__)


class BoundHub:
    """Runs the bound calculators for every logical qubit of an embedded problem."""

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        bounds_config = config.get('bounds', {})
        optimizer_config = config.get('optimizer', {})
        self.max_chain_size = bounds_config.get('max_chain_size', 30)
        self.default_strategy = bounds_config.get('distribution', 'choi2')
        self.optimizer = DistributionOptimizer(
            resolution_bits=optimizer_config.get('resolution_bits', 10),
            max_passes=optimizer_config.get('max_passes', 64),
            max_chain_size=self.max_chain_size,
        )

    async def compute_report(self, problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                             strategy: Optional[str] = None, dist: Optional[HFieldDistribution] = None,
                             optimize: bool = False,
                             trial_strengths: Optional[Sequence] = None) -> ChainBoundReport:
        """Bounds for all qubits; qubits run concurrently and the report is ordered by qubit index."""
        require_valid(problem, hw, emb)
        if dist is None:
            strategy = strategy or self.default_strategy
            dist = distribute_fields(problem, hw, emb, strategy)
        else:
            dist.validate(problem, emb)
            strategy = dist.strategy
        logger.info(f"Computing bounds for {problem.num_qubits} logical qubits ({strategy} distribution)")

        tasks = [
            asyncio.to_thread(self.qubit_bounds, problem, hw, emb, dist, i, optimize, trial_strengths)
            for i in range(problem.num_qubits)
        ]
        results = await asyncio.gather(*tasks)
        return ChainBoundReport(strategy=strategy, qubits=sorted(results, key=lambda q: q.qubit))

    def compute_report_sync(self, *args, **kwargs) -> ChainBoundReport:
        return asyncio.run(self.compute_report(*args, **kwargs))

    def qubit_bounds(self, problem: IsingProblem, hw: HardwareGraph, emb: MinorEmbedding,
                     dist: HFieldDistribution, i: int, optimize: bool = False,
                     trial_strengths: Optional[Sequence] = None) -> QubitBounds:
        determinable = locally_determinable(problem, i)
        if determinable:
            logger.warning(f"Qubit {i} is locally determinable; its spin is fixed by the sign of h_{i}")

        tight, witness = tight_bound(problem, hw, emb, dist, i, self.max_chain_size)
        uses_choi2 = dist.strategy == "choi2" and i not in dist.fallbacks and not determinable
        bounds = QubitBounds(
            qubit=i,
            chain_size=len(emb.chains[i]),
            leaves=leaf_count(hw, emb, i),
            c_value=c_value(problem, i),
            locally_determinable=determinable,
            choi1=choi1_bound(problem, i),
            choi2=choi2_bound(problem, hw, emb, i) if uses_choi2 else None,
            tight=tight,
            witness=witness,
            certified=certify_tightness(problem, emb, dist, i, witness),
            distribution=dist.for_qubit(i),
        )

        if optimize:
            optimized, value = self.optimizer.optimize(problem, hw, emb, i)
            bounds.optimized_bound = value
            bounds.optimized_distribution = optimized.for_qubit(i)
        if trial_strengths:
            bounds.admissible_at = admissibility_profile(problem, hw, emb, dist, i, trial_strengths,
                                                         self.max_chain_size)
        logger.debug(f"Qubit {i}: choi1={bounds.choi1} choi2={bounds.choi2} tight={bounds.tight}")
        return bounds
