"""
Chain strength bound calculators.
"""

from .admissible import admissibility_profile, check_admissible, minimum_admissible_strength
from .choi import c_value, choi1_bound, choi2_bound, locally_determinable
from .optimizer import DistributionOptimizer, optimize_all, optimize_distribution
from .subsets import (ChainSubsets, best_constant_condition, breaking_threshold, certify_tightness,
                      subset_candidates, tight_bound)

__all__ = [
    'c_value',
    'locally_determinable',
    'choi1_bound',
    'choi2_bound',
    'ChainSubsets',
    'subset_candidates',
    'tight_bound',
    'best_constant_condition',
    'breaking_threshold',
    'certify_tightness',
    'check_admissible',
    'minimum_admissible_strength',
    'admissibility_profile',
    'DistributionOptimizer',
    'optimize_distribution',
    'optimize_all',
]
