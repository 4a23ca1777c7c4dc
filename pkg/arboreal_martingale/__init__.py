"""
Arboreal Martingale

Groups acting on rooted d-ary trees, their fixed-point processes, and exact
checks of whether those processes are martingales.
"""

from .analyzer import FixedPointAnalyzer
from .config import Config
from .group import FiniteGroup, SubgroupPair, find_index_p_normal_pairs, generate
from .models import AnalysisReport, MartingaleVerdict, Verdict
from .pattern import PatternGroup, build_theorem12_pattern, martingale_check, verify_pattern_group, wreath_pattern
from .perm import Perm
from .process import JointFixDistribution, afplp_check, exact_joint_distribution
from .sampler import monte_carlo_fpp
from .tree import TreePortrait

__version__ = "0.1.0"
__all__ = [
    "FixedPointAnalyzer", "Config", "FiniteGroup", "SubgroupPair", "find_index_p_normal_pairs", "generate",
    "AnalysisReport", "MartingaleVerdict", "Verdict", "PatternGroup", "build_theorem12_pattern",
    "martingale_check", "verify_pattern_group", "wreath_pattern", "Perm", "JointFixDistribution",
    "afplp_check", "exact_joint_distribution", "monte_carlo_fpp", "TreePortrait",
]
