"""
Data models for analysis reports.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, computed_field, field_validator

from .utils import format_fraction


class FamilyName(str, Enum):
    """Built-in group families."""
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    SYMMETRIC = "symmetric"
    ALTERNATING = "alternating"
    KLEIN_CATALOG = "klein_catalog"


class PatternKind(str, Enum):
    """How a pattern group was constructed."""
    WREATH = "wreath"
    FULL_WREATH = "full-wreath"
    THEOREM12 = "theorem12"
    COSET = "coset"
    EXPLICIT = "explicit"


class Verdict(str, Enum):
    MARTINGALE = "martingale"
    NON_MARTINGALE = "non-martingale"


class FamilySpec(BaseModel):
    """A built-in family with its integer parameters, e.g. ``dihedral:4``."""
    name: FamilyName
    params: List[int] = Field(default_factory=list)
    variant: Optional[str] = None  # dihedral only: "r" (default) or "rs"

    @field_validator('params')
    @classmethod
    def validate_params(cls, v):
        """Parameters are positive integers."""
        if any(p < 1 for p in v):
            raise ValueError("family parameters must be positive integers")
        return v

    @classmethod
    def parse(cls, text: str) -> 'FamilySpec':
        """Parse the ``name:param[:variant]`` shorthand."""
        name, *rest = text.strip().split(':')
        params = []
        variant = None
        for token in rest:
            if token.isdigit():
                params.append(int(token))
            else:
                variant = token
        return cls(name=name, params=params, variant=variant)

    def __str__(self) -> str:
        parts = [self.name.value] + [str(p) for p in self.params]
        if self.variant:
            parts.append(self.variant)
        return ':'.join(parts)


class GroupSummary(BaseModel):
    """Basic invariants of a permutation group."""
    degree: int
    order: int
    generators: List[str]
    orbits: List[List[int]]
    transitive: bool
    primitive: Optional[bool] = None
    average_fixed_points: str


class PairSummary(BaseModel):
    """An (N1 transitive, N2 intransitive) index-p normal pair."""
    p: int
    n1_generators: List[str]
    n1_order: int
    n2_generators: List[str]
    n2_order: int
    n2_orbits: List[List[int]]
    sigma: List[str]  # "a -> b" meaning aN1 -> bN2


class CatalogEntry(BaseModel):
    """One catalog group and, per prime dividing its order, the number of pairs."""
    family: str
    degree: int
    order: int
    pairs_by_prime: Dict[str, int] = Field(default_factory=dict)

    @property
    def has_pair(self) -> bool:
        return any(self.pairs_by_prime.values())


class VerificationReport(BaseModel):
    """Structural verdicts for a pattern group."""
    pattern: str
    depth: int
    order: int
    closure: bool
    inverses: bool
    identity: bool
    root_transitive: bool
    self_replicating: bool
    uniform_fibers: bool
    recurrent: bool
    fiber_sizes: List[int] = Field(default_factory=list)  # distinct sizes, ascending
    problems: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all((self.closure, self.inverses, self.identity, self.root_transitive,
                    self.self_replicating, self.uniform_fibers, self.recurrent))

    @property
    def is_group(self) -> bool:
        return self.closure and self.inverses and self.identity


class KernelReport(BaseModel):
    """Kernel of the restriction from depth 2 to depth 1."""
    kernel_order: int
    per_child_orbits: Dict[str, List[List[int]]]  # level-1 vertex -> orbits of its children
    kernel_elements: Optional[List[Any]] = Field(default=None, exclude=True)


class MartingaleVerdict(BaseModel):
    """Outcome of the kernel transitivity criterion."""
    verdict: Verdict
    checked_levels: List[int]
    level: Optional[int] = None
    vertex: Optional[List[int]] = None
    orbits: Optional[List[List[int]]] = None

    @property
    def is_martingale(self) -> bool:
        return self.verdict == Verdict.MARTINGALE


class DistributionRecord(BaseModel):
    vector: List[int]
    probability: str


class AfplpRow(BaseModel):
    """Lift statistics of one element of the level-(n-1) group."""
    element: str
    fixed_points: int
    lift_count: int
    lift_average: str


class AfplpReport(BaseModel):
    """Average fixed-point lifting check at one level."""
    level: int
    holds: bool
    group_order: int
    base_order: int
    violations: int = 0
    worst: Optional[AfplpRow] = None


class SampleReport(BaseModel):
    """Monte Carlo estimate of the level-n fixed-point proportion."""
    level: int
    trials: int
    hits: int
    seed: int
    level_sums: List[int] = Field(default_factory=list)  # sum of Y_k over trials, k = 1..level

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.trials)

    @computed_field
    @property
    def estimate_ratio(self) -> str:
        return format_fraction(self.estimate)

    @computed_field
    @property
    def standard_error(self) -> float:
        p = self.hits / self.trials
        return math.sqrt(p * (1 - p) / self.trials)

    @computed_field
    @property
    def trajectory_summary(self) -> List[str]:
        """Per-level sample means of Y_k."""
        return [format_fraction(Fraction(total, self.trials)) for total in self.level_sums]


class CheckResult(BaseModel):
    """One exact-equality check of the verification suite."""
    name: str
    expected: str
    actual: str
    passed: bool


class AnalysisReport(BaseModel):
    """Everything a CLI subcommand reports."""
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    group: Optional[GroupSummary] = None
    pairs: Optional[List[PairSummary]] = None
    catalog: Optional[List[CatalogEntry]] = None
    verification: Optional[VerificationReport] = None
    kernel: Optional[KernelReport] = None
    martingale: Optional[MartingaleVerdict] = None
    distribution: Optional[List[DistributionRecord]] = None
    conditional_expectations: Optional[Dict[str, str]] = None
    deviation: Optional[str] = None
    fpp: Optional[Dict[str, str]] = None
    afplp: Optional[List[AfplpReport]] = None
    sample: Optional[SampleReport] = None
    checks: List[CheckResult] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)
    processing_time: Optional[float] = None

    @computed_field
    @property
    def success(self) -> bool:
        """False if a verification check failed; non-martingale verdicts are results."""
        if any(not c.passed for c in self.checks):
            return False
        if self.verification is not None and not self.verification.passed:
            return False
        return not self.errors
