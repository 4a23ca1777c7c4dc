"""
Exact analysis of the fixed-point process Y_1, Y_2, ... of a recurrent group.

Y_k(g) is the number of level-k words fixed by g, with g uniform on the
level-n group G_n. Probabilities are exact fractions throughout.
"""

import itertools
import logging
from collections import Counter, defaultdict
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    CapExceededError, LevelOutOfRangeError, ZeroProbabilityHistoryError,
)
from .group import DEFAULT_CAP, FiniteGroup
from .models import AfplpReport, AfplpRow, DistributionRecord
from .pattern import PatternGroup, require_uniform_pattern
from .perm import Perm
from .tree import TreePortrait
from .utils import format_fraction, format_word

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]

DEFAULT_MAX_LEVELS = 4
DEFAULT_SUPPORT_CAP = 1_000_000


class JointFixDistribution:
    """Exact law of (Y_1, ..., Y_n), stored sparsely on its support."""

    __slots__ = ('arity', 'levels', 'weights')

    def __init__(self, arity: int, levels: int, weights: Mapping[Vector, Fraction]):
        self.arity = arity
        self.levels = levels
        self.weights: Dict[Vector, Fraction] = {v: Fraction(w) for v, w in sorted(weights.items()) if w}

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointFixDistribution):
            return NotImplemented
        return (self.arity, self.levels, self.weights) == (other.arity, other.levels, other.weights)

    def __repr__(self) -> str:
        return f"JointFixDistribution(arity={self.arity}, levels={self.levels}, support={len(self.weights)})"

    def _check_level(self, k: int) -> None:
        if not 1 <= k <= self.levels:
            raise LevelOutOfRangeError(f"level {k} outside 1..{self.levels}")

    def probability(self, vector: Sequence[int]) -> Fraction:
        return self.weights.get(tuple(vector), Fraction(0))

    def marginal(self, k: int) -> Dict[int, Fraction]:
        """Law of Y_k."""
        self._check_level(k)
        law: Dict[int, Fraction] = defaultdict(Fraction)
        for vector, w in self.weights.items():
            law[vector[k - 1]] += w
        return dict(sorted(law.items()))

    def expectation(self, k: int) -> Fraction:
        return sum((y * w for y, w in self.marginal(k).items()), Fraction(0))

    def prefix(self, m: int) -> 'JointFixDistribution':
        """Law of (Y_1, ..., Y_m)."""
        self._check_level(m)
        law: Dict[Vector, Fraction] = defaultdict(Fraction)
        for vector, w in self.weights.items():
            law[vector[:m]] += w
        return JointFixDistribution(self.arity, m, law)

    def history_probability(self, history: Sequence[int]) -> Fraction:
        """P(Y_1 = t_1, ..., Y_m = t_m)."""
        m = len(history)
        history = tuple(history)
        return sum((w for v, w in self.weights.items() if v[:m] == history), Fraction(0))

    def conditional_expectation(self, history: Sequence[int]) -> Fraction:
        """E(Y_n | Y_1 = t_1, ..., Y_{n-1} = t_{n-1}) for a history of length n - 1.

        Raises:
            ZeroProbabilityHistoryError: If the history has probability zero.
        """
        history = tuple(history)
        n = len(history) + 1
        if not 2 <= n <= self.levels:
            raise LevelOutOfRangeError(f"history of length {len(history)} needs levels 2..{self.levels}")
        mass = self.history_probability(history)
        if not mass:
            raise ZeroProbabilityHistoryError(f"history ({format_word(history)}) has probability zero")
        total = sum((w * v[n - 1] for v, w in self.weights.items() if v[:n - 1] == history), Fraction(0))
        return total / mass

    def conditional_expectations(self, n: int) -> Dict[Vector, Fraction]:
        """E(Y_n | history) for every positive-probability history of length n - 1."""
        if not 2 <= n <= self.levels:
            raise LevelOutOfRangeError(f"conditional expectations need 2 <= n <= {self.levels}")
        mass: Dict[Vector, Fraction] = defaultdict(Fraction)
        total: Dict[Vector, Fraction] = defaultdict(Fraction)
        for vector, w in self.weights.items():
            mass[vector[:n - 1]] += w
            total[vector[:n - 1]] += w * vector[n - 1]
        return {h: total[h] / mass[h] for h in sorted(mass)}

    def martingale_witness(self) -> Optional[Tuple[Vector, Fraction, Fraction]]:
        """(history, E(Y_n | history), deviation) with the largest deviation, or None at one level.

        Ties go to the shortest and then lexicographically least history.
        """
        best = None
        for n in range(2, self.levels + 1):
            for history, value in self.conditional_expectations(n).items():
                deviation = abs(value - history[-1])
                if best is None or deviation > best[2]:
                    best = (history, value, deviation)
        return best

    def martingale_deviation(self) -> Fraction:
        """Max over n and positive-probability histories of |E(Y_n | history) - t_{n-1}|."""
        if self.levels < 2:
            raise LevelOutOfRangeError("the martingale deviation needs at least two levels")
        witness = self.martingale_witness()
        return witness[2] if witness else Fraction(0)

    def fpp(self, k: int) -> Fraction:
        """P(Y_k >= 1)."""
        return sum((w for y, w in self.marginal(k).items() if y >= 1), Fraction(0))

    def records(self) -> List[DistributionRecord]:
        return [DistributionRecord(vector=list(v), probability=format_fraction(w)) for v, w in self.weights.items()]

    def to_text(self) -> str:
        """One line per support vector: ``y_1 ... y_n: p/q``."""
        return '\n'.join(f"{' '.join(str(y) for y in v)}: {format_fraction(w)}" for v, w in self.weights.items())

    def violations(self) -> List[str]:
        problems = []
        if sum(self.weights.values(), Fraction(0)) != 1:
            problems.append("weights do not sum to 1")
        for vector in self.weights:
            if len(vector) != self.levels:
                problems.append(f"vector {vector} does not have {self.levels} entries")
                continue
            bounds = [self.arity] + [self.arity * y for y in vector[:-1]]
            if any(not 0 <= y <= b for y, b in zip(vector, bounds)):
                problems.append(f"vector {vector} is not feasible")
        return problems


def _convolve(left: Mapping[Vector, Fraction], right: Mapping[Vector, Fraction]) -> Dict[Vector, Fraction]:
    result: Dict[Vector, Fraction] = defaultdict(Fraction)
    for u, p in left.items():
        for v, q in right.items():
            result[tuple(a + b for a, b in zip(u, v))] += p * q
    return result


class _FixedPointProgram:
    """F_m(s): law of (|Fix s|, Y_2, ..., Y_m) below a vertex labelled s."""

    def __init__(self, pattern: PatternGroup, support_cap: int):
        self.pattern = pattern
        self.support_cap = support_cap
        self._laws: Dict[Tuple[int, Perm], Dict[Vector, Fraction]] = {}
        self._mixtures: Dict[Tuple[int, FrozenSet[Perm]], Dict[Vector, Fraction]] = {}

    def law(self, m: int, s: Perm) -> Dict[Vector, Fraction]:
        key = (m, s)
        if key in self._laws:
            return self._laws[key]
        fixed = sorted(s.fixed_points())
        if m == 1:
            law = {(len(fixed),): Fraction(1)}
        else:
            fiber = self.pattern.fiber(s)
            law = defaultdict(Fraction)
            for box in fiber.boxes:
                size = 1
                for coordinate in box:
                    size *= len(coordinate)
                subtree: Dict[Vector, Fraction] = {(0,) * (m - 1): Fraction(1)}
                for i in fixed:
                    subtree = _convolve(subtree, self.mixture(m - 1, box[i - 1]))
                share = Fraction(size, fiber.size)
                for vector, w in subtree.items():
                    law[(len(fixed),) + vector] += share * w
            if len(law) > self.support_cap:
                raise CapExceededError(self.support_cap, "support vectors")
        self._laws[key] = law
        return law

    def mixture(self, m: int, labels: FrozenSet[Perm]) -> Dict[Vector, Fraction]:
        """Uniform mixture of F_m(t) over t in labels."""
        key = (m, labels)
        if key not in self._mixtures:
            mixed: Dict[Vector, Fraction] = defaultdict(Fraction)
            share = Fraction(1, len(labels))
            for t in sorted(labels):
                for vector, w in self.law(m, t).items():
                    mixed[vector] += share * w
            self._mixtures[key] = mixed
        return self._mixtures[key]


def exact_joint_distribution(P: PatternGroup, n: int, max_levels: int = DEFAULT_MAX_LEVELS,
                             support_cap: int = DEFAULT_SUPPORT_CAP) -> JointFixDistribution:
    """Law of (Y_1, ..., Y_n) under the uniform measure on G_n, by dynamic programming.

    Below a vertex labelled s, the level-1 labels are a uniform tuple from the
    fiber over s and the subtrees at the fixed children are independent.

    Raises:
        NonUniformFibersError: If fiber sizes differ.
        LevelOutOfRangeError: If n is outside 1..max_levels.
        CapExceededError: If the support grows past ``support_cap``.
    """
    if not 1 <= n <= max_levels:
        raise LevelOutOfRangeError(f"level {n} outside 1..{max_levels}")
    require_uniform_pattern(P)
    program = _FixedPointProgram(P, support_cap)
    total = P.level_order(n)
    law: Dict[Vector, Fraction] = defaultdict(Fraction)
    for s in P.roots:
        share = Fraction(P._count(n, s), total)
        for vector, w in program.law(n, s).items():
            law[vector] += share * w
    logger.debug("level-%d law of %s has %d support vectors", n, P.name, len(law))
    return JointFixDistribution(P.arity, n, law)


def enumerate_joint_distribution(P: PatternGroup, n: int, cap: int = DEFAULT_CAP) -> JointFixDistribution:
    """Law of (Y_1, ..., Y_n) by iterating over every element of G_n."""
    counts = Counter(g.fixed_vector(n) for g in P.iter_level(n, cap))
    total = sum(counts.values())
    return JointFixDistribution(P.arity, n, {v: Fraction(c, total) for v, c in counts.items()})


def conditional_expectation(D: JointFixDistribution, history: Sequence[int]) -> Fraction:
    return D.conditional_expectation(history)


def martingale_deviation(D: JointFixDistribution) -> Fraction:
    return D.martingale_deviation()


def fpp(D: JointFixDistribution, k: int) -> Fraction:
    return D.fpp(k)


def _portrait_label(g: Optional[TreePortrait]) -> str:
    if g is None:
        return 'ε'
    if g.depth == 1:
        return str(g.root)
    return '; '.join(g.to_text().splitlines())


def _lifting_report(level: int, totals: Mapping, fixed_counts: Mapping, labels: Mapping,
                    group_order: int) -> AfplpReport:
    worst = None
    worst_gap = Fraction(-1)
    violations = 0
    for base, (count, fixed_sum) in totals.items():
        average = Fraction(fixed_sum, count)
        gap = abs(average - fixed_counts[base])
        if gap:
            violations += 1
        if gap > worst_gap:
            worst_gap = gap
            worst = AfplpRow(element=labels[base], fixed_points=fixed_counts[base],
                             lift_count=count, lift_average=format_fraction(average))
    return AfplpReport(level=level, holds=violations == 0, group_order=group_order,
                       base_order=len(totals), violations=violations, worst=worst)


def afplp_check(P: PatternGroup, n: int, cap: int = DEFAULT_CAP) -> AfplpReport:
    """Compare #Fix(g) with the average fixed-point count of its lifts to level n.

    Every g in G_{n-1} is checked; lifts are found by restricting each element
    of the enumerated G_n. At n = 1 the base is the level-0 group, whose one
    element fixes the root.

    Raises:
        CapExceededError: If G_n has more than ``cap`` elements.
    """
    if n < 1:
        raise LevelOutOfRangeError("levels start at 1")
    totals: Dict = {}
    fixed_counts: Dict = {}
    labels: Dict = {}
    group_order = 0
    for g in P.iter_level(n, cap):
        group_order += 1
        base = g.restrict(n - 1) if n > 1 else None
        if base not in totals:
            totals[base] = [0, 0]
            fixed_counts[base] = base.fixed_words(n - 1) if base is not None else 1
            labels[base] = _portrait_label(base)
        totals[base][0] += 1
        totals[base][1] += g.fixed_words(n)
    report = _lifting_report(n, totals, fixed_counts, labels, group_order)
    logger.debug("lifting check at level %d of %s: %s", n, P.name, "holds" if report.holds else "fails")
    return report


def wreath_lifting_report(G: FiniteGroup, H: FiniteGroup, cap: int = DEFAULT_CAP) -> AfplpReport:
    """Lifting check for the wreath product G[H] acting on m * n points.

    The element (g; h_1, ..., h_m) sends (i, j) to (g(i), h_i(j)); its
    restriction to the top level is g. All |G| * |H|^m elements are built.
    """
    m, n = G.degree, H.degree
    order = G.order * H.order ** m
    if order > cap:
        raise CapExceededError(cap, "wreath product elements")
    h_elements = H.sorted_elements
    totals: Dict = {}
    fixed_counts: Dict = {}
    labels: Dict = {}
    for g in G.sorted_elements:
        totals[g] = [0, 0]
        fixed_counts[g] = g.fixed_point_count()
        labels[g] = str(g)
        for hs in itertools.product(h_elements, repeat=m):
            images = [0] * (m * n)
            for i in range(1, m + 1):
                for j in range(1, n + 1):
                    images[(i - 1) * n + j - 1] = (g(i) - 1) * n + hs[i - 1](j)
            lift = Perm(images)
            totals[g][0] += 1
            totals[g][1] += lift.fixed_point_count()
    return _lifting_report(2, totals, fixed_counts, labels, order)
