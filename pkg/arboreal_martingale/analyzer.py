"""
Fixed-point process analyzer: loads groups and patterns and runs analyses.
"""

import logging
import math
import time
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from .config import Config
from .exceptions import InvalidPairError, InvalidParamsError, SpecFileError
from .families import (
    alternating, build_family, catalog_entry, cyclic, dihedral, dihedral_pair, klein_catalog, parse_family,
    symmetric,
)
from .group import DEFAULT_CAP, FiniteGroup, SubgroupPair, coset_fixed_point_total, find_index_p_normal_pairs, generate
from .models import (
    AnalysisReport, CheckResult, FamilyName, FamilySpec, GroupSummary, PairSummary, PatternKind, Verdict,
)
from .pattern import (
    PatternGroup, build_theorem12_pattern, full_wreath_pattern, martingale_check, restriction_kernel,
    search_coset_patterns, verify_pattern_group, wreath_pattern,
)
from .perm import Perm
from .process import (
    JointFixDistribution, afplp_check, enumerate_joint_distribution, exact_joint_distribution,
    wreath_lifting_report,
)
from .sampler import monte_carlo_fpp
from .tree import parse_portrait
from .utils import format_fraction, format_word, split_top_level

logger = logging.getLogger(__name__)

PATTERN_FAMILIES = ('wreath', 'full-wreath', 'theorem12', 'explicit')


def _read_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise SpecFileError(f"file not found: {path}")
    except yaml.YAMLError as e:
        raise SpecFileError(f"{path} is not valid YAML: {e}")
    if not isinstance(data, dict):
        raise SpecFileError(f"{path} must contain a mapping")
    return data


def group_from_spec(data: Dict[str, Any], cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Build a group from ``{degree: d, generators: "(1 2 3 4), (1 3)"}``.

    Generators may also be given as a YAML list of cycle strings.
    """
    degree = data.get('degree')
    if not isinstance(degree, int) or degree < 1:
        raise SpecFileError(f"'degree' must be a positive integer, got {degree!r}")
    generators = data.get('generators', [])
    if isinstance(generators, str):
        tokens = split_top_level(generators, ',')
    elif isinstance(generators, list):
        tokens = [str(g) for g in generators]
    else:
        raise SpecFileError("'generators' must be a string or a list of strings")
    return generate(degree, [Perm.parse(t, degree) for t in tokens], cap)


def read_group_file(path: Union[str, Path], cap: int = DEFAULT_CAP) -> FiniteGroup:
    return group_from_spec(_read_yaml(path), cap)


def parse_sigma(lines: Sequence[str], degree: int) -> List[Tuple[Perm, Perm]]:
    """Parse coset pairing lines ``a -> b`` meaning aN1 -> bN2."""
    pairs = []
    for line in lines:
        if '->' not in str(line):
            raise SpecFileError(f"sigma lines look like '(1 3) -> (1 2)(3 4)', got {line!r}")
        left, right = str(line).split('->', 1)
        pairs.append((Perm.parse(left, degree), Perm.parse(right, degree)))
    return pairs


def group_summary(G: FiniteGroup) -> GroupSummary:
    transitive = G.is_transitive()
    return GroupSummary(
        degree=G.degree,
        order=G.order,
        generators=[str(g) for g in G.generators],
        orbits=[sorted(block) for block in G.orbits()],
        transitive=transitive,
        primitive=G.is_primitive() if transitive else None,
        average_fixed_points=format_fraction(G.average_fixed_points()),
    )


def pair_summary(pair: SubgroupPair) -> PairSummary:
    return PairSummary(
        p=pair.p,
        n1_generators=[str(g) for g in pair.n1.generators],
        n1_order=pair.n1.order,
        n2_generators=[str(g) for g in pair.n2.generators],
        n2_order=pair.n2.order,
        n2_orbits=[sorted(block) for block in pair.n2.orbits()],
        sigma=[f"{a} -> {b}" for a, b in pair.sigma],
    )


def _fraction_map(values: Dict) -> Dict[str, str]:
    return {(format_word(k) if isinstance(k, tuple) else str(k)): format_fraction(v) for k, v in values.items()}


class FixedPointAnalyzer:
    """Main class for building groups and patterns and analyzing their fixed-point processes."""

    def __init__(self, config_path: Optional[str] = None, cap: Optional[int] = None, timing: bool = False):
        """Initialize the analyzer.

        Args:
            config_path: Path to configuration file
            cap: Override for the element enumeration cap
            timing: Record processing time in reports
        """
        self.config = Config(config_path)
        if cap is not None:
            self.config.set('group.cap', cap)
        self.cap = self.config.get('group.cap', DEFAULT_CAP)
        self.max_levels = self.config.get('process.max_levels', 4)
        self.support_cap = self.config.get('process.support_cap', 1_000_000)
        self.timing = timing

    # Inputs

    def load_group(self, group_file: Optional[str] = None,
                   family: Optional[str] = None) -> Tuple[FiniteGroup, Optional[SubgroupPair], Dict[str, Any]]:
        """Load a group from a spec file or a family shorthand.

        Returns:
            The group, the family's designated pair if any, and an input echo.
        """
        if bool(group_file) == bool(family):
            raise InvalidParamsError("give exactly one of --group-file and --family")
        if group_file:
            return read_group_file(group_file, self.cap), None, {'group_file': str(group_file)}
        spec = parse_family(family)
        G, pair = build_family(spec)
        return G, pair, {'family': str(spec)}

    def build_pattern(self, kind: str, G: FiniteGroup, family_pair: Optional[SubgroupPair] = None,
                      p: int = 2, pair_index: Optional[int] = None,
                      sigma_lines: Optional[Sequence[str]] = None, name: str = '') -> PatternGroup:
        """Build a wreath, full-wreath or theorem12 pattern over G."""
        if kind == PatternKind.WREATH.value:
            return wreath_pattern(G, name=f"wreath({name})" if name else None)
        if kind == PatternKind.FULL_WREATH.value:
            return full_wreath_pattern(G, name=f"full-wreath({name})" if name else None)
        if kind != PatternKind.THEOREM12.value:
            raise InvalidParamsError(f"unknown pattern family {kind!r}; use one of {', '.join(PATTERN_FAMILIES)}")

        if family_pair is not None and family_pair.p == p and pair_index is None:
            pair = family_pair
        else:
            pairs = find_index_p_normal_pairs(G, p)
            if not pairs:
                raise InvalidPairError(f"no (transitive, intransitive) normal pair of index {p}")
            index = pair_index or 0
            if not 0 <= index < len(pairs):
                raise InvalidParamsError(f"pair index {index} outside 0..{len(pairs) - 1}")
            pair = pairs[index]
        if sigma_lines:
            pair = SubgroupPair.build(G, pair.n1, pair.n2, parse_sigma(sigma_lines, G.degree))
        return build_theorem12_pattern(G, pair, name=f"theorem12({name})" if name else None)

    def load_pattern(self, pattern: Optional[str] = None, group_file: Optional[str] = None,
                     family: Optional[str] = None, pattern_file: Optional[str] = None,
                     p: int = 2) -> Tuple[PatternGroup, Dict[str, Any]]:
        """Load a pattern from a pattern file, or build one over a group."""
        if pattern_file:
            if pattern or group_file or family:
                raise InvalidParamsError("--pattern-file cannot be combined with --pattern, --group-file or --family")
            return self.read_pattern_file(pattern_file), {'pattern_file': str(pattern_file)}
        G, family_pair, echo = self.load_group(group_file, family)
        kind = pattern or PatternKind.WREATH.value
        label = echo.get('family') or Path(group_file).stem
        echo.update({'pattern': kind, 'p': p})
        return self.build_pattern(kind, G, family_pair, p, name=label), echo

    def read_pattern_file(self, path: Union[str, Path]) -> PatternGroup:
        """Read a pattern spec: a group (file, inline or family) plus the pattern family.

        Example::

            group_file: d4_group.yaml
            family: theorem12
            p: 2
            sigma:
              - "(2 4) -> (1 2)(3 4)"
        """
        path = Path(path)
        data = _read_yaml(path)
        kind = data.get('family')
        if kind not in PATTERN_FAMILIES:
            raise SpecFileError(f"'family' must be one of {', '.join(PATTERN_FAMILIES)}, got {kind!r}")

        family_pair = None
        if 'group_file' in data:
            G = read_group_file(path.parent / data['group_file'], self.cap)
        elif 'group' in data:
            if not isinstance(data['group'], dict):
                raise SpecFileError("'group' must be a mapping with degree and generators")
            G = group_from_spec(data['group'], self.cap)
        elif 'group_family' in data:
            G, family_pair = build_family(parse_family(str(data['group_family'])))
        elif kind == 'explicit':
            G = None
        else:
            raise SpecFileError("give the group as group_file, group or group_family")

        if kind == 'explicit':
            elements = data.get('elements')
            arity = data.get('arity') or (G.degree if G is not None else None)
            if not isinstance(elements, list) or not arity:
                raise SpecFileError("explicit patterns need 'arity' and a list of 'elements'")
            depth = data.get('depth')
            portraits = [parse_portrait(str(text), arity, depth) for text in elements]
            return PatternGroup.from_portraits(portraits, name=path.stem)

        sigma = data.get('sigma')
        if sigma is not None and not isinstance(sigma, list):
            raise SpecFileError("'sigma' must be a list of 'a -> b' lines")
        return self.build_pattern(kind, G, family_pair, int(data.get('p', 2)), data.get('pair'), sigma,
                                  name=path.stem)

    def _finish(self, report: AnalysisReport, start: float) -> AnalysisReport:
        if self.timing:
            report.processing_time = time.perf_counter() - start
        return report

    # Group commands

    def group_info(self, group_file: Optional[str] = None, family: Optional[str] = None) -> AnalysisReport:
        start = time.perf_counter()
        G, _, echo = self.load_group(group_file, family)
        report = AnalysisReport(command='group info', inputs=echo, group=group_summary(G))
        return self._finish(report, start)

    def find_pairs(self, group_file: Optional[str] = None, family: Optional[str] = None,
                   p: int = 2) -> AnalysisReport:
        start = time.perf_counter()
        G, _, echo = self.load_group(group_file, family)
        echo['p'] = p
        pairs = find_index_p_normal_pairs(G, p)
        report = AnalysisReport(command='group find-pairs', inputs=echo, group=group_summary(G),
                                pairs=[pair_summary(pair) for pair in pairs])
        return self._finish(report, start)

    def catalog(self, max_degree: int = 6) -> AnalysisReport:
        start = time.perf_counter()
        entries = [catalog_entry(spec, G) for spec, G in klein_catalog(max_degree)]
        report = AnalysisReport(command='group catalog', inputs={'max_degree': max_degree}, catalog=entries)
        return self._finish(report, start)

    # Pattern commands

    def pattern_build(self, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        report = AnalysisReport(command='pattern build', inputs=echo, group=group_summary(P.root_group),
                                verification=verify_pattern_group(P))
        return self._finish(report, start)

    def pattern_verify(self, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        verification = verify_pattern_group(P)
        report = AnalysisReport(command='pattern verify', inputs=echo, verification=verification)
        if P.pattern_depth == 2:
            report.kernel = restriction_kernel(P)
        if verification.is_group and verification.self_replicating:
            report.martingale = martingale_check(P)
        return self._finish(report, start)

    # Process commands

    def _distribution(self, P: PatternGroup, level: int) -> JointFixDistribution:
        return exact_joint_distribution(P, level, self.max_levels, self.support_cap)

    def process_dist(self, level: int = 2, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        echo['level'] = level
        D = self._distribution(P, level)
        report = AnalysisReport(command='process dist', inputs=echo, distribution=D.records(),
                                fpp=_fraction_map({k: D.fpp(k) for k in range(1, level + 1)}))
        return self._finish(report, start)

    def process_martingale(self, level: int = 2, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        echo['level'] = level
        report = AnalysisReport(command='process martingale', inputs=echo, martingale=martingale_check(P))
        if level >= 2:
            D = self._distribution(P, level)
            expectations = {}
            for n in range(2, level + 1):
                expectations.update(D.conditional_expectations(n))
            report.conditional_expectations = _fraction_map(expectations)
            report.deviation = format_fraction(D.martingale_deviation())
        return self._finish(report, start)

    def process_fpp(self, level: int = 2, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        echo['level'] = level
        D = self._distribution(P, level)
        report = AnalysisReport(command='process fpp', inputs=echo,
                                fpp=_fraction_map({k: D.fpp(k) for k in range(1, level + 1)}))
        return self._finish(report, start)

    def process_afplp(self, level: int = 2, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        echo['level'] = level
        reports = [afplp_check(P, n, self.cap) for n in range(1, level + 1)]
        report = AnalysisReport(command='process afplp', inputs=echo, afplp=reports)
        return self._finish(report, start)

    # Sampling

    def sample_fpp(self, level: int = 2, trials: Optional[int] = None, seed: Optional[int] = None,
                   progress: Optional[bool] = None, **inputs) -> AnalysisReport:
        start = time.perf_counter()
        P, echo = self.load_pattern(**inputs)
        trials = trials if trials is not None else self.config.get('sampler.trials', 100_000)
        seed = seed if seed is not None else self.config.get('sampler.seed', 0)
        progress = progress if progress is not None else self.config.get('sampler.progress', False)
        echo.update({'level': level, 'trials': trials, 'seed': seed})
        sample = monte_carlo_fpp(P, level, trials, seed, progress)
        report = AnalysisReport(command='sample fpp', inputs=echo, sample=sample)
        if level <= self.max_levels:
            report.fpp = {str(level): format_fraction(self._distribution(P, level).fpp(level))}
        return self._finish(report, start)

    # Verification suite

    def verify_paper(self) -> AnalysisReport:
        """Exact checks of the D4 construction and of the martingale/lifting equivalences."""
        start = time.perf_counter()
        checks: List[CheckResult] = []
        self._check_d4_construction(checks)
        self._check_martingale_positives(checks)
        self._check_dihedral_dichotomy(checks)
        self._check_lifting(checks)
        self._check_burnside(checks)
        self._check_monte_carlo(checks)
        report = AnalysisReport(command='verify-paper', checks=checks)
        return self._finish(report, start)

    @staticmethod
    def _check(checks: List[CheckResult], name: str, expected: Any, actual: Any) -> bool:
        def show(value):
            if isinstance(value, Fraction):
                return format_fraction(value)
            if isinstance(value, Enum):
                return value.value
            if isinstance(value, tuple):
                return "(" + ", ".join(show(v) for v in value) + ")"
            return str(value)
        passed = expected == actual
        checks.append(CheckResult(name=name, expected=show(expected), actual=show(actual), passed=passed))
        if not passed:
            logger.debug("check failed: %s (expected %s, got %s)", name, expected, actual)
        return passed

    def _d4_pattern(self) -> PatternGroup:
        G, pair = build_family(FamilySpec(name=FamilyName.DIHEDRAL, params=[4]))
        return build_theorem12_pattern(G, pair, name='theorem12(dihedral:4)')

    def _check_d4_construction(self, checks: List[CheckResult]) -> None:
        P = self._d4_pattern()
        verification = verify_pattern_group(P)
        self._check(checks, "D4 pattern passes verification", True, verification.passed)
        self._check(checks, "D4 pattern order", 2048, P.order)
        self._check(checks, "D4 pattern fiber sizes", [256], verification.fiber_sizes)

        D = self._distribution(P, 2)
        self._check(checks, "E(Y2 | Y1 = 4)", Fraction(8), D.conditional_expectation((4,)))
        self._check(checks, "E(Y2 | Y1 = 2)", Fraction(0), D.conditional_expectation((2,)))
        self._check(checks, "martingale deviation at level 2", Fraction(4), D.martingale_deviation())
        self._check(checks, "FPP at level 2", Fraction(255, 2048), D.fpp(2))
        self._check(checks, "P(Y1 = 4, Y2 = 0)", Fraction(1, 2048), D.probability((4, 0)))
        self._check(checks, "E(Y2)", Fraction(1), D.expectation(2))

        kernel = restriction_kernel(P)
        self._check(checks, "kernel order", 256, kernel.kernel_order)
        self._check(checks, "kernel orbits at every level-1 vertex",
                    {str(i): [[1, 3], [2, 4]] for i in range(1, 5)}, kernel.per_child_orbits)

        verdict = martingale_check(P)
        self._check(checks, "martingale criterion on the D4 pattern",
                    (Verdict.NON_MARTINGALE, 2, [1]), (verdict.verdict, verdict.level, verdict.vertex))
        self._check(checks, "DP equals enumeration for the D4 pattern at level 2",
                    True, D == enumerate_joint_distribution(P, 2, self.cap))

        lifting = afplp_check(P, 2, self.cap)
        worst = lifting.worst
        self._check(checks, "lifting fails at level 2 with witness id averaging 8",
                    (False, 'id', '8/1'), (lifting.holds, worst.element if worst else None,
                                           worst.lift_average if worst else None))

    def _check_martingale_positives(self, checks: List[CheckResult]) -> None:
        d4 = dihedral(4)
        groups = [('cyclic:4', cyclic(4)), ('dihedral:4', d4),
                  ('symmetric:4', symmetric(4)), ('alternating:4', alternating(4))]
        patterns = [wreath_pattern(G, name=f"wreath({label})") for label, G in groups]
        patterns.append(self._d4_pattern())
        for P in patterns:
            D = self._distribution(P, 3)
            positive = P.kind == PatternKind.WREATH
            if positive:
                self._check(checks, f"{P.name}: deviation at levels 2-3", Fraction(0), D.martingale_deviation())
                self._check(checks, f"{P.name}: criterion", Verdict.MARTINGALE, martingale_check(P).verdict)
            self._check(checks, f"{P.name}: E(Y_k) = 1 for k <= 3",
                        [Fraction(1)] * 3, [D.expectation(k) for k in range(1, 4)])
            fpps = [D.fpp(k) for k in range(1, 4)]
            self._check(checks, f"{P.name}: FPP non-increasing", True, fpps == sorted(fpps, reverse=True))

        for label, G in [('cyclic:3', cyclic(3)), ('dihedral:4', d4)]:
            P = wreath_pattern(G, name=f"wreath({label})")
            self._check(checks, f"{P.name}: DP equals enumeration at level 2", True,
                        self._distribution(P, 2) == enumerate_joint_distribution(P, 2, self.cap))

    def _check_dihedral_dichotomy(self, checks: List[CheckResult]) -> None:
        for m in range(4, 13, 2):
            G = dihedral(m)
            found = find_index_p_normal_pairs(G, 2)
            self._check(checks, f"dihedral:{m} has an index-2 pair", True, bool(found))
            P = build_theorem12_pattern(G, dihedral_pair(m), name=f"theorem12(dihedral:{m})")
            verdict = martingale_check(P)
            self._check(checks, f"{P.name}: non-martingale at level 2",
                        (Verdict.NON_MARTINGALE, 2), (verdict.verdict, verdict.level))
        for m in range(3, 12, 2):
            self._check(checks, f"dihedral:{m} has no index-2 pair", 0,
                        len(find_index_p_normal_pairs(dihedral(m), 2)))
        for m in (3, 5):
            verdicts = {martingale_check(P).verdict for *_, P in search_coset_patterns(dihedral(m))}
            self._check(checks, f"coset patterns over dihedral:{m} are martingales",
                        {Verdict.MARTINGALE}, verdicts)

    def _check_lifting(self, checks: List[CheckResult]) -> None:
        top = generate(3, [Perm.parse('(1 2)', 3)])
        report = wreath_lifting_report(top, cyclic(3), self.cap)
        self._check(checks, "C2[C3] lifting holds on 54 elements", (True, 54), (report.holds, report.group_order))
        report = wreath_lifting_report(top, generate(3, [Perm.parse('(1 2)', 3)]), self.cap)
        self._check(checks, "lifting fails over an intransitive kernel", False, report.holds)

        patterns = [wreath_pattern(cyclic(3), name='wreath(cyclic:3)'),
                    wreath_pattern(cyclic(4), name='wreath(cyclic:4)'),
                    wreath_pattern(dihedral(4), name='wreath(dihedral:4)'),
                    full_wreath_pattern(dihedral(3), name='full-wreath(dihedral:3)'),
                    self._d4_pattern()]
        for P in patterns:
            lifting = all(afplp_check(P, n, self.cap).holds for n in (1, 2))
            deviation = self._distribution(P, 2).martingale_deviation()
            self._check(checks, f"{P.name}: lifting holds iff deviation is 0", lifting, deviation == 0)

    def _check_burnside(self, checks: List[CheckResult]) -> None:
        for spec, G in klein_catalog(5):
            self._check(checks, f"{spec}: average fixed points equals orbit count",
                        Fraction(len(G.orbits())), G.average_fixed_points())
        G, pair = build_family(FamilySpec(name=FamilyName.DIHEDRAL, params=[4]))
        totals = [coset_fixed_point_total(c.elements) for c in G.cosets(pair.n1)]
        self._check(checks, "coset fixed points over <r> in D4", [pair.n1.order] * len(totals), totals)

    def _check_monte_carlo(self, checks: List[CheckResult]) -> None:
        P = self._d4_pattern()
        seeds = self.config.get('verify.mc_seeds', 20)
        trials = self.config.get('verify.mc_trials', 100_000)
        exact = Fraction(255, 2048)
        inside = 0
        for seed in range(seeds):
            sample = monte_carlo_fpp(P, 2, trials, seed)
            if abs(sample.estimate - exact) <= 4 * sample.standard_error:
                inside += 1
        required = math.ceil(0.95 * seeds)
        self._check(checks, f"Monte Carlo within 4 sigma in at least {required} of {seeds} runs",
                    True, inside >= required)
        first = monte_carlo_fpp(P, 2, min(trials, 1000), 7).model_dump_json()
        second = monte_carlo_fpp(P, 2, min(trials, 1000), 7).model_dump_json()
        self._check(checks, "equal seeds reproduce the sample report", True, first == second)
