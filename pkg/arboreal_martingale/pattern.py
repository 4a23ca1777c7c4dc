"""
Pattern groups of depth 1 and 2 and the recurrent groups they define.

A depth-2 pattern is stored per root label s as a :class:`Fiber`: the set of
level-1 label tuples (s_1, ..., s_d) that may sit below s, written as a
disjoint union of boxes B_1 x ... x B_d. A depth-1 pattern P1 is the special
case where every fiber is the single box P1 x ... x P1, which is exactly the
depth-2 window of the infinite wreath power of P1.

All structural checks and the martingale criterion work box by box, so
patterns with very large fibers never need to be enumerated.
"""

import functools
import itertools
import logging
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    CapExceededError, InvalidPairError, LevelOutOfRangeError, NonUniformFibersError, ShapeMismatchError,
    UnverifiedPatternError, WrongDepthError,
)
from .group import (
    DEFAULT_CAP, CosetSpace, FiniteGroup, SubgroupPair, generate, label_orbits, quotient_isomorphisms,
)
from .models import KernelReport, MartingaleVerdict, PatternKind, Verdict, VerificationReport
from .perm import Perm
from .tree import TreePortrait
from .utils import format_word

logger = logging.getLogger(__name__)

Box = Tuple[FrozenSet[Perm], ...]

KERNEL_LISTING_CAP = 4096


class Fiber:
    """A disjoint union of product boxes of label tuples."""

    __slots__ = ('boxes', '_sorted', '_sizes')

    def __init__(self, boxes: Iterable[Sequence[Iterable[Perm]]]):
        self.boxes: Tuple[Box, ...] = tuple(tuple(frozenset(c) for c in box) for box in boxes)
        self._sorted = tuple(tuple(tuple(sorted(c)) for c in box) for box in self.boxes)
        self._sizes = tuple(_box_size(box) for box in self.boxes)

    @property
    def size(self) -> int:
        return sum(self._sizes)

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return self.size > 0

    def tuples(self) -> Iterator[Tuple[Perm, ...]]:
        """Every label tuple in the fiber, box by box."""
        for box in self._sorted:
            yield from itertools.product(*box)

    def tuple_at(self, index: int) -> Tuple[Perm, ...]:
        """The index-th tuple in the order of :meth:`tuples`."""
        for box, size in zip(self._sorted, self._sizes):
            if index < size:
                result = []
                for coordinate in reversed(box):
                    index, r = divmod(index, len(coordinate))
                    result.append(coordinate[r])
                return tuple(reversed(result))
            index -= size
        raise IndexError("fiber index out of range")

    def projection(self, i: int) -> FrozenSet[Perm]:
        """Labels that occur at child i (1-indexed)."""
        return frozenset().union(*(box[i - 1] for box in self.boxes)) if self.boxes else frozenset()

    def labels(self) -> FrozenSet[Perm]:
        return frozenset().union(*(c for box in self.boxes for c in box)) if self.boxes else frozenset()

    def __contains__(self, labels: Sequence[Perm]) -> bool:
        return any(all(x in c for x, c in zip(labels, box)) for box in self.boxes)

    def covers(self, box: Box) -> bool:
        """True iff every tuple of the box lies in the fiber."""
        for own in self.boxes:
            if all(c <= o for c, o in zip(box, own)):
                return True
        if len(self.boxes) <= 1:
            return False
        return all(labels in self for labels in itertools.product(*box))


def _box_size(box: Box) -> int:
    size = 1
    for coordinate in box:
        size *= len(coordinate)
    return size


@functools.lru_cache(maxsize=65536)
def _set_product(a: FrozenSet[Perm], b: FrozenSet[Perm]) -> FrozenSet[Perm]:
    return frozenset(x * y for x in a for y in b)


@functools.lru_cache(maxsize=65536)
def _set_inverse(a: FrozenSet[Perm]) -> FrozenSet[Perm]:
    return frozenset(x.inverse() for x in a)


def _orbits_of(labels: Iterable[Perm], degree: int) -> List[List[int]]:
    return [sorted(block) for block in label_orbits(labels, degree)]


class PatternGroup:
    """A pattern group of depth 1 or 2 over the d-ary tree."""

    def __init__(self, arity: int, depth: int, fibers: Mapping[Perm, Fiber],
                 name: str = 'pattern', kind: PatternKind = PatternKind.EXPLICIT):
        """Create a pattern group from its fibers.

        Args:
            arity: Tree arity d.
            depth: Pattern depth, 1 or 2.
            fibers: Root label -> fiber of admissible level-1 label tuples.
                Roots with an empty fiber are dropped.
            name: Human-readable label used in reports.
            kind: How the pattern was built.
        """
        if depth not in (1, 2):
            raise WrongDepthError(f"pattern depth must be 1 or 2, got {depth}")
        self.arity = arity
        self.pattern_depth = depth
        self.name = name
        self.kind = kind
        self.fibers: Dict[Perm, Fiber] = {}
        for s in sorted(fibers):
            fiber = fibers[s]
            if s.degree != arity:
                raise ShapeMismatchError(f"root {s} has degree {s.degree}, expected {arity}")
            if any(len(box) != arity for box in fiber.boxes):
                raise ShapeMismatchError(f"fiber over {s} does not have {arity} coordinates")
            if fiber:
                self.fibers[s] = fiber
        self.roots: Tuple[Perm, ...] = tuple(self.fibers)
        self._root_group: Optional[FiniteGroup] = None
        self._counts: Dict[Tuple[int, Perm], int] = {}

    @classmethod
    def from_portraits(cls, portraits: Iterable[TreePortrait], name: str = 'explicit') -> 'PatternGroup':
        """Build a pattern from an explicit list of depth-1 or depth-2 portraits."""
        portraits = list(portraits)
        if not portraits:
            raise ShapeMismatchError("a pattern needs at least one portrait")
        d, depth = portraits[0].arity, portraits[0].depth
        if any(p.arity != d or p.depth != depth for p in portraits):
            raise ShapeMismatchError("portraits must share arity and depth")
        if depth == 1:
            roots = sorted({p.root for p in portraits})
            return cls._depth_one(d, roots, name, PatternKind.EXPLICIT)
        if depth != 2:
            raise WrongDepthError(f"pattern depth must be 1 or 2, got {depth}")
        grouped: Dict[Perm, set] = {}
        for p in portraits:
            grouped.setdefault(p.root, set()).add(tuple(p.label((i,)) for i in range(1, d + 1)))
        fibers = {s: Fiber([tuple([x] for x in t) for t in sorted(tuples)]) for s, tuples in grouped.items()}
        return cls(d, 2, fibers, name, PatternKind.EXPLICIT)

    @classmethod
    def _depth_one(cls, arity: int, roots: Sequence[Perm], name: str, kind: PatternKind) -> 'PatternGroup':
        fiber = Fiber([(roots,) * arity])
        return cls(arity, 1, {s: fiber for s in roots}, name, kind)

    @property
    def root_group(self) -> FiniteGroup:
        """The group generated by the level-1 projections."""
        if self._root_group is None:
            self._root_group = generate(self.arity, self.roots)
        return self._root_group

    def fiber(self, s: Perm) -> Fiber:
        """Admissible level-1 label tuples below a vertex labelled s (empty if s is no root)."""
        return self.fibers.get(s, _EMPTY_FIBER)

    def fiber_sizes(self) -> Dict[Perm, int]:
        """Number of pattern elements with each root label."""
        if self.pattern_depth == 1:
            return {s: 1 for s in self.roots}
        return {s: f.size for s, f in self.fibers.items()}

    @property
    def order(self) -> int:
        return sum(self.fiber_sizes().values())

    def __len__(self) -> int:
        return self.order

    def __contains__(self, portrait: TreePortrait) -> bool:
        if portrait.arity != self.arity or portrait.depth != self.pattern_depth:
            return False
        if portrait.root not in self.fibers:
            return False
        if self.pattern_depth == 1:
            return True
        return tuple(portrait.label((i,)) for i in range(1, self.arity + 1)) in self.fibers[portrait.root]

    def elements(self) -> Iterator[TreePortrait]:
        """Iterate the pattern elements as depth-k portraits."""
        return self.iter_level(self.pattern_depth, cap=None)

    def level_order(self, n: int) -> int:
        """Exact order of the level-n group G_n of the recurrent group."""
        if n < 1:
            raise LevelOutOfRangeError("levels start at 1")
        return sum(self._count(n, s) for s in self.roots)

    def _count(self, m: int, s: Perm) -> int:
        """Number of depth-m portraits with root label s whose depth-2 windows are admissible."""
        if m == 1:
            return 1
        key = (m, s)
        if key not in self._counts:
            total = 0
            for box in self.fiber(s).boxes:
                product = 1
                for coordinate in box:
                    product *= sum(self._count(m - 1, t) for t in coordinate)
                total += product
            self._counts[key] = total
        return self._counts[key]

    def iter_level(self, n: int, cap: Optional[int] = DEFAULT_CAP) -> Iterator[TreePortrait]:
        """Enumerate G_n as depth-n portraits.

        Raises:
            CapExceededError: If |G_n| is larger than ``cap``.
        """
        size = self.level_order(n)
        if cap is not None and size > cap:
            raise CapExceededError(cap, f"elements of the level-{n} group (it has {size})")
        logger.debug("enumerating %d elements of level %d of %s", size, n, self.name)
        cache: Dict[Tuple[Perm, int], List[TreePortrait]] = {}
        for s in self.roots:
            yield from self._extensions(s, n, cache)

    def _extensions(self, s: Perm, m: int, cache) -> Iterator[TreePortrait]:
        if m == 1:
            yield TreePortrait._from_ordered(self.arity, 1, (s,))
            return
        for labels in self.fiber(s).tuples():
            options = []
            for t in labels:
                key = (t, m - 1)
                if key not in cache:
                    cache[key] = list(self._extensions(t, m - 1, cache))
                options.append(cache[key])
            for children in itertools.product(*options):
                yield TreePortrait.assemble(s, children)

    def describe(self) -> str:
        return f"{self.name} (depth {self.pattern_depth}, d={self.arity}, order {self.order})"

    def __repr__(self) -> str:
        return f"PatternGroup({self.describe()})"


_EMPTY_FIBER = Fiber([])


def wreath_pattern(P1: FiniteGroup, name: Optional[str] = None) -> PatternGroup:
    """Depth-1 pattern whose recurrent group is the infinite wreath power of P1."""
    if not P1.is_transitive():
        logger.warning("wreath pattern over an intransitive group: orbits %s", P1.orbits())
    pattern = PatternGroup._depth_one(P1.degree, P1.sorted_elements, name or f"wreath(order {P1.order})",
                                      PatternKind.WREATH)
    pattern._root_group = P1
    return pattern


def full_wreath_pattern(G: FiniteGroup, name: Optional[str] = None) -> PatternGroup:
    """Depth-2 pattern G[G]: every root with every tuple of labels from G."""
    box = (G.elements,) * G.degree
    fiber = Fiber([box])
    pattern = PatternGroup(G.degree, 2, {s: fiber for s in G.sorted_elements},
                           name or f"full-wreath(order {G.order})", PatternKind.FULL_WREATH)
    pattern._root_group = G
    return pattern


def coset_pattern(G: FiniteGroup, N1: FiniteGroup, N2: FiniteGroup, sigma: Sequence[int],
                  name: Optional[str] = None) -> PatternGroup:
    """The pattern union over cosets aN1 of (aN1; sigma(aN1), ..., sigma(aN1)).

    Args:
        G: Ambient group.
        N1: Normal subgroup whose cosets carry the root.
        N2: Normal subgroup whose cosets carry the level-1 labels.
        sigma: Image N2-coset index of every N1-coset index (see CosetSpace).
    """
    q1, q2 = CosetSpace(G, N1), CosetSpace(G, N2)
    if len(sigma) != q1.size:
        raise InvalidPairError(f"sigma has {len(sigma)} entries for {q1.size} cosets")
    fibers = {}
    for i, block in enumerate(q1.blocks):
        fiber = Fiber([(q2.blocks[sigma[i]],) * G.degree])
        for s in block:
            fibers[s] = fiber
    pattern = PatternGroup(G.degree, 2, fibers, name or f"coset(|N1|={N1.order}, |N2|={N2.order})",
                           PatternKind.COSET)
    pattern._root_group = G
    return pattern


def build_theorem12_pattern(G: FiniteGroup, pair: SubgroupPair, cap: Optional[int] = None,
                            name: Optional[str] = None) -> PatternGroup:
    """Depth-2 pattern P = union over a of (aN1; sigma(a)N2, ..., sigma(a)N2).

    |P| = |G| * |N2|^d. The fibers are kept in product form; ``cap`` only
    bounds the pattern order when given.

    Raises:
        InvalidPairError: If the pair is not valid for G.
        CapExceededError: If a cap is given and |P| is larger.
    """
    if pair.ambient != G:
        raise InvalidPairError("pair was found for another ambient group")
    problems = pair.violations()
    if problems:
        raise InvalidPairError("; ".join(problems))
    order = G.order * pair.n2.order ** G.degree
    if cap is not None and order > cap:
        raise CapExceededError(cap, "pattern elements")
    pattern = coset_pattern(G, pair.n1, pair.n2, pair.sigma_map(),
                            name or f"theorem12(order {G.order}, p={pair.p})")
    pattern.kind = PatternKind.THEOREM12
    logger.debug("built %s with %d elements", pattern.name, order)
    return pattern


def require_uniform_pattern(P: PatternGroup) -> VerificationReport:
    """Verify P and insist on a self-replicating group with equal fiber sizes.

    Raises:
        UnverifiedPatternError: If P is not a self-replicating group.
        NonUniformFibersError: If fiber sizes differ.
    """
    report = verify_pattern_group(P)
    if not (report.is_group and report.self_replicating):
        raise UnverifiedPatternError(f"{P.name} failed verification: {'; '.join(report.problems)}")
    if not report.uniform_fibers:
        raise NonUniformFibersError(f"{P.name} has fiber sizes {report.fiber_sizes}")
    return report


def verify_pattern_group(P: PatternGroup) -> VerificationReport:
    """Check the group axioms, recurrence and the fiber structure of a pattern.

    Closure and inverses are checked box by box: the products of a box over s
    with a box over t form the box with coordinates A_{t(i)} * B_i, which
    must lie in the fiber over st.
    """
    d = P.arity
    problems: List[str] = []
    roots = set(P.roots)

    closure = True
    for s in P.roots:
        for t in P.roots:
            st = s * t
            target = P.fiber(st)
            if not target:
                closure = False
                problems.append(f"root product {s} * {t} = {st} has no fiber")
                break
            for a in P.fiber(s).boxes:
                for b in P.fiber(t).boxes:
                    composite = tuple(_set_product(a[t(i) - 1], b[i - 1]) for i in range(1, d + 1))
                    if not target.covers(composite):
                        closure = False
                        problems.append(f"products over roots {s} and {t} leave the pattern")
                        break
                if not closure:
                    break
            if not closure:
                break
        if not closure:
            break

    inverses = True
    for s in P.roots:
        s_inv = s.inverse()
        target = P.fiber(s_inv)
        for a in P.fiber(s).boxes:
            image = tuple(_set_inverse(a[s_inv(j) - 1]) for j in range(1, d + 1))
            if not target or not target.covers(image):
                inverses = False
                problems.append(f"inverses of elements over root {s} leave the pattern")
                break
        if not inverses:
            break

    e = Perm.identity(d)
    identity = e in roots and (e,) * d in P.fiber(e)
    if not identity:
        problems.append("identity is not in the pattern")

    root_transitive = P.root_group.is_transitive()
    if not root_transitive:
        problems.append("root group is not transitive")

    self_replicating = True
    for s in P.roots:
        missing = P.fiber(s).labels() - roots
        if missing:
            self_replicating = False
            problems.append(f"section label {min(missing)} below root {s} has no fiber")
            break

    sizes = sorted(set(P.fiber_sizes().values()))
    extension_sizes = {f.size for f in P.fibers.values()}
    uniform_fibers = len(sizes) <= 1 and len(extension_sizes) <= 1
    if not uniform_fibers:
        problems.append(f"fiber sizes differ: {sizes}")

    recurrent = True
    for i in range(1, d + 1):
        sections = set()
        for s in P.roots:
            if s(i) == i:
                sections |= P.fiber(s).projection(i)
        if sections != roots:
            recurrent = False
            problems.append(f"stabilizer sections at vertex {i} do not cover the root group")
            break

    report = VerificationReport(
        pattern=P.name, depth=P.pattern_depth, order=P.order,
        closure=closure, inverses=inverses, identity=identity,
        root_transitive=root_transitive, self_replicating=self_replicating,
        uniform_fibers=uniform_fibers, recurrent=recurrent,
        fiber_sizes=sizes, problems=problems,
    )
    logger.debug("verified %s: %s", P.name, "ok" if report.passed else problems)
    return report


def restriction_kernel(P: PatternGroup, cap: int = KERNEL_LISTING_CAP) -> KernelReport:
    """Elements of a depth-2 pattern with identity root and the orbits they induce below each level-1 vertex.

    The kernel elements themselves are listed only when there are at most ``cap`` of them.

    Raises:
        WrongDepthError: For depth-1 patterns.
    """
    if P.pattern_depth != 2:
        raise WrongDepthError("the restriction kernel needs a depth-2 pattern")
    e = Perm.identity(P.arity)
    fiber = P.fiber(e)
    per_child = {format_word((i,)): _orbits_of(fiber.projection(i), P.arity) for i in range(1, P.arity + 1)}
    elements = None
    if fiber.size <= cap:
        elements = [TreePortrait.assemble(e, [TreePortrait._from_ordered(P.arity, 1, (x,)) for x in labels])
                    for labels in fiber.tuples()]
    return KernelReport(kernel_order=fiber.size, per_child_orbits=per_child, kernel_elements=elements)


def martingale_check(P: PatternGroup) -> MartingaleVerdict:
    """Decide the kernel transitivity criterion at levels 1, 2 and 3.

    H_1 is the root group. H_2 consists of the depth-2 windows with identity
    root, so below level-1 vertex i it acts through the i-th projection of the
    fiber over the identity. H_3 fixes levels 1 and 2, so every level-1
    vertex carries the identity and each level-2 vertex (i, j) again acts
    through the j-th projection of the same fiber. The first failing vertex in
    lexicographic order is the witness.

    Raises:
        UnverifiedPatternError: If the pattern is not a self-replicating group.
    """
    report = verify_pattern_group(P)
    if not (report.is_group and report.self_replicating):
        raise UnverifiedPatternError(f"{P.name} failed verification: {'; '.join(report.problems)}")

    d = P.arity
    checked = [1, 2, 3]
    root_orbits = [sorted(block) for block in P.root_group.orbits()]
    if len(root_orbits) > 1:
        return MartingaleVerdict(verdict=Verdict.NON_MARTINGALE, checked_levels=checked,
                                 level=1, vertex=[], orbits=root_orbits)

    kernel = P.fiber(Perm.identity(d))
    child_orbits = {j: _orbits_of(kernel.projection(j), d) for j in range(1, d + 1)}
    for i in range(1, d + 1):
        if len(child_orbits[i]) > 1:
            return MartingaleVerdict(verdict=Verdict.NON_MARTINGALE, checked_levels=checked,
                                     level=2, vertex=[i], orbits=child_orbits[i])
    for i, j in itertools.product(range(1, d + 1), repeat=2):
        if len(child_orbits[j]) > 1:
            return MartingaleVerdict(verdict=Verdict.NON_MARTINGALE, checked_levels=checked,
                                     level=3, vertex=[i, j], orbits=child_orbits[j])
    return MartingaleVerdict(verdict=Verdict.MARTINGALE, checked_levels=checked)


def search_coset_patterns(G: FiniteGroup) -> List[Tuple[FiniteGroup, FiniteGroup, Tuple[int, ...], PatternGroup]]:
    """Every coset pattern over G that passes verification.

    Runs over ordered pairs (N1, N2) of normal subgroups of equal index and
    every isomorphism G/N1 -> G/N2.
    """
    normals = G.normal_subgroups()
    found = []
    for N1 in normals:
        for N2 in normals:
            if N1.order != N2.order:
                continue
            for sigma in quotient_isomorphisms(G, N1, N2):
                pattern = coset_pattern(G, N1, N2, sigma)
                if verify_pattern_group(pattern).passed:
                    found.append((N1, N2, sigma, pattern))
    logger.debug("%d verified coset patterns over a group of order %d", len(found), G.order)
    return found
