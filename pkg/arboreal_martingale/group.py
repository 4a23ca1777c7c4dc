"""
Finite permutation groups given by generators and enumerated in full.

Orbits, block systems, normality and normal closures come from
``sympy.combinatorics``; permutations cross into sympy's 0-based array form
only at this module's boundary. Cosets, quotients by normal subgroups, the
normal-subgroup lattice and the search for index-p normal subgroups that
drives the non-martingale construction work on the explicit element set.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr
from sympy import isprime
from sympy.combinatorics import PermutationGroup

from .exceptions import (
    CapExceededError, DegreeMismatchError, InvalidPairError, InvalidParamsError,
    NotASubgroupError, NotTransitiveError,
)
from .perm import Perm
from .utils import format_partition

logger = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000


def to_sympy_group(degree: int, generators: Iterable[Perm]) -> PermutationGroup:
    """The sympy group on 0, ..., d - 1 generated by the given permutations."""
    gens = [g.to_sympy() for g in generators]
    return PermutationGroup(gens or [Perm.identity(degree).to_sympy()])


def enumerate_group(group: PermutationGroup, cap: int = DEFAULT_CAP) -> FrozenSet[Perm]:
    """Every element of a sympy group, converted back to :class:`Perm`.

    Raises:
        CapExceededError: If the group has more than ``cap`` elements.
    """
    if group.order() > cap:
        raise CapExceededError(cap, "elements")
    return frozenset(Perm.from_array_form(a) for a in group.generate(af=True))


def label_orbits(perms: Iterable[Perm], degree: int) -> List[FrozenSet[int]]:
    """Orbits of <perms> on {1, ..., d}, ordered by smallest point."""
    orbits = to_sympy_group(degree, perms).orbits()
    return sorted((frozenset(x + 1 for x in orbit) for orbit in orbits), key=min)


@dataclass(frozen=True)
class Coset:
    """A left coset gH: its smallest element and all of its elements."""
    representative: Perm
    elements: FrozenSet[Perm]


class FiniteGroup:
    """A permutation group of degree d with its full element set."""

    __slots__ = ('degree', 'generators', '_elements', '_sorted', '_orbits', '_sympy')

    def __init__(self, degree: int, generators: Sequence[Perm], elements: Iterable[Perm],
                 group: Optional[PermutationGroup] = None):
        """Wrap an already-closed element set; use :func:`generate` to build one."""
        self.degree = degree
        self.generators: Tuple[Perm, ...] = tuple(generators)
        self._elements: FrozenSet[Perm] = frozenset(elements)
        self._sorted: Optional[Tuple[Perm, ...]] = None
        self._orbits: Optional[List[FrozenSet[int]]] = None
        self._sympy = group

    @classmethod
    def from_elements(cls, degree: int, elements: Iterable[Perm]) -> 'FiniteGroup':
        """Build a group from a set of permutations that is claimed to be closed.

        A small generating set is chosen greedily in sorted order.

        Raises:
            NotASubgroupError: If the elements do not form a group.
        """
        members = frozenset(elements)
        if not members:
            raise NotASubgroupError("a group needs at least the identity")
        generators: List[Perm] = []
        current = frozenset([Perm.identity(degree)])
        group = to_sympy_group(degree, generators)
        for x in sorted(members):
            if x.degree != degree:
                raise DegreeMismatchError(f"element {x} does not have degree {degree}")
            if x in current:
                continue
            generators.append(x)
            group = to_sympy_group(degree, generators)
            if group.order() > len(members):
                raise NotASubgroupError("element set is not closed under composition")
            current = enumerate_group(group)
        if current != members:
            raise NotASubgroupError("element set is not closed under composition")
        return cls(degree, generators, members, group)

    @classmethod
    def from_sympy(cls, group: PermutationGroup, generators: Optional[Sequence[Perm]] = None,
                   cap: int = DEFAULT_CAP) -> 'FiniteGroup':
        """Enumerate a sympy group, presented by its own generators or by the given ones.

        Raises:
            NotASubgroupError: If the given generators do not generate the group.
        """
        degree = group.degree
        if generators is None:
            generators = [Perm.from_array_form(g.array_form) for g in group.generators]
        elif not (all(group.contains(g.to_sympy()) for g in generators)
                  and to_sympy_group(degree, generators).order() == group.order()):
            raise NotASubgroupError("generators do not generate the group")
        return cls(degree, generators, enumerate_group(group, cap), group)

    @property
    def sympy_group(self) -> PermutationGroup:
        if self._sympy is None:
            self._sympy = to_sympy_group(self.degree, self.generators)
        return self._sympy

    @property
    def order(self) -> int:
        return len(self._elements)

    @property
    def elements(self) -> FrozenSet[Perm]:
        return self._elements

    @property
    def sorted_elements(self) -> Tuple[Perm, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._elements))
        return self._sorted

    @property
    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def __contains__(self, perm: Perm) -> bool:
        return perm in self._elements

    def __iter__(self) -> Iterator[Perm]:
        return iter(self.sorted_elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.degree == other.degree and self._elements == other._elements

    def __hash__(self) -> int:
        return hash((self.degree, self._elements))

    def __repr__(self) -> str:
        gens = ', '.join(str(g) for g in self.generators) or 'id'
        return f"FiniteGroup(degree={self.degree}, order={self.order}, generators=[{gens}])"

    def is_trivial(self) -> bool:
        return self.order == 1

    def subgroup(self, generators: Sequence[Perm], cap: int = DEFAULT_CAP) -> 'FiniteGroup':
        """The subgroup generated by the given elements of this group."""
        H = generate(self.degree, generators, cap)
        if not H.is_subgroup_of(self):
            raise NotASubgroupError("generators are not elements of the group")
        return H

    def is_subgroup_of(self, other: 'FiniteGroup') -> bool:
        return self.degree == other.degree and self._elements <= other._elements


    def orbits(self) -> List[FrozenSet[int]]:
        """Orbit partition of {1, ..., d}, blocks ordered by smallest point."""
        if self._orbits is None:
            self._orbits = label_orbits(self.generators, self.degree)
        return self._orbits

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def _require_transitive(self) -> None:
        if not self.is_transitive():
            raise NotTransitiveError(f"orbits {format_partition(self.orbits())}: group is not transitive")

    def minimal_block(self, point: int) -> FrozenSet[int]:
        """Smallest block of imprimitivity containing 1 and the given point.

        Raises:
            NotTransitiveError: If the group is not transitive.
        """
        self._require_transitive()
        blocks = self.sympy_group.minimal_block([0, point - 1])
        return frozenset(x + 1 for x, root in enumerate(blocks) if root == blocks[0])

    def is_primitive(self) -> bool:
        """True iff the group preserves no non-trivial partition of {1, ..., d}.

        Raises:
            NotTransitiveError: Primitivity is only defined for transitive groups.
        """
        self._require_transitive()
        primitive = self.sympy_group.is_primitive(randomized=False)
        if not primitive:
            logger.debug("%r preserves a block system", self)
        return primitive

    def is_normal(self, H: 'FiniteGroup') -> bool:
        """True iff g H g^-1 = H for every g in this group.

        Raises:
            NotASubgroupError: If H is not contained in this group.
        """
        if not H.is_subgroup_of(self):
            raise NotASubgroupError("H is not a subgroup of G")
        return H.sympy_group.is_normal(self.sympy_group)

    def cosets(self, H: 'FiniteGroup') -> List[Coset]:
        """Left cosets gH, ordered by their smallest element.

        Raises:
            NotASubgroupError: If H is not contained in this group.
        """
        space = CosetSpace(self, H)
        return [Coset(rep, block) for rep, block in zip(space.representatives, space.blocks)]

    def normal_closure(self, seeds: Iterable[Perm], cap: int = DEFAULT_CAP) -> 'FiniteGroup':
        """Smallest normal subgroup of this group containing the seeds."""
        gens = [s for s in dict.fromkeys(seeds) if not s.is_identity()]
        if not gens:
            return generate(self.degree, [], cap)
        closure = self.sympy_group.normal_closure([g.to_sympy() for g in gens])
        return FiniteGroup.from_elements(self.degree, enumerate_group(closure, cap))

    def derived_subgroup(self) -> 'FiniteGroup':
        return FiniteGroup.from_elements(self.degree, enumerate_group(self.sympy_group.derived_subgroup()))

    def normal_subgroups(self) -> List['FiniteGroup']:
        """Every normal subgroup, ordered by size and then by element list.

        Each normal subgroup is a join of normal closures of single elements.
        """
        closures: Dict[FrozenSet[Perm], FiniteGroup] = {}
        for g in self.sorted_elements:
            N = self.normal_closure([g])
            closures.setdefault(N.elements, N)

        found = dict(closures)
        frontier = list(found.values())
        while frontier:
            new_frontier = []
            for A in frontier:
                for B in closures.values():
                    if B.is_subgroup_of(A):
                        continue
                    J = generate(self.degree, A.generators + B.generators)
                    if J.elements not in found:
                        found[J.elements] = J
                        new_frontier.append(J)
            frontier = new_frontier
        return sorted(found.values(), key=lambda N: (N.order, N.sorted_elements))

    def average_fixed_points(self) -> Fraction:
        """(1/|G|) * sum of |Fix(g)|, which equals the number of orbits."""
        return Fraction(sum(g.fixed_point_count() for g in self._elements), self.order)


def generate(degree: int, generators: Sequence[Perm], cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Enumerate the group generated by the given permutations.

    An empty generator list yields the trivial group of the given degree.

    Raises:
        DegreeMismatchError: If a generator has another degree.
        CapExceededError: If the group has more than ``cap`` elements.
    """
    if cap < 1:
        raise InvalidParamsError("cap must be at least 1")
    for g in generators:
        if g.degree != degree:
            raise DegreeMismatchError(f"generator {g} has degree {g.degree}, expected {degree}")
    gens = list(dict.fromkeys(generators))
    group = to_sympy_group(degree, [g for g in gens if not g.is_identity()])
    elements = enumerate_group(group, cap)
    logger.debug("generated group of degree %d and order %d", degree, len(elements))
    return FiniteGroup(degree, gens, elements, group)



def coset_fixed_point_total(coset: Iterable[Perm]) -> int:
    """Sum of |Fix(a)| over the elements of a coset."""
    return sum(a.fixed_point_count() for a in coset)


class CosetSpace:
    """Left cosets gH of a subgroup H, numbered by their smallest element.

    Coset 0 is H itself. ``multiply`` is the quotient multiplication and is
    only meaningful when H is normal.
    """

    def __init__(self, group: FiniteGroup, subgroup: FiniteGroup):
        if not subgroup.is_subgroup_of(group):
            raise NotASubgroupError("H is not a subgroup of G")
        self.group = group
        self.subgroup = subgroup
        self.representatives: List[Perm] = []
        self.blocks: List[FrozenSet[Perm]] = []
        self._index: Dict[Perm, int] = {}
        for g in group.sorted_elements:
            if g in self._index:
                continue
            i = len(self.representatives)
            block = frozenset(g * h for h in subgroup.elements)
            self.representatives.append(g)
            self.blocks.append(block)
            for x in block:
                self._index[x] = i

    @property
    def size(self) -> int:
        return len(self.representatives)

    def index(self, g: Perm) -> int:
        return self._index[g]

    def multiply(self, i: int, j: int) -> int:
        return self._index[self.representatives[i] * self.representatives[j]]


def extend_coset_map(q1: CosetSpace, q2: CosetSpace,
                     generator_images: Sequence[Tuple[Perm, Perm]]) -> Optional[List[int]]:
    """Extend prescribed coset images multiplicatively to a map G/N1 -> G/N2.

    Args:
        q1: Cosets of N1 (normal).
        q2: Cosets of N2 (normal).
        generator_images: Pairs (a, b) meaning aN1 -> bN2.

    Returns:
        The image index of every N1-coset, or None if the prescription is
        inconsistent, does not reach every coset, or is not a bijection.
    """
    if q1.size != q2.size:
        return None
    gens = [(q1.index(a), q2.index(b)) for a, b in generator_images]
    mapping = {0: 0}
    frontier = [0]
    while frontier:
        c = frontier.pop()
        for a, b in gens:
            target = q1.multiply(c, a)
            image = q2.multiply(mapping[c], b)
            known = mapping.get(target)
            if known is None:
                mapping[target] = image
                frontier.append(target)
            elif known != image:
                return None
    if len(mapping) != q1.size or len(set(mapping.values())) != q2.size:
        return None
    return [mapping[i] for i in range(q1.size)]


def quotient_isomorphisms(G: FiniteGroup, N1: FiniteGroup, N2: FiniteGroup) -> List[Tuple[int, ...]]:
    """All isomorphisms G/N1 -> G/N2 as tuples of coset indices.

    Candidates are fixed by the images of the generators' cosets.
    """
    q1, q2 = CosetSpace(G, N1), CosetSpace(G, N2)
    if q1.size != q2.size:
        return []
    gens = [g for g in G.generators if q1.index(g) != 0]
    found = []
    for images in itertools.product(range(q2.size), repeat=len(gens)):
        pairs = [(g, q2.representatives[i]) for g, i in zip(gens, images)]
        mapping = extend_coset_map(q1, q2, pairs)
        if mapping is not None and tuple(mapping) not in found:
            found.append(tuple(mapping))
    return found


class SubgroupPair(BaseModel):
    """Normal subgroups N1 (transitive) and N2 (intransitive) of index p with
    a coset isomorphism sigma: G/N1 -> G/N2 sending N1 to N2.

    ``sigma`` pairs a representative of every N1-coset with a representative
    of its image N2-coset.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ambient: FiniteGroup
    n1: FiniteGroup
    n2: FiniteGroup
    p: int
    sigma: Tuple[Tuple[Perm, Perm], ...]

    _q1: Optional[CosetSpace] = PrivateAttr(default=None)
    _q2: Optional[CosetSpace] = PrivateAttr(default=None)

    @classmethod
    def build(cls, ambient: FiniteGroup, n1: FiniteGroup, n2: FiniteGroup,
              sigma_pairs: Optional[Sequence[Tuple[Perm, Perm]]] = None) -> 'SubgroupPair':
        """Create a pair, deriving the canonical sigma unless one is prescribed.

        The canonical sigma sends the coset of the smallest element outside N1
        to the coset of the smallest element outside N2. A prescribed sigma is
        a list of (a, b) meaning aN1 -> bN2, extended multiplicatively.

        Raises:
            InvalidPairError: If sigma names a non-member of G or is not an
                isomorphism of equal-size quotients.
        """
        q1, q2 = CosetSpace(ambient, n1), CosetSpace(ambient, n2)
        if q1.size != q2.size:
            raise InvalidPairError(f"indices differ: [G:N1] = {q1.size}, [G:N2] = {q2.size}")
        if sigma_pairs is None:
            outside1 = [g for g in ambient.sorted_elements if g not in n1]
            outside2 = [g for g in ambient.sorted_elements if g not in n2]
            sigma_pairs = [(outside1[0], outside2[0])] if outside1 else []
        for a, b in sigma_pairs:
            for x in (a, b):
                if x not in ambient:
                    raise InvalidPairError(f"sigma entry {a} -> {b}: {x} is not an element of G")
        mapping = extend_coset_map(q1, q2, sigma_pairs)
        if mapping is None:
            raise InvalidPairError("coset pairing does not extend to an isomorphism G/N1 -> G/N2")
        sigma = tuple((q1.representatives[i], q2.representatives[j]) for i, j in enumerate(mapping))
        pair = cls(ambient=ambient, n1=n1, n2=n2, p=q1.size, sigma=sigma)
        pair._q1, pair._q2 = q1, q2
        return pair

    def _spaces(self) -> Tuple[CosetSpace, CosetSpace]:
        if self._q1 is None or self._q2 is None:
            self._q1 = CosetSpace(self.ambient, self.n1)
            self._q2 = CosetSpace(self.ambient, self.n2)
        return self._q1, self._q2

    def sigma_map(self) -> List[int]:
        """Image N2-coset index of every N1-coset index."""
        q1, q2 = self._spaces()
        mapping = [0] * q1.size
        for a, b in self.sigma:
            mapping[q1.index(a)] = q2.index(b)
        return mapping

    def sigma_coset(self, a: Perm) -> FrozenSet[Perm]:
        """The elements of sigma(a N1), a coset of N2."""
        q1, q2 = self._spaces()
        return q2.blocks[self.sigma_map()[q1.index(a)]]

    def violations(self) -> List[str]:
        """Invariants of the pair that fail; empty when the pair is valid."""
        problems = []
        G = self.ambient
        for name, N in (('N1', self.n1), ('N2', self.n2)):
            if not N.is_subgroup_of(G):
                problems.append(f"{name} is not a subgroup of G")
                continue
            if not G.is_normal(N):
                problems.append(f"{name} is not normal in G")
            if G.order != self.p * N.order:
                problems.append(f"{name} does not have index {self.p}")
        if not isprime(self.p):
            problems.append(f"index {self.p} is not prime")
        if not self.n1.is_transitive():
            problems.append("N1 is not transitive")
        if self.n2.is_transitive():
            problems.append("N2 is transitive")
        if problems:
            return problems

        q1, q2 = self._spaces()
        mapping = self.sigma_map()
        if len(self.sigma) != q1.size or sorted(mapping) != list(range(q2.size)):
            problems.append("sigma is not a bijection of cosets")
        elif mapping[0] != 0:
            problems.append("sigma does not send N1 to N2")
        else:
            for i in range(q1.size):
                for j in range(q1.size):
                    if mapping[q1.multiply(i, j)] != q2.multiply(mapping[i], mapping[j]):
                        problems.append("sigma is not a homomorphism")
                        return problems
        return problems


def index_p_normal_subgroups(G: FiniteGroup, p: int) -> List[FiniteGroup]:
    """All normal subgroups of index p.

    They are the preimages of the hyperplanes of the elementary abelian
    quotient G/K with K = <[G, G], g^p>.
    """
    if not isprime(p):
        raise InvalidParamsError(f"p = {p} is not prime")
    gens = G.generators
    seeds = [a.inverse() * b.inverse() * a * b for a in gens for b in gens] + [g ** p for g in gens]
    K = G.normal_closure(seeds)
    quotient = CosetSpace(G, K)

    coords: Dict[int, Dict[int, int]] = {0: {}}
    rank = 0
    for g in gens:
        if quotient.index(g) in coords:
            continue
        current = list(coords.items())
        for t in range(1, p):
            c_t = quotient.index(g ** t)
            for c0, vector in current:
                extended = dict(vector)
                extended[rank] = t
                coords[quotient.multiply(c0, c_t)] = extended
        rank += 1
    logger.debug("G/K has order %d = %d^%d", quotient.size, p, rank)

    subgroups = []
    for phi in itertools.product(range(p), repeat=rank):
        leading = next((c for c in phi if c), 0)
        if leading != 1:
            continue
        kernel = {c for c, v in coords.items()
                  if sum(phi[j] * v.get(j, 0) for j in range(rank)) % p == 0}
        members = [g for g in G.sorted_elements if quotient.index(g) in kernel]
        subgroups.append(FiniteGroup.from_elements(G.degree, members))
    return subgroups


def find_index_p_normal_pairs(G: FiniteGroup, p: int) -> List[SubgroupPair]:
    """Every (N1 transitive, N2 intransitive) pair of index-p normal subgroups.

    Raises:
        NotTransitiveError: If G is not transitive.
        InvalidParamsError: If p is not prime.
    """
    if not isprime(p):
        raise InvalidParamsError(f"p = {p} is not prime")
    if not G.is_transitive():
        raise NotTransitiveError("the ambient group must be transitive")
    subgroups = index_p_normal_subgroups(G, p)
    transitive = [N for N in subgroups if N.is_transitive()]
    intransitive = [N for N in subgroups if not N.is_transitive()]
    logger.debug("%d index-%d normal subgroups: %d transitive, %d intransitive",
                 len(subgroups), p, len(transitive), len(intransitive))
    return [SubgroupPair.build(G, n1, n2) for n1 in transitive for n2 in intransitive]
