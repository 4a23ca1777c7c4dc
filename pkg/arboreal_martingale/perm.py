"""
Permutations of {1, ..., d}.

Points are 1-indexed in every public method; the image table is stored
0-based. Composition is a left action: ``p * q`` applies ``q`` first.
"""

import functools
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from .exceptions import DegreeMismatchError, LetterOutOfRangeError, NotationError
from .utils import format_cycles, parse_cycles


@functools.total_ordering
class Perm:
    """A bijection of {1, ..., d}."""

    __slots__ = ('_table', '_hash')

    def __init__(self, images: Sequence[int]):
        """Create a permutation from its 1-indexed image list.

        Args:
            images: Entry i (counting from 1) is the image of point i.
        """
        table = tuple(int(x) - 1 for x in images)
        if not table:
            raise NotationError("a permutation needs degree >= 1")
        if sorted(table) != list(range(len(table))):
            raise NotationError(f"images {tuple(images)} are not a bijection of 1..{len(table)}")
        self._table = table
        self._hash = hash(table)

    @classmethod
    def _from_table(cls, table: Tuple[int, ...]) -> 'Perm':
        perm = object.__new__(cls)
        perm._table = table
        perm._hash = hash(table)
        return perm

    @classmethod
    def identity(cls, degree: int) -> 'Perm':
        if degree < 1:
            raise NotationError("a permutation needs degree >= 1")
        return cls._from_table(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> 'Perm':
        """Build a permutation of the given degree from disjoint 1-indexed cycles."""
        table = list(range(degree))
        for cycle in cycles:
            for a, b in zip(cycle, tuple(cycle[1:]) + tuple(cycle[:1])):
                if not 1 <= a <= degree:
                    raise NotationError(f"point {a} outside 1..{degree}")
                table[a - 1] = b - 1
        if sorted(table) != list(range(degree)):
            raise NotationError(f"cycles {list(cycles)} are not disjoint")
        return cls._from_table(tuple(table))

    @classmethod
    def parse(cls, text: str, degree: Optional[int] = None) -> 'Perm':
        """Parse cycle notation such as "(1 2 3 4)(5 6)" or "id".

        Without an explicit degree the largest point mentioned is used.
        """
        cycles = parse_cycles(text)
        largest = max((max(c) for c in cycles), default=1)
        if degree is None:
            degree = largest
        elif largest > degree:
            raise NotationError(f"point {largest} outside 1..{degree} in {text!r}")
        return cls.from_cycles(cycles, degree)

    @property
    def degree(self) -> int:
        return len(self._table)

    @property
    def table(self) -> Tuple[int, ...]:
        """0-indexed image table."""
        return self._table

    @property
    def images(self) -> Tuple[int, ...]:
        """1-indexed images of 1, ..., d."""
        return tuple(x + 1 for x in self._table)

    def __call__(self, point: int) -> int:
        if not 1 <= point <= len(self._table):
            raise LetterOutOfRangeError(f"point {point} outside 1..{len(self._table)}")
        return self._table[point - 1] + 1

    def __mul__(self, other: 'Perm') -> 'Perm':
        """Return self o other, the permutation x -> self(other(x))."""
        if len(self._table) != len(other._table):
            raise DegreeMismatchError(f"cannot compose degree {self.degree} with degree {other.degree}")
        table = self._table
        return Perm._from_table(tuple(table[j] for j in other._table))

    def __pow__(self, exponent: int) -> 'Perm':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Perm.identity(self.degree)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> 'Perm':
        inv = [0] * len(self._table)
        for i, j in enumerate(self._table):
            inv[j] = i
        return Perm._from_table(tuple(inv))

    def conjugate(self, g: 'Perm') -> 'Perm':
        """Return g o self o g^-1."""
        return g * self * g.inverse()

    def to_sympy(self) -> Permutation:
        """The same bijection as a sympy permutation on 0, ..., d - 1."""
        return Permutation(list(self._table))

    @classmethod
    def from_array_form(cls, array_form: Sequence[int]) -> 'Perm':
        """Inverse of :meth:`to_sympy`, from a 0-based image list."""
        return cls._from_table(tuple(int(x) for x in array_form))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._table))

    def fixed_points(self) -> FrozenSet[int]:
        return frozenset(i + 1 for i, j in enumerate(self._table) if i == j)

    def fixed_point_count(self) -> int:
        return sum(1 for i, j in enumerate(self._table) if i == j)

    def cycles(self, include_fixed: bool = False) -> List[Tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest point, ordered by that point."""
        seen = [False] * len(self._table)
        result = []
        for start in range(len(self._table)):
            if seen[start]:
                continue
            cycle = []
            x = start
            while not seen[x]:
                seen[x] = True
                cycle.append(x + 1)
                x = self._table[x]
            if include_fixed or len(cycle) > 1:
                result.append(tuple(cycle))
        return result

    def cycle_type(self) -> Tuple[int, ...]:
        """Cycle lengths including 1-cycles, in non-increasing order."""
        return tuple(sorted((len(c) for c in self.cycles(include_fixed=True)), reverse=True))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        return self._table == other._table

    def __lt__(self, other: 'Perm') -> bool:
        return (len(self._table), self._table) < (len(other._table), other._table)

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_cycles(self.cycles())

    def __repr__(self) -> str:
        return f"Perm.parse({str(self)!r}, degree={self.degree})"


def compose(p: Perm, q: Perm) -> Perm:
    """Return p o q (q applied first)."""
    return p * q


def inverse(p: Perm) -> Perm:
    return p.inverse()


def fixed_points(p: Perm) -> FrozenSet[int]:
    return p.fixed_points()


def cycle_type(p: Perm) -> Tuple[int, ...]:
    return p.cycle_type()
