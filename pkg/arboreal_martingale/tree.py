"""
Automorphisms of the depth-n truncated d-ary tree, stored as portraits.

A portrait carries one permutation of {1, ..., d} for every internal vertex
(every word of length < n). Labels are indexed by the source vertex, so

    g(v x) = g(v) g_v(x)

where g_v is the section of g at v. Internally the labels are kept in level
order, lexicographic inside each level, so sections and restrictions are
slices.
"""

import functools
import itertools
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    LetterOutOfRangeError, LevelOutOfRangeError, NotationError, ShapeMismatchError, WordTooLongError,
)
from .perm import Perm
from .utils import format_word, parse_word

Word = Tuple[int, ...]


@functools.lru_cache(maxsize=None)
def level_offset(arity: int, length: int) -> int:
    """Number of vertices of length < ``length``, i.e. the level-order index of its first word."""
    return sum(arity ** k for k in range(length))


def words(arity: int, length: int) -> Iterator[Word]:
    """All words of the given length in lexicographic order."""
    return itertools.product(range(1, arity + 1), repeat=length)


def vertices(arity: int, depth: int) -> List[Word]:
    """Internal vertices of the depth-n tree in level order."""
    return [w for k in range(depth) for w in words(arity, k)]


def word_rank(arity: int, word: Sequence[int]) -> int:
    rank = 0
    for x in word:
        if not 1 <= x <= arity:
            raise LetterOutOfRangeError(f"letter {x} outside 1..{arity} in word {format_word(word)}")
        rank = rank * arity + (x - 1)
    return rank


def word_from_rank(arity: int, length: int, rank: int) -> Word:
    letters = []
    for _ in range(length):
        rank, x = divmod(rank, arity)
        letters.append(x + 1)
    return tuple(reversed(letters))


class TreePortrait:
    """An automorphism of the depth-n d-ary tree."""

    __slots__ = ('arity', 'depth', '_labels', '_hash')

    def __init__(self, arity: int, depth: int, labels: Mapping[Word, Perm]):
        """Create a portrait from a label for every internal vertex.

        Args:
            arity: Number of children per vertex (d).
            depth: Number of levels (n >= 1).
            labels: Map from every word of length < depth to a Perm of degree d.

        Raises:
            ShapeMismatchError: If a vertex is missing or a label has the wrong degree.
        """
        if depth < 1:
            raise ShapeMismatchError("portrait depth must be at least 1")
        ordered = []
        for w in vertices(arity, depth):
            perm = labels.get(w)
            if perm is None:
                raise ShapeMismatchError(f"no label at vertex {format_word(w)}")
            if perm.degree != arity:
                raise ShapeMismatchError(f"label at {format_word(w)} has degree {perm.degree}, expected {arity}")
            ordered.append(perm)
        if len(labels) != len(ordered):
            raise ShapeMismatchError("labels given for vertices outside the tree")
        self._set(arity, depth, tuple(ordered))

    def _set(self, arity: int, depth: int, labels: Tuple[Perm, ...]) -> None:
        self.arity = arity
        self.depth = depth
        self._labels = labels
        self._hash = hash((arity, depth, labels))

    @classmethod
    def _from_ordered(cls, arity: int, depth: int, labels: Tuple[Perm, ...]) -> 'TreePortrait':
        portrait = object.__new__(cls)
        portrait._set(arity, depth, labels)
        return portrait

    @classmethod
    def identity(cls, arity: int, depth: int) -> 'TreePortrait':
        e = Perm.identity(arity)
        return cls._from_ordered(arity, depth, (e,) * level_offset(arity, depth))

    @classmethod
    def from_sparse(cls, arity: int, depth: int, labels: Mapping[Word, Perm]) -> 'TreePortrait':
        """Create a portrait whose unlisted vertices carry the identity."""
        e = Perm.identity(arity)
        full = {w: e for w in vertices(arity, depth)}
        for w, perm in labels.items():
            if w not in full:
                raise WordTooLongError(f"vertex {format_word(w)} is not internal at depth {depth}")
            full[w] = perm
        return cls(arity, depth, full)

    @classmethod
    def assemble(cls, root: Perm, children: Sequence['TreePortrait']) -> 'TreePortrait':
        """Build the depth-(n+1) portrait with the given root label and sections at 1, ..., d."""
        d = root.degree
        if len(children) != d:
            raise ShapeMismatchError(f"need {d} child sections, got {len(children)}")
        depth = children[0].depth
        if any(c.arity != d or c.depth != depth for c in children):
            raise ShapeMismatchError("child sections must share arity and depth")
        labels = [root]
        for k in range(depth):
            start, stop = level_offset(d, k), level_offset(d, k + 1)
            for child in children:
                labels.extend(child._labels[start:stop])
        return cls._from_ordered(d, depth + 1, tuple(labels))

    @property
    def root(self) -> Perm:
        return self._labels[0]

    def label(self, vertex: Sequence[int]) -> Perm:
        """The permutation at an internal vertex."""
        if len(vertex) >= self.depth:
            raise WordTooLongError(f"vertex {format_word(vertex)} is not internal at depth {self.depth}")
        return self._labels[level_offset(self.arity, len(vertex)) + word_rank(self.arity, vertex)]

    def labels(self) -> Dict[Word, Perm]:
        return dict(zip(vertices(self.arity, self.depth), self._labels))

    def act(self, word: Sequence[int]) -> Word:
        """Image of a word of length <= depth."""
        if len(word) > self.depth:
            raise WordTooLongError(f"word {format_word(word)} longer than depth {self.depth}")
        d = self.arity
        image = []
        rank = 0
        for k, x in enumerate(word):
            if not 1 <= x <= d:
                raise LetterOutOfRangeError(f"letter {x} outside 1..{d} in word {format_word(word)}")
            image.append(self._labels[level_offset(d, k) + rank](x))
            rank = rank * d + (x - 1)
        return tuple(image)

    def _image_ranks(self) -> List[int]:
        """Level-order list of the rank of g(v) inside its level, for every internal vertex v."""
        d = self.arity
        result = [0]
        level = [0]
        for k in range(1, self.depth):
            start = level_offset(d, k - 1)
            next_level = []
            for r, image in enumerate(level):
                table = self._labels[start + r].table
                next_level.extend(image * d + table[x] for x in range(d))
            result.extend(next_level)
            level = next_level
        return result

    def _check_shape(self, other: 'TreePortrait') -> None:
        if self.arity != other.arity or self.depth != other.depth:
            raise ShapeMismatchError(
                f"cannot combine (d={self.arity}, n={self.depth}) with (d={other.arity}, n={other.depth})")

    def __mul__(self, other: 'TreePortrait') -> 'TreePortrait':
        """Return self o other (other applied first)."""
        self._check_shape(other)
        d = self.arity
        images = other._image_ranks()
        labels = []
        for k in range(self.depth):
            start, stop = level_offset(d, k), level_offset(d, k + 1)
            for i in range(start, stop):
                labels.append(self._labels[start + images[i]] * other._labels[i])
        return TreePortrait._from_ordered(d, self.depth, tuple(labels))

    def inverse(self) -> 'TreePortrait':
        d = self.arity
        images = self._image_ranks()
        labels: List[Optional[Perm]] = [None] * len(self._labels)
        for k in range(self.depth):
            start, stop = level_offset(d, k), level_offset(d, k + 1)
            for i in range(start, stop):
                labels[start + images[i]] = self._labels[i].inverse()
        return TreePortrait._from_ordered(d, self.depth, tuple(labels))

    def section(self, vertex: Sequence[int]) -> 'TreePortrait':
        """The portrait of depth n - |v| read off the subtree at v."""
        m = len(vertex)
        if m >= self.depth:
            raise WordTooLongError(f"vertex {format_word(vertex)} is not internal at depth {self.depth}")
        d = self.arity
        rank = word_rank(d, vertex)
        labels: List[Perm] = []
        for k in range(self.depth - m):
            start = level_offset(d, m + k) + rank * d ** k
            labels.extend(self._labels[start:start + d ** k])
        return TreePortrait._from_ordered(d, self.depth - m, tuple(labels))

    def restrict(self, depth: int) -> 'TreePortrait':
        """Drop the labels at vertices of length >= depth."""
        if not 1 <= depth <= self.depth:
            raise LevelOutOfRangeError(f"cannot restrict depth {self.depth} portrait to depth {depth}")
        return TreePortrait._from_ordered(self.arity, depth, self._labels[:level_offset(self.arity, depth)])

    def fixed_vector(self, levels: Optional[int] = None) -> Tuple[int, ...]:
        """(Y_1, ..., Y_k): fixed word counts at levels 1..k (all levels by default)."""
        levels = self.depth if levels is None else levels
        if not 1 <= levels <= self.depth:
            raise LevelOutOfRangeError(f"level {levels} outside 1..{self.depth}")
        d = self.arity
        fixed = [0]
        counts = []
        for k in range(levels):
            start = level_offset(d, k)
            next_fixed = []
            for r in fixed:
                table = self._labels[start + r].table
                next_fixed.extend(r * d + x for x in range(d) if table[x] == x)
            counts.append(len(next_fixed))
            fixed = next_fixed
        return tuple(counts)

    def fixed_words(self, level: int) -> int:
        """Number of words of the given length fixed by the portrait.

        A word x w' is fixed iff the root fixes x and the section at x fixes w'.
        """
        return self.fixed_vector(level)[level - 1]

    def is_identity(self) -> bool:
        return all(p.is_identity() for p in self._labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreePortrait):
            return NotImplemented
        return self.arity == other.arity and self.depth == other.depth and self._labels == other._labels

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> Tuple:
        return (self.arity, self.depth, self._labels)

    def to_text(self) -> str:
        """One line per vertex: ``<word or ε>: <cycle notation>``."""
        return '\n'.join(f"{format_word(w)}: {p}" for w, p in zip(vertices(self.arity, self.depth), self._labels))

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"TreePortrait(arity={self.arity}, depth={self.depth}, root={self.root})"


def compose_tree(g: TreePortrait, h: TreePortrait) -> TreePortrait:
    """Return g o h: act(compose_tree(g, h), w) = act(g, act(h, w))."""
    return g * h


def inverse_tree(g: TreePortrait) -> TreePortrait:
    return g.inverse()


def parse_portrait(text: str, arity: int, depth: Optional[int] = None) -> TreePortrait:
    """Parse the one-line-per-vertex portrait format.

    Vertices that are not listed carry the identity. Without an explicit depth
    the deepest listed vertex decides it.

    Raises:
        NotationError: On malformed or duplicate lines.
    """
    labels: Dict[Word, Perm] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if ':' not in line:
            raise NotationError(f"expected '<word>: <cycles>', got {line!r}")
        word_text, cycle_text = line.split(':', 1)
        word = parse_word(word_text)
        if word in labels:
            raise NotationError(f"duplicate vertex {format_word(word)}")
        labels[word] = Perm.parse(cycle_text, degree=arity)
    if depth is None:
        depth = max((len(w) for w in labels), default=0) + 1
    return TreePortrait.from_sparse(arity, depth, labels)
