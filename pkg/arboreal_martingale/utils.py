"""
Utility functions for notation parsing and formatting.
"""

import re
from fractions import Fraction
from typing import Iterable, List, Sequence, Set, Tuple

from .exceptions import NotationError

EMPTY_WORD_TOKENS = ('ε', '-', 'e', '')
IDENTITY_TOKENS = ('id', 'e', '()')

_CYCLE_RE = re.compile(r'\(([^()]*)\)')


def parse_cycles(text: str) -> List[Tuple[int, ...]]:
    """Parse cycle notation into a list of 1-indexed cycles.

    Args:
        text: String such as "(1 2 3 4)(5 6)" or "id". Whitespace between and
            inside cycles is ignored; points inside a cycle may be separated by
            spaces or commas.

    Returns:
        List of cycles, each a tuple of points; 1-cycles are kept as given.

    Raises:
        NotationError: If the text is not a product of disjoint cycles.
    """
    stripped = text.strip()
    if stripped.lower() in IDENTITY_TOKENS:
        return []

    cycles: List[Tuple[int, ...]] = []
    seen: Set[int] = set()
    position = 0
    for match in _CYCLE_RE.finditer(stripped):
        gap = stripped[position:match.start()]
        if gap.strip():
            raise NotationError(f"unexpected text {gap.strip()!r} in {text!r}")
        position = match.end()

        tokens = [t for t in re.split(r'[\s,]+', match.group(1).strip()) if t]
        try:
            cycle = tuple(int(t) for t in tokens)
        except ValueError:
            raise NotationError(f"non-integer point in cycle ({match.group(1)}) of {text!r}")
        if any(x < 1 for x in cycle):
            raise NotationError(f"points are 1-indexed, got {cycle} in {text!r}")
        if len(set(cycle)) != len(cycle) or seen.intersection(cycle):
            raise NotationError(f"cycles must be disjoint: {text!r}")
        seen.update(cycle)
        if cycle:
            cycles.append(cycle)

    if stripped[position:].strip() or position == 0:
        raise NotationError(f"cannot parse cycle notation {text!r}")
    return cycles


def format_cycles(cycles: Iterable[Sequence[int]]) -> str:
    """Format non-trivial cycles as a string; the identity prints as "id"."""
    parts = ['(' + ' '.join(str(x) for x in cycle) + ')' for cycle in cycles if len(cycle) > 1]
    return ''.join(parts) if parts else 'id'


def split_top_level(text: str, separator: str = ',') -> List[str]:
    """Split on a separator that is not enclosed in parentheses."""
    parts: List[str] = []
    depth = 0
    current: List[str] = []
    for ch in text:
        if ch == '(':
            depth += 1
        elif ch == ')':
            depth -= 1
        if ch == separator and depth == 0:
            parts.append(''.join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = ''.join(current).strip()
    if tail or parts:
        parts.append(tail)
    return [p for p in parts if p]


def parse_word(text: str) -> Tuple[int, ...]:
    """Parse a word such as "2 1" (or "ε" for the empty word)."""
    stripped = text.strip()
    if stripped in EMPTY_WORD_TOKENS:
        return ()
    try:
        return tuple(int(t) for t in re.split(r'[\s,]+', stripped) if t)
    except ValueError:
        raise NotationError(f"cannot parse word {text!r}")


def format_word(word: Sequence[int]) -> str:
    """Format a word with space-separated letters; the empty word is "ε"."""
    return ' '.join(str(x) for x in word) if word else 'ε'


def format_fraction(value: Fraction) -> str:
    """Format an exact rational as "numerator/denominator"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse "p/q" or an integer into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise NotationError(f"cannot parse rational {text!r}")


def format_partition(blocks: Iterable[Iterable[int]]) -> str:
    """Format a set partition as "{{1,3},{2,4}}" with sorted blocks."""
    ordered = sorted(sorted(block) for block in blocks)
    return '{' + ','.join('{' + ','.join(str(x) for x in block) + '}' for block in ordered) + '}'
