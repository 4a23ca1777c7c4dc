"""
Seeded Monte Carlo sampling of uniform elements of the level-n group.

Every (seed, trial, vertex) triple owns an independent PCG32 stream whose
state is derived by hashing, so a trial is reproducible on its own and the
lazy fixed-point sampler draws exactly what the full sampler draws.

The root stream first picks the root label (uniform over the roots, which is
the law of the root under the uniform measure when fibers are equal), then
the index of the level-1 label tuple in the root's fiber. Every other vertex
of level <= n - 2 draws one fiber index from its own stream.
"""

import hashlib
import logging
from typing import List, Optional, Sequence, Tuple

from tqdm import tqdm

from .exceptions import InvalidParamsError, LevelOutOfRangeError
from .models import SampleReport
from .pattern import PatternGroup, require_uniform_pattern
from .perm import Perm
from .tree import TreePortrait
from .utils import format_word

logger = logging.getLogger(__name__)

MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF
PCG_MULTIPLIER = 6364136223846793005


class PCG32:
    """PCG32 (XSH RR) generator with 64-bit state.

    Follows pcg32_srandom_r and pcg32_random_r from the reference C code,
    with every intermediate kept inside uint64.
    """

    __slots__ = ('state', 'inc')

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed <= MASK64:
            raise InvalidParamsError(f"seed {seed} is not a 64-bit unsigned integer")
        self.state = 0
        self.inc = ((stream << 1) & MASK64) | 1
        self.next_u32()
        self.state = (self.state + seed) & MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * PCG_MULTIPLIER + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), by rejection on whole 32-bit words."""
        if bound < 1:
            raise InvalidParamsError("bound must be positive")
        if bound == 1:
            return 0
        words = 1
        while (1 << (32 * words)) < bound:
            words += 1
        span = 1 << (32 * words)
        limit = span - span % bound
        while True:
            value = 0
            for _ in range(words):
                value = (value << 32) | self.next_u32()
            if value < limit:
                return value % bound


def stream_seed(seed: int, trial: int, vertex: Sequence[int]) -> int:
    """64-bit stream state for one vertex of one trial."""
    key = f"{seed}:{trial}:{format_word(vertex)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), 'little')


def vertex_stream(seed: int, trial: int, vertex: Sequence[int]) -> PCG32:
    return PCG32(stream_seed(seed, trial, vertex))


def _check_request(n: int, seed: int) -> None:
    if n < 1:
        raise LevelOutOfRangeError("levels start at 1")
    if not 0 <= seed <= MASK64:
        raise InvalidParamsError(f"seed {seed} is not a 64-bit unsigned integer")


def sample_element(P: PatternGroup, n: int, seed: int, trial: int = 0) -> TreePortrait:
    """A uniform element of G_n as a depth-n portrait.

    Raises:
        NonUniformFibersError: If fiber sizes differ.
    """
    require_uniform_pattern(P)
    _check_request(n, seed)
    root_rng = vertex_stream(seed, trial, ())
    root = P.roots[root_rng.randbelow(len(P.roots))]
    return _sample_subtree(P, (), root, n, seed, trial, root_rng)


def _sample_subtree(P: PatternGroup, vertex: Tuple[int, ...], label: Perm, depth: int,
                    seed: int, trial: int, rng: Optional[PCG32] = None) -> TreePortrait:
    if depth == 1:
        return TreePortrait._from_ordered(P.arity, 1, (label,))
    rng = rng or vertex_stream(seed, trial, vertex)
    fiber = P.fiber(label)
    labels = fiber.tuple_at(rng.randbelow(fiber.size))
    children = [_sample_subtree(P, vertex + (i,), t, depth - 1, seed, trial)
                for i, t in enumerate(labels, start=1)]
    return TreePortrait.assemble(label, children)


def sample_fixed_vector(P: PatternGroup, n: int, seed: int, trial: int = 0) -> Tuple[int, ...]:
    """(Y_1, ..., Y_n) of ``sample_element(P, n, seed, trial)``, drawing only below fixed vertices."""
    root_rng = vertex_stream(seed, trial, ())
    root = P.roots[root_rng.randbelow(len(P.roots))]
    frontier: List[Tuple[Tuple[int, ...], Perm, Optional[PCG32]]] = [((), root, root_rng)]
    counts = []
    for k in range(n):
        next_frontier = []
        total = 0
        for vertex, label, rng in frontier:
            fixed = sorted(label.fixed_points())
            total += len(fixed)
            if k + 1 < n and fixed:
                rng = rng or vertex_stream(seed, trial, vertex)
                fiber = P.fiber(label)
                labels = fiber.tuple_at(rng.randbelow(fiber.size))
                next_frontier.extend((vertex + (i,), labels[i - 1], None) for i in fixed)
        counts.append(total)
        frontier = next_frontier
    return tuple(counts)


def monte_carlo_fpp(P: PatternGroup, n: int, trials: int, seed: int, progress: bool = False) -> SampleReport:
    """Estimate P(Y_n >= 1) from ``trials`` uniform samples of G_n.

    Trial t uses the same streams as ``sample_element(P, n, seed, trial=t)``.

    Raises:
        NonUniformFibersError: If fiber sizes differ.
        InvalidParamsError: If trials < 1.
    """
    if trials < 1:
        raise InvalidParamsError("trials must be at least 1")
    require_uniform_pattern(P)
    _check_request(n, seed)
    hits = 0
    sums = [0] * n
    for trial in tqdm(range(trials), desc=f"sampling level {n}", disable=not progress):
        vector = sample_fixed_vector(P, n, seed, trial)
        if vector[-1] >= 1:
            hits += 1
        for k, y in enumerate(vector):
            sums[k] += y
    logger.debug("seed %d: %d of %d trials fix a level-%d word", seed, hits, trials, n)
    return SampleReport(level=n, trials=trials, hits=hits, seed=seed, level_sums=sums)
