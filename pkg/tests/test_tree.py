"""
Unit tests for tree portraits.
"""

import random
import unittest

from arboreal_martingale.exceptions import (
    LetterOutOfRangeError, LevelOutOfRangeError, NotationError, ShapeMismatchError, WordTooLongError,
)
from arboreal_martingale.perm import Perm
from arboreal_martingale.tree import (
    TreePortrait, compose_tree, inverse_tree, level_offset, parse_portrait, vertices, word_from_rank, word_rank,
    words,
)


def random_portrait(rng: random.Random, arity: int, depth: int) -> TreePortrait:
    labels = {}
    for w in vertices(arity, depth):
        images = list(range(1, arity + 1))
        rng.shuffle(images)
        labels[w] = Perm(images)
    return TreePortrait(arity, depth, labels)


class TestWords(unittest.TestCase):
    """Test word indexing."""

    def test_level_order(self):
        """Test offsets and ranks of words."""
        self.assertEqual(level_offset(2, 3), 7)
        self.assertEqual(vertices(2, 2), [(), (1,), (2,)])
        self.assertEqual(word_rank(3, (2, 3)), 5)
        self.assertEqual(word_from_rank(3, 2, 5), (2, 3))
        self.assertEqual(list(words(2, 2)), [(1, 1), (1, 2), (2, 1), (2, 2)])
        with self.assertRaises(LetterOutOfRangeError):
            word_rank(2, (3,))


class TestTreePortrait(unittest.TestCase):
    """Test portrait arithmetic against the action on words."""

    def setUp(self):
        """Set up test fixtures."""
        self.rng = random.Random(11)

    def test_action_follows_sections(self):
        """Test g(x w) = g(x) g_x(w) on a hand-built portrait."""
        g = TreePortrait.from_sparse(2, 2, {(): Perm.parse("(1 2)"), (1,): Perm.parse("(1 2)")})
        self.assertEqual(g.act((1, 1)), (2, 2))
        self.assertEqual(g.act((2, 1)), (1, 1))
        self.assertEqual(g.act(()), ())
        self.assertEqual(g.fixed_vector(), (0, 0))

    def test_composition_matches_action(self):
        """Test that products and inverses act like composed maps."""
        for arity, depth in [(2, 3), (3, 2), (4, 2)]:
            for _ in range(10):
                g = random_portrait(self.rng, arity, depth)
                h = random_portrait(self.rng, arity, depth)
                gh = compose_tree(g, h)
                for w in words(arity, depth):
                    self.assertEqual(gh.act(w), g.act(h.act(w)))
                self.assertTrue((g * inverse_tree(g)).is_identity())
                self.assertTrue((g.inverse() * g).is_identity())

    def test_section_cocycle(self):
        """Test (gh)_v = g_{h(v)} h_v at every internal vertex."""
        for arity, depth in [(2, 3), (3, 3), (4, 2)]:
            for _ in range(10):
                g = random_portrait(self.rng, arity, depth)
                h = random_portrait(self.rng, arity, depth)
                gh = compose_tree(g, h)
                for v in vertices(arity, depth):
                    self.assertEqual(gh.section(v), compose_tree(g.section(h.act(v)), h.section(v)))

    def test_restrict_commutes_with_compose(self):
        """Test that truncating a product is the product of truncations."""
        for arity, depth in [(2, 4), (3, 3)]:
            for _ in range(10):
                g = random_portrait(self.rng, arity, depth)
                h = random_portrait(self.rng, arity, depth)
                for m in range(1, depth + 1):
                    self.assertEqual(compose_tree(g, h).restrict(m), compose_tree(g.restrict(m), h.restrict(m)))
                    self.assertEqual(inverse_tree(g).restrict(m), inverse_tree(g.restrict(m)))

    def test_sections_restrictions_and_assembly(self):
        """Test slicing a portrait apart and putting it back together."""
        for _ in range(10):
            g = random_portrait(self.rng, 3, 3)
            children = [g.section((i,)) for i in range(1, 4)]
            self.assertEqual(TreePortrait.assemble(g.root, children), g)
            for i in range(1, 4):
                for w in words(3, 2):
                    self.assertEqual(g.act((i,) + w), (g.root(i),) + children[i - 1].act(w))
            top = g.restrict(2)
            for w in words(3, 2):
                self.assertEqual(top.act(w), g.act(w)[:2])
            self.assertEqual(g.section((2, 1)).root, g.label((2, 1)))

    def test_fixed_vector_counts_fixed_words(self):
        """Test fixed-word counts against the action."""
        for _ in range(10):
            g = random_portrait(self.rng, 3, 3)
            expected = tuple(sum(1 for w in words(3, k) if g.act(w) == w) for k in range(1, 4))
            self.assertEqual(g.fixed_vector(), expected)
            self.assertEqual(g.fixed_words(2), expected[1])
        self.assertEqual(TreePortrait.identity(2, 3).fixed_vector(), (2, 4, 8))

    def test_portrait_text(self):
        """Test the one-line-per-vertex format."""
        g = random_portrait(self.rng, 3, 2)
        self.assertEqual(parse_portrait(g.to_text(), 3), g)
        sparse = parse_portrait("# comment\nε: (1 2)\n2: (1 3)\n", 3)
        self.assertEqual(sparse.depth, 2)
        self.assertEqual(sparse.label((1,)), Perm.identity(3))
        self.assertEqual(sparse.label((2,)), Perm.parse("(1 3)", 3))
        with self.assertRaises(NotationError):
            parse_portrait("ε (1 2)", 3)
        with self.assertRaises(NotationError):
            parse_portrait("1: (1 2)\n1: id", 3)

    def test_shape_errors(self):
        """Test mismatched shapes and out-of-range words."""
        g = TreePortrait.identity(2, 2)
        with self.assertRaises(ShapeMismatchError):
            g * TreePortrait.identity(2, 3)
        with self.assertRaises(ShapeMismatchError):
            TreePortrait(2, 2, {(): Perm.identity(2)})
        with self.assertRaises(WordTooLongError):
            g.act((1, 1, 1))
        with self.assertRaises(WordTooLongError):
            g.label((1, 1))
        with self.assertRaises(LetterOutOfRangeError):
            g.act((3,))
        with self.assertRaises(LevelOutOfRangeError):
            g.restrict(3)
        with self.assertRaises(WordTooLongError):
            TreePortrait.from_sparse(2, 2, {(1, 2): Perm.identity(2)})


if __name__ == '__main__':
    unittest.main()
