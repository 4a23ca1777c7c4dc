"""
Unit tests for pattern groups, verification and the martingale criterion.
"""

import unittest

from arboreal_martingale.exceptions import (
    CapExceededError, InvalidPairError, ShapeMismatchError, UnverifiedPatternError, WrongDepthError,
)
from arboreal_martingale.families import alternating, cyclic, dihedral, dihedral_pair, symmetric
from arboreal_martingale.group import generate
from arboreal_martingale.models import PatternKind, Verdict
from arboreal_martingale.pattern import (
    Fiber, PatternGroup, build_theorem12_pattern, coset_pattern, full_wreath_pattern, martingale_check,
    require_uniform_pattern, restriction_kernel, search_coset_patterns, verify_pattern_group, wreath_pattern,
)
from arboreal_martingale.perm import Perm
from arboreal_martingale.tree import TreePortrait


class TestFiber(unittest.TestCase):
    """Test product-form fibers."""

    def test_tuples_and_indexing(self):
        """Test enumeration order, indexing and projections."""
        a, b = Perm.identity(2), Perm.parse("(1 2)")
        fiber = Fiber([([a, b], [a]), ([b], [b])])
        self.assertEqual(fiber.size, 3)
        self.assertEqual(list(fiber.tuples()), [(a, a), (b, a), (b, b)])
        self.assertEqual([fiber.tuple_at(i) for i in range(3)], list(fiber.tuples()))
        self.assertEqual(fiber.projection(2), frozenset({a, b}))
        self.assertIn((b, b), fiber)
        self.assertNotIn((a, b), fiber)
        self.assertTrue(fiber.covers((frozenset({a, b}), frozenset({a}))))
        self.assertFalse(fiber.covers((frozenset({a}), frozenset({a, b}))))
        with self.assertRaises(IndexError):
            fiber.tuple_at(3)


class TestPatternGroups(unittest.TestCase):
    """Test the pattern builders and their verification."""

    def setUp(self):
        """Set up test fixtures."""
        self.d4 = dihedral(4)
        self.theorem12 = build_theorem12_pattern(self.d4, dihedral_pair(4))

    def test_wreath_pattern(self):
        """Test depth-1 patterns and their level orders."""
        P = wreath_pattern(self.d4)
        self.assertEqual(P.pattern_depth, 1)
        self.assertEqual(P.order, 8)
        self.assertEqual(P.level_order(2), 8 ** 5)
        self.assertEqual(wreath_pattern(cyclic(3)).level_order(3), 3 ** 13)
        self.assertTrue(verify_pattern_group(P).passed)
        self.assertEqual(P.kind, PatternKind.WREATH)

    def test_theorem12_pattern(self):
        """Test the D4 construction: order, fibers and verification."""
        P = self.theorem12
        self.assertEqual(P.order, 2048)
        self.assertEqual(set(P.fiber_sizes().values()), {256})
        report = verify_pattern_group(P)
        self.assertTrue(report.passed, report.problems)
        self.assertEqual(report.fiber_sizes, [256])
        self.assertEqual(P.level_order(2), 2048)
        self.assertEqual(P.root_group, self.d4)

    def test_theorem12_membership(self):
        """Test that label tuples follow the paired coset."""
        e, s = Perm.identity(4), Perm.parse("(2 4)", 4)
        rot = Perm.parse("(1 2 3 4)")
        below_identity = TreePortrait.assemble(e, [TreePortrait._from_ordered(4, 1, (s,))] * 4)
        self.assertIn(below_identity, self.theorem12)
        wrong = TreePortrait.assemble(e, [TreePortrait._from_ordered(4, 1, (rot,))] * 4)
        self.assertNotIn(wrong, self.theorem12)

    def test_enumeration_agrees_with_fibers(self):
        """Test that enumerating the pattern yields its members."""
        P = full_wreath_pattern(cyclic(3))
        elements = list(P.elements())
        self.assertEqual(len(elements), P.order)
        self.assertEqual(len(set(elements)), 81)
        self.assertTrue(all(g in P for g in elements))
        with self.assertRaises(CapExceededError):
            list(self.theorem12.iter_level(2, cap=100))

    def test_from_portraits(self):
        """Test explicit patterns built from portraits."""
        P = PatternGroup.from_portraits(list(full_wreath_pattern(cyclic(3)).elements()))
        self.assertEqual(P.order, 81)
        self.assertTrue(verify_pattern_group(P).passed)
        self.assertEqual(P.kind, PatternKind.EXPLICIT)
        with self.assertRaises(ShapeMismatchError):
            PatternGroup.from_portraits([])

    def test_verification_failures(self):
        """Test patterns that are not groups or not recurrent."""
        e, r = Perm.identity(3), Perm.parse("(1 2 3)")
        not_closed = PatternGroup(3, 2, {e: Fiber([([e], [e], [e])]), r: Fiber([([e], [e], [e])])})
        report = verify_pattern_group(not_closed)
        self.assertFalse(report.closure)
        self.assertFalse(report.passed)

        trivial = coset_pattern(cyclic(3), generate(3, []), generate(3, []), [0, 1, 2])
        report = verify_pattern_group(trivial)
        self.assertTrue(report.is_group)
        self.assertFalse(report.recurrent)
        with self.assertRaises(UnverifiedPatternError):
            require_uniform_pattern(not_closed)

    def test_invalid_theorem12_inputs(self):
        """Test pairs from another group and the optional cap."""
        with self.assertRaises(InvalidPairError):
            build_theorem12_pattern(dihedral(6), dihedral_pair(4))
        with self.assertRaises(CapExceededError):
            build_theorem12_pattern(self.d4, dihedral_pair(4), cap=1000)


class TestMartingaleCriterion(unittest.TestCase):
    """Test the kernel transitivity criterion."""

    def test_restriction_kernel(self):
        """Test kernel orbits of the D4 construction."""
        kernel = restriction_kernel(build_theorem12_pattern(dihedral(4), dihedral_pair(4)))
        self.assertEqual(kernel.kernel_order, 256)
        self.assertEqual(kernel.per_child_orbits, {str(i): [[1, 3], [2, 4]] for i in range(1, 5)})
        self.assertEqual(len(kernel.kernel_elements), 256)
        with self.assertRaises(WrongDepthError):
            restriction_kernel(wreath_pattern(dihedral(4)))

    def test_non_martingale_witness(self):
        """Test the witness vertex of the D4 construction."""
        verdict = martingale_check(build_theorem12_pattern(dihedral(4), dihedral_pair(4)))
        self.assertEqual(verdict.verdict, Verdict.NON_MARTINGALE)
        self.assertEqual(verdict.level, 2)
        self.assertEqual(verdict.vertex, [1])
        self.assertEqual(verdict.orbits, [[1, 3], [2, 4]])
        self.assertFalse(verdict.is_martingale)

    def test_wreath_patterns_are_martingales(self):
        """Test transitive wreath and full-wreath patterns."""
        for G in (cyclic(4), dihedral(4), symmetric(4), alternating(4)):
            self.assertTrue(martingale_check(wreath_pattern(G)).is_martingale)
        self.assertTrue(martingale_check(full_wreath_pattern(dihedral(3))).is_martingale)

    def test_intransitive_root_group(self):
        """Test that an intransitive root group fails at level 1."""
        verdict = martingale_check(wreath_pattern(generate(3, [Perm.parse("(1 2)", 3)])))
        self.assertEqual((verdict.verdict, verdict.level, verdict.vertex), (Verdict.NON_MARTINGALE, 1, []))
        self.assertEqual(verdict.orbits, [[1, 2], [3]])

    def test_dihedral_dichotomy(self):
        """Test even dihedral constructions and odd coset patterns."""
        for m in (4, 6, 8):
            verdict = martingale_check(build_theorem12_pattern(dihedral(m), dihedral_pair(m)))
            self.assertEqual((verdict.verdict, verdict.level), (Verdict.NON_MARTINGALE, 2))
        found = search_coset_patterns(dihedral(3))
        self.assertTrue(found)
        for *_, P in found:
            self.assertTrue(martingale_check(P).is_martingale)


if __name__ == '__main__':
    unittest.main()
