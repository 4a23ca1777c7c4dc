"""
Unit tests for finite permutation groups and normal pairs.
"""

import random
import unittest
from fractions import Fraction

from arboreal_martingale.exceptions import (
    CapExceededError, DegreeMismatchError, InvalidPairError, InvalidParamsError, NotASubgroupError,
    NotTransitiveError,
)
from arboreal_martingale.families import cyclic, dihedral, symmetric
from arboreal_martingale.group import (
    CosetSpace, FiniteGroup, SubgroupPair, coset_fixed_point_total, find_index_p_normal_pairs, generate,
    index_p_normal_subgroups, quotient_isomorphisms,
)
from arboreal_martingale.perm import Perm


def random_perm(rng: random.Random, degree: int) -> Perm:
    images = list(range(1, degree + 1))
    rng.shuffle(images)
    return Perm(images)


class TestFiniteGroup(unittest.TestCase):
    """Test group enumeration and structure."""

    def setUp(self):
        """Set up test fixtures."""
        self.d4 = dihedral(4)
        self.r = Perm.parse("(1 2 3 4)")
        self.s = Perm.parse("(2 4)", 4)

    def test_dihedral_elements(self):
        """Test D4 order and its sorted element list."""
        self.assertEqual(self.d4.order, 8)
        self.assertEqual([str(g) for g in self.d4.sorted_elements],
                         ["id", "(2 4)", "(1 2)(3 4)", "(1 2 3 4)", "(1 3)", "(1 3)(2 4)", "(1 4 3 2)",
                          "(1 4)(2 3)"])

    def test_orbits_and_primitivity(self):
        """Test orbits, transitivity and block systems."""
        self.assertTrue(self.d4.is_transitive())
        self.assertFalse(self.d4.is_primitive())
        self.assertEqual(self.d4.minimal_block(3), frozenset({1, 3}))
        self.assertTrue(symmetric(4).is_primitive())
        self.assertTrue(cyclic(5).is_primitive())

        H = self.d4.subgroup([self.r ** 2, self.s])
        self.assertEqual([sorted(b) for b in H.orbits()], [[1, 3], [2, 4]])
        with self.assertRaises(NotTransitiveError):
            H.is_primitive()
        with self.assertRaises(NotTransitiveError):
            H.minimal_block(3)

    def test_subgroups(self):
        """Test subgroup checks."""
        S4 = symmetric(4)
        self.assertTrue(self.d4.is_subgroup_of(S4))
        self.assertFalse(S4.is_subgroup_of(self.d4))
        with self.assertRaises(NotASubgroupError):
            self.d4.subgroup([Perm.parse("(1 2)", 4)])

    def test_normal_subgroups(self):
        """Test the normal subgroup lattices of D4 and S4."""
        self.assertEqual([N.order for N in self.d4.normal_subgroups()], [1, 2, 4, 4, 4, 8])
        self.assertEqual([N.order for N in symmetric(4).normal_subgroups()], [1, 4, 12, 24])
        self.assertEqual(symmetric(4).derived_subgroup().order, 12)
        self.assertEqual(self.d4.derived_subgroup().order, 2)

        self.assertEqual(self.d4.normal_closure([self.s]), self.d4.subgroup([self.r ** 2, self.s]))
        self.assertTrue(self.d4.normal_closure([Perm.identity(4)]).is_trivial())

        rotations = self.d4.subgroup([self.r])
        self.assertTrue(self.d4.is_normal(rotations))
        self.assertFalse(symmetric(4).is_normal(self.d4))

    def test_cosets(self):
        """Test cosets ordered by their smallest element."""
        cosets = self.d4.cosets(self.d4.subgroup([self.r]))
        self.assertEqual([str(c.representative) for c in cosets], ["id", "(2 4)"])
        self.assertEqual([len(c.elements) for c in cosets], [4, 4])

        space = CosetSpace(self.d4, self.d4.subgroup([self.r]))
        self.assertEqual(space.multiply(1, 1), 0)
        self.assertEqual(space.index(self.s * self.r), 1)

    def test_from_elements(self):
        """Test building a group from an element set."""
        G = FiniteGroup.from_elements(4, self.d4.elements)
        self.assertEqual(G, self.d4)
        with self.assertRaises(NotASubgroupError):
            FiniteGroup.from_elements(3, [Perm.identity(3), Perm.parse("(1 2 3)")])

    def test_from_sympy(self):
        """Test wrapping a sympy group with its own or a prescribed presentation."""
        self.assertEqual(FiniteGroup.from_sympy(self.d4.sympy_group), self.d4)
        G = FiniteGroup.from_sympy(symmetric(4).sympy_group, [self.r, Perm.parse("(1 2)", 4)])
        self.assertEqual(G.generators, (self.r, Perm.parse("(1 2)", 4)))
        with self.assertRaises(NotASubgroupError):
            FiniteGroup.from_sympy(symmetric(4).sympy_group, [self.r, self.s])

    def test_generate_errors(self):
        """Test degree mismatches and the enumeration cap."""
        with self.assertRaises(DegreeMismatchError):
            generate(4, [Perm.parse("(1 2 3)")])
        with self.assertRaises(CapExceededError):
            generate(5, [Perm.parse("(1 2 3 4 5)"), Perm.parse("(1 2)", 5)], cap=100)
        with self.assertRaises(InvalidParamsError):
            generate(3, [], cap=0)
        self.assertTrue(generate(3, []).is_trivial())

    def test_average_fixed_points(self):
        """Test the orbit-counting average on known groups."""
        self.assertEqual(self.d4.average_fixed_points(), Fraction(1))
        H = self.d4.subgroup([self.r ** 2, self.s])
        self.assertEqual(H.average_fixed_points(), Fraction(2))


class TestBurnside(unittest.TestCase):
    """Randomized orbit-counting checks."""

    def test_average_equals_orbit_count(self):
        """Test that the average number of fixed points is the number of orbits."""
        rng = random.Random(2024)
        for _ in range(1000):
            degree = rng.randint(1, 7)
            gens = [random_perm(rng, degree) for _ in range(rng.randint(0, 2))]
            G = generate(degree, gens)
            self.assertEqual(G.average_fixed_points(), Fraction(len(G.orbits())))

    def test_coset_totals_of_transitive_subgroups(self):
        """Test that every coset aH of a transitive H in G fixes |H| points in total."""
        rng = random.Random(7)
        for _ in range(1000):
            degree = rng.randint(2, 7)
            cycle = Perm.from_cycles([tuple(range(1, degree + 1))], degree)
            G = generate(degree, [cycle] + [random_perm(rng, degree) for _ in range(rng.randint(0, 1))])
            self.assertLessEqual(G.order, 5040)
            H = G.subgroup([cycle] + [rng.choice(G.sorted_elements) for _ in range(rng.randint(0, 1))])
            a = rng.choice(G.sorted_elements)
            self.assertEqual(coset_fixed_point_total(a * h for h in H.elements), H.order)
            self.assertEqual(G.average_fixed_points(), Fraction(1))


class TestNormalPairs(unittest.TestCase):
    """Test the index-p normal pair search."""

    def setUp(self):
        """Set up test fixtures."""
        self.d4 = dihedral(4)

    def test_index_two_subgroups(self):
        """Test index-p normal subgroups of D4 and S4."""
        self.assertEqual(len(index_p_normal_subgroups(self.d4, 2)), 3)
        self.assertEqual([N.order for N in index_p_normal_subgroups(symmetric(4), 2)], [12])
        self.assertEqual(index_p_normal_subgroups(symmetric(4), 3), [])
        with self.assertRaises(InvalidParamsError):
            index_p_normal_subgroups(self.d4, 4)

    def test_dihedral_pairs(self):
        """Test the D4 pairs and the canonical coset pairing."""
        pairs = find_index_p_normal_pairs(self.d4, 2)
        self.assertEqual(len(pairs), 2)
        n2 = self.d4.subgroup([Perm.parse("(1 3)(2 4)"), Perm.parse("(2 4)", 4)])
        for pair in pairs:
            self.assertEqual(pair.n2, n2)
            self.assertTrue(pair.n1.is_transitive())
            self.assertEqual(pair.violations(), [])

        rotations = self.d4.subgroup([Perm.parse("(1 2 3 4)")])
        pair = SubgroupPair.build(self.d4, rotations, n2)
        self.assertEqual([(str(a), str(b)) for a, b in pair.sigma], [("id", "id"), ("(2 4)", "(1 2)(3 4)")])
        self.assertEqual(pair.sigma_map(), [0, 1])
        self.assertEqual(pair.sigma_coset(Perm.parse("(1 3)", 4)), frozenset(self.d4.elements - n2.elements))

    def test_invalid_pairs(self):
        """Test swapped roles, a non-bijective pairing and a pairing outside G."""
        rotations = self.d4.subgroup([Perm.parse("(1 2 3 4)")])
        n2 = self.d4.subgroup([Perm.parse("(1 3)(2 4)"), Perm.parse("(2 4)", 4)])
        swapped = SubgroupPair.build(self.d4, n2, rotations)
        self.assertIn("N1 is not transitive", swapped.violations())
        with self.assertRaises(InvalidPairError):
            SubgroupPair.build(self.d4, rotations, n2, [(Perm.parse("(2 4)", 4), Perm.identity(4))])
        with self.assertRaisesRegex(InvalidPairError, "not an element of G"):
            SubgroupPair.build(self.d4, rotations, n2, [(Perm.parse("(1 2)", 4), Perm.identity(4))])

    def test_quotient_isomorphisms(self):
        """Test isomorphisms between quotients of order 2."""
        rotations = self.d4.subgroup([Perm.parse("(1 2 3 4)")])
        n2 = self.d4.subgroup([Perm.parse("(1 3)(2 4)"), Perm.parse("(2 4)", 4)])
        self.assertEqual(quotient_isomorphisms(self.d4, rotations, n2), [(0, 1)])

    def test_search_preconditions(self):
        """Test odd dihedral groups and bad inputs."""
        self.assertEqual(find_index_p_normal_pairs(dihedral(5), 2), [])
        with self.assertRaises(InvalidParamsError):
            find_index_p_normal_pairs(self.d4, 6)
        with self.assertRaises(NotTransitiveError):
            find_index_p_normal_pairs(generate(4, [Perm.parse("(1 2)", 4)]), 2)


if __name__ == '__main__':
    unittest.main()
