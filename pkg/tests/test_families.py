"""
Unit tests for the built-in group families.
"""

import unittest

from arboreal_martingale.exceptions import InvalidParamsError
from arboreal_martingale.families import (
    alternating, build_family, catalog_entry, cyclic, dihedral, dihedral_generators, dihedral_pair, klein_catalog,
    klein_group, parse_family, symmetric,
)
from arboreal_martingale.group import generate
from arboreal_martingale.models import FamilyName, FamilySpec
from arboreal_martingale.perm import Perm


class TestFamilies(unittest.TestCase):
    """Test family constructors."""

    def test_orders(self):
        """Test the orders of the natural actions."""
        self.assertEqual(dihedral(6).order, 12)
        self.assertEqual(symmetric(5).order, 120)
        self.assertEqual(alternating(5).order, 60)
        self.assertEqual(klein_group(12).order, 12)
        self.assertEqual(klein_group(24), symmetric(4))

    def test_dihedral_generators(self):
        """Test the rotation and the reflection fixing vertex 1."""
        r, s = dihedral_generators(4)
        self.assertEqual(r, Perm.parse("(1 2 3 4)"))
        self.assertEqual(s, Perm.parse("(2 4)", 4))
        r, s = dihedral_generators(5)
        self.assertEqual(s, Perm.parse("(2 5)(3 4)", 5))
        self.assertEqual(dihedral(5).generators, dihedral_generators(5))

    def test_natural_presentations(self):
        """Test the named groups against their classical generators."""
        three_cycles = [Perm.parse(f"(1 2 {i})", 5) for i in range(3, 6)]
        self.assertEqual(alternating(5), generate(5, three_cycles))
        self.assertEqual(symmetric(4), generate(4, [Perm.parse("(1 2 3 4)"), Perm.parse("(1 2)", 4)]))
        self.assertEqual(cyclic(6).generators, (Perm.parse("(1 2 3 4 5 6)"),))
        self.assertEqual(alternating(4).order, 12)
        self.assertTrue(alternating(4).is_transitive())

    def test_dihedral_pairs(self):
        """Test both pair variants and odd degrees."""
        pair = dihedral_pair(4)
        self.assertEqual(pair.n1, dihedral(4).subgroup([Perm.parse("(1 2 3 4)")]))
        self.assertEqual([sorted(b) for b in pair.n2.orbits()], [[1, 3], [2, 4]])
        rs = dihedral_pair(6, 'rs')
        self.assertTrue(rs.n1.is_transitive())
        self.assertEqual(rs.violations(), [])
        self.assertIsNone(dihedral_pair(5))
        with self.assertRaises(InvalidParamsError):
            dihedral_pair(4, 'x')
        with self.assertRaises(InvalidParamsError):
            dihedral(2)

    def test_parse_family(self):
        """Test the name:param[:variant] shorthand."""
        spec = parse_family("dihedral:6:rs")
        self.assertEqual(spec.name, FamilyName.DIHEDRAL)
        self.assertEqual(spec.params, [6])
        self.assertEqual(spec.variant, "rs")
        self.assertEqual(str(spec), "dihedral:6:rs")
        with self.assertRaises(InvalidParamsError):
            parse_family("quaternion:8")
        with self.assertRaises(InvalidParamsError):
            parse_family("cyclic:0")

    def test_build_family(self):
        """Test building groups and pairs from specs."""
        G, pair = build_family(parse_family("dihedral:8"))
        self.assertEqual(G.order, 16)
        self.assertEqual(pair.p, 2)
        G, pair = build_family(parse_family("cyclic:5"))
        self.assertEqual(G.order, 5)
        self.assertIsNone(pair)
        G, _ = build_family(parse_family("klein_catalog:60"))
        self.assertEqual(G.degree, 5)
        for text in ("cyclic:4:rs", "alternating:2", "symmetric", "klein_catalog:7"):
            with self.assertRaises(InvalidParamsError):
                build_family(parse_family(text))


class TestCatalog(unittest.TestCase):
    """Test the small-group catalog."""

    def test_catalog_members(self):
        """Test which groups the catalog lists."""
        specs = [str(spec) for spec, _ in klein_catalog(4)]
        self.assertEqual(specs, ["cyclic:2", "cyclic:3", "cyclic:4", "dihedral:3", "dihedral:4",
                                 "klein_catalog:12", "klein_catalog:24"])

    def test_catalog_entries(self):
        """Test pair counts per prime."""
        entry = catalog_entry(FamilySpec(name=FamilyName.DIHEDRAL, params=[4]), dihedral(4))
        self.assertEqual(entry.pairs_by_prime, {"2": 2})
        self.assertTrue(entry.has_pair)
        entry = catalog_entry(FamilySpec(name=FamilyName.SYMMETRIC, params=[4]), symmetric(4))
        self.assertEqual(entry.pairs_by_prime, {"2": 0, "3": 0})
        self.assertFalse(entry.has_pair)
        entry = catalog_entry(FamilySpec(name=FamilyName.DIHEDRAL, params=[3]), dihedral(3))
        self.assertEqual(entry.pairs_by_prime, {"2": 0, "3": 0})


if __name__ == '__main__':
    unittest.main()
