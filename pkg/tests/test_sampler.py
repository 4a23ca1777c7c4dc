"""
Unit tests for seeded Monte Carlo sampling.
"""

import math
import unittest
from collections import Counter
from fractions import Fraction

from arboreal_martingale.exceptions import InvalidParamsError, LevelOutOfRangeError
from arboreal_martingale.families import cyclic, dihedral, dihedral_pair
from arboreal_martingale.pattern import build_theorem12_pattern, wreath_pattern
from arboreal_martingale.sampler import (
    MASK64, PCG32, monte_carlo_fpp, sample_element, sample_fixed_vector, stream_seed,
)


class TestPCG32(unittest.TestCase):
    """Test the generator against the reference stream."""

    def test_reference_outputs(self):
        """Test the first outputs for seed 42 on stream 54."""
        rng = PCG32(42, 54)
        self.assertEqual([rng.next_u32() for _ in range(3)], [0xa15c02b7, 0x7b47f409, 0xba1d3330])

    def test_randbelow(self):
        """Test bounds and determinism of bounded draws."""
        first = PCG32(7)
        second = PCG32(7)
        draws = [first.randbelow(10) for _ in range(200)]
        self.assertEqual(draws, [second.randbelow(10) for _ in range(200)])
        self.assertTrue(all(0 <= x < 10 for x in draws))
        self.assertEqual(set(draws), set(range(10)))
        self.assertEqual(PCG32(1).randbelow(1), 0)
        self.assertLess(PCG32(3).randbelow(2 ** 40), 2 ** 40)
        with self.assertRaises(InvalidParamsError):
            PCG32(1).randbelow(0)
        with self.assertRaises(InvalidParamsError):
            PCG32(MASK64 + 1)

    def test_stream_seeds(self):
        """Test that streams depend on seed, trial and vertex."""
        self.assertEqual(stream_seed(0, 0, ()), stream_seed(0, 0, ()))
        seeds = {stream_seed(0, 0, ()), stream_seed(1, 0, ()), stream_seed(0, 1, ()), stream_seed(0, 0, (1,))}
        self.assertEqual(len(seeds), 4)
        self.assertTrue(all(0 <= s <= MASK64 for s in seeds))


class TestSampling(unittest.TestCase):
    """Test uniform sampling of level-n elements."""

    @classmethod
    def setUpClass(cls):
        """Set up test fixtures."""
        cls.pattern = build_theorem12_pattern(dihedral(4), dihedral_pair(4))

    def test_samples_are_group_elements(self):
        """Test that sampled portraits lie in the group."""
        for trial in range(20):
            g = sample_element(self.pattern, 3, seed=5, trial=trial)
            self.assertEqual(g.depth, 3)
            self.assertIn(g.restrict(2), self.pattern)
            for i in range(1, 5):
                self.assertIn(g.section((i,)), self.pattern)

    def test_lazy_sampler_matches_full_sampler(self):
        """Test that the fixed-vector sampler draws what the full sampler draws."""
        for P, n in ((self.pattern, 2), (self.pattern, 3), (wreath_pattern(cyclic(3)), 3)):
            for trial in range(30):
                g = sample_element(P, n, seed=11, trial=trial)
                self.assertEqual(sample_fixed_vector(P, n, seed=11, trial=trial), g.fixed_vector())

    def test_reproducible_reports(self):
        """Test that equal seeds give identical reports and other seeds do not."""
        first = monte_carlo_fpp(self.pattern, 2, 500, seed=3)
        second = monte_carlo_fpp(self.pattern, 2, 500, seed=3)
        self.assertEqual(first.model_dump_json(), second.model_dump_json())
        self.assertEqual(len(first.level_sums), 2)
        self.assertEqual(first.estimate, Fraction(first.hits, 500))
        self.assertEqual(first.estimate_ratio, f"{Fraction(first.hits, 500).numerator}/"
                                               f"{Fraction(first.hits, 500).denominator}")
        others = {monte_carlo_fpp(self.pattern, 2, 500, seed=s).hits for s in range(4, 8)}
        self.assertGreater(len(others | {first.hits}), 1)

    def test_estimates_near_exact_value(self):
        """Test that at least 19 of 20 seeds land within four standard deviations of 255/2048."""
        exact = Fraction(255, 2048)
        trials = 100_000
        sigma = math.sqrt(float(exact * (1 - exact)) / trials)
        inside = 0
        for seed in range(20):
            report = monte_carlo_fpp(self.pattern, 2, trials, seed=seed)
            self.assertEqual(report.trials, trials)
            inside += abs(float(report.estimate - exact)) <= 4 * sigma
        self.assertGreaterEqual(inside, 19)

    def test_root_labels_are_uniform(self):
        """Test the sampled root label against the uniform law on the root group."""
        trials = 100_000
        counts = Counter(sample_element(self.pattern, 1, seed=17, trial=t).root for t in range(trials))
        root_group = self.pattern.root_group
        self.assertEqual(set(counts), set(root_group.elements))
        expected = trials / root_group.order
        chi_square = sum((counts[g] - expected) ** 2 / expected for g in root_group)
        # 0.999 quantile of chi-square with 7 degrees of freedom
        self.assertLess(chi_square, 24.32)

    def test_invalid_requests(self):
        """Test bad trial counts, levels and seeds."""
        with self.assertRaises(InvalidParamsError):
            monte_carlo_fpp(self.pattern, 2, 0, seed=0)
        with self.assertRaises(LevelOutOfRangeError):
            sample_element(self.pattern, 0, seed=0)
        with self.assertRaises(InvalidParamsError):
            sample_element(self.pattern, 2, seed=-1)


if __name__ == '__main__':
    unittest.main()
