"""
Example usage of the fixed-point process analyzer.
"""

from pathlib import Path

from arboreal_martingale import FixedPointAnalyzer


def main():
    """Example usage of the fixed-point process analyzer."""

    print("Fixed-Point Process Analyzer Example")
    print("=" * 50)

    analyzer = FixedPointAnalyzer()

    # Example 1: Index-2 normal pairs in D4
    print("\n1. Index-2 Normal Pairs in D4:")
    report = analyzer.find_pairs(family='dihedral:4', p=2)
    for i, pair in enumerate(report.pairs):
        print(f"  [{i}] N1 order {pair.n1_order}, N2 order {pair.n2_order}, N2 orbits {pair.n2_orbits}")

    # Example 2: The depth-2 construction from the pattern file
    print("\n2. Pattern Verification:")
    pattern_file = Path(__file__).parent / "d4_theorem12_pattern.yaml"
    if pattern_file.exists():
        report = analyzer.pattern_verify(pattern_file=str(pattern_file))
        v = report.verification
        print(f"Pattern: {v.pattern} (order {v.order})")
        print(f"Passed: {v.passed}")
        print(f"Verdict: {report.martingale.verdict.value} at level {report.martingale.level}")
    else:
        print("Example pattern file not found")

    # Example 3: Exact conditional expectations
    print("\n3. Conditional Expectations:")
    report = analyzer.process_martingale(level=2, pattern='theorem12', family='dihedral:4')
    for history, value in report.conditional_expectations.items():
        print(f"  E(Y_2 | Y_1 = {history}) = {value}")
    print(f"Deviation: {report.deviation}")

    # Example 4: Exact and sampled fixed-point proportions
    print("\n4. Fixed-Point Proportions:")
    exact = analyzer.process_fpp(level=2, pattern='theorem12', family='dihedral:4')
    print(f"Exact: {exact.fpp}")
    sampled = analyzer.sample_fpp(level=2, trials=20000, seed=1, pattern='theorem12', family='dihedral:4')
    s = sampled.sample
    print(f"Sampled: {s.estimate_ratio} (standard error {s.standard_error:.5f})")

    # Example 5: Command-line usage instructions
    print("\n5. Command-line Usage Examples:")
    print("  python -m arboreal_martingale group catalog --max-degree 5")
    print("  python -m arboreal_martingale process martingale --family dihedral:4 --pattern theorem12")
    print("  python -m arboreal_martingale sample fpp --family dihedral:4 --pattern theorem12 --seed 1")
    print("  python -m arboreal_martingale verify-paper")


if __name__ == "__main__":
    main()
