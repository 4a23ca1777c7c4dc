"""
Command line interface for the fixed-point process analyzer.
"""

import logging
from typing import Callable, List, Optional

import click

from .analyzer import FixedPointAnalyzer
from .exceptions import ArborealError
from .models import AnalysisReport
from .utils import format_partition

logger = logging.getLogger(__name__)


def _mark(ok: bool) -> str:
    return "✓" if ok else "✗"


def format_report(report: AnalysisReport) -> str:
    """Render a report as line-oriented text. Rationals are always printed as p/q."""
    lines: List[str] = [f"command: {report.command}"]
    for key, value in report.inputs.items():
        lines.append(f"input {key}: {value}")

    if report.group:
        g = report.group
        shape = "transitive" if g.transitive else "intransitive"
        if g.primitive is not None:
            shape += ", primitive" if g.primitive else ", imprimitive"
        lines.append(f"group: degree {g.degree}, order {g.order}, {shape}")
        lines.append(f"  generators: {', '.join(g.generators) or 'none'}")
        lines.append(f"  orbits: {format_partition(g.orbits)}")
        lines.append(f"  average fixed points: {g.average_fixed_points}")

    if report.pairs is not None:
        lines.append(f"pairs: {len(report.pairs)}")
        for i, pair in enumerate(report.pairs):
            lines.append(f"  [{i}] p={pair.p}: N1 = <{', '.join(pair.n1_generators)}> (order {pair.n1_order}), "
                         f"N2 = <{', '.join(pair.n2_generators)}> (order {pair.n2_order}, "
                         f"orbits {format_partition(pair.n2_orbits)})")
            for line in pair.sigma:
                lines.append(f"      sigma: {line}")

    if report.catalog is not None:
        lines.append("catalog:")
        for entry in report.catalog:
            counts = ', '.join(f"p={p}: {n}" for p, n in entry.pairs_by_prime.items())
            lines.append(f"  {_mark(entry.has_pair)} {entry.family} (degree {entry.degree}, order {entry.order}) {counts}")

    if report.verification:
        v = report.verification
        lines.append(f"verification: {_mark(v.passed)} {v.pattern} (depth {v.depth}, order {v.order})")
        for label, ok in [("closure", v.closure), ("inverses", v.inverses), ("identity", v.identity),
                          ("root transitive", v.root_transitive), ("self-replicating", v.self_replicating),
                          ("uniform fibers", v.uniform_fibers), ("recurrent", v.recurrent)]:
            lines.append(f"  {_mark(ok)} {label}")
        if v.fiber_sizes:
            lines.append(f"  fiber sizes: {', '.join(str(s) for s in v.fiber_sizes)}")
        for problem in v.problems:
            lines.append(f"  ✗ {problem}")

    if report.kernel:
        lines.append(f"kernel: order {report.kernel.kernel_order}")
        for vertex, orbits in report.kernel.per_child_orbits.items():
            lines.append(f"  {vertex}: {format_partition(orbits)}")

    if report.martingale:
        m = report.martingale
        checked = ', '.join(str(k) for k in m.checked_levels)
        if m.is_martingale:
            lines.append(f"martingale: martingale (levels {checked})")
        else:
            vertex = ' '.join(str(x) for x in m.vertex) if m.vertex else 'ε'
            lines.append(f"martingale: non-martingale at level {m.level}, vertex {vertex}, "
                         f"orbits {format_partition(m.orbits or [])}")

    if report.distribution is not None:
        lines.append("distribution:")
        for record in report.distribution:
            lines.append(f"  ({', '.join(str(y) for y in record.vector)}): {record.probability}")

    if report.conditional_expectations is not None:
        lines.append("conditional expectations:")
        for history, value in report.conditional_expectations.items():
            lines.append(f"  E(next | {history}) = {value}")
    if report.deviation is not None:
        lines.append(f"deviation: {report.deviation}")

    if report.fpp is not None:
        lines.append("fixed-point proportion:")
        for level, value in report.fpp.items():
            lines.append(f"  level {level}: {value}")

    for afplp in report.afplp or []:
        line = (f"lifting at level {afplp.level}: {'holds' if afplp.holds else 'fails'} "
                f"({afplp.violations} of {afplp.base_order} base elements violate, group order {afplp.group_order})")
        lines.append(line)
        if afplp.worst and not afplp.holds:
            w = afplp.worst
            lines.append(f"  worst {w.element}: fixes {w.fixed_points}, lifts average {w.lift_average} "
                         f"over {w.lift_count}")

    if report.sample:
        s = report.sample
        lines.append(f"sample: level {s.level}, seed {s.seed}, {s.hits} of {s.trials} trials fix a vertex")
        lines.append(f"  estimate: {s.estimate_ratio} (standard error {s.standard_error:.6f})")
        lines.append(f"  mean Y_k: {', '.join(s.trajectory_summary)}")

    if report.checks:
        lines.append("checks:")
        for check in report.checks:
            detail = "" if check.passed else f" (expected {check.expected}, got {check.actual})"
            lines.append(f"  {_mark(check.passed)} {check.name}{detail}")
        passed = sum(1 for c in report.checks if c.passed)
        lines.append(f"summary: {passed}/{len(report.checks)} checks passed")

    for error in report.errors:
        lines.append(f"✗ {error}")
    if report.processing_time is not None:
        lines.append(f"processing time: {report.processing_time:.2f}s")
    return '\n'.join(lines)


COMMON_OPTIONS = [
    click.option('--config', '-c', 'config_path', type=click.Path(exists=True), help='Configuration file path'),
    click.option('--cap', type=click.IntRange(min=1), help='Refuse to enumerate more elements than this'),
    click.option('--machine-readable', is_flag=True, help='Print the report as JSON'),
    click.option('--timing', is_flag=True, help='Report processing time'),
    click.option('--verbose', '-v', is_flag=True, help='Verbose output'),
]

GROUP_OPTIONS = [
    click.option('--group-file', type=click.Path(exists=True), help='YAML group spec (degree, generators)'),
    click.option('--family', help='Built-in family such as dihedral:4, cyclic:3 or klein_catalog:12'),
]

PATTERN_OPTIONS = GROUP_OPTIONS + [
    click.option('--pattern', type=click.Choice(['wreath', 'full-wreath', 'theorem12']),
                 help='Pattern family built over the group (default: wreath)'),
    click.option('--pattern-file', type=click.Path(exists=True), help='YAML pattern spec'),
    click.option('--p', 'p', type=int, default=2, show_default=True, help='Prime index for theorem12 pairs'),
]


def _apply(options: List[Callable]) -> Callable:
    def decorator(f: Callable) -> Callable:
        for option in reversed(options):
            f = option(f)
        return f
    return decorator


common_options = _apply(COMMON_OPTIONS)
group_options = _apply(GROUP_OPTIONS)
pattern_options = _apply(PATTERN_OPTIONS)


def level_option(default: int) -> Callable:
    return click.option('--level', type=click.IntRange(min=1), default=default, show_default=True,
                        help='Tree level n')


def _run(config_path: Optional[str], cap: Optional[int], machine_readable: bool, timing: bool,
         verbose: bool, action: Callable[[FixedPointAnalyzer], AnalysisReport]) -> None:
    """Build the analyzer, run one action, print the report and set the exit code."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    ctx = click.get_current_context()
    try:
        analyzer = FixedPointAnalyzer(config_path, cap=cap, timing=timing)
        report = action(analyzer)
    except ArborealError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(2)
    if machine_readable or analyzer.config.get('output.machine_readable', False):
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo(format_report(report))
    ctx.exit(0 if report.success else 1)


@click.group()
@click.version_option(package_name='arboreal-martingale')
def cli():
    """Fixed-point processes of groups acting on rooted trees."""


@cli.group()
def group():
    """Inspect groups and find index-p normal pairs."""


@group.command('info')
@group_options
@common_options
def group_info(group_file, family, config_path, cap, machine_readable, timing, verbose):
    """Order, orbits, primitivity and average fixed points of a group."""
    _run(config_path, cap, machine_readable, timing, verbose,
         lambda a: a.group_info(group_file=group_file, family=family))


@group.command('find-pairs')
@group_options
@click.option('--p', 'p', type=int, default=2, show_default=True, help='Prime index')
@common_options
def group_find_pairs(group_file, family, p, config_path, cap, machine_readable, timing, verbose):
    """(transitive, intransitive) normal subgroup pairs of index p."""
    _run(config_path, cap, machine_readable, timing, verbose,
         lambda a: a.find_pairs(group_file=group_file, family=family, p=p))


@group.command('catalog')
@click.option('--max-degree', type=click.IntRange(min=2), default=6, show_default=True)
@common_options
def group_catalog(max_degree, config_path, cap, machine_readable, timing, verbose):
    """Which small catalog groups have a pair, prime by prime."""
    _run(config_path, cap, machine_readable, timing, verbose, lambda a: a.catalog(max_degree))


@cli.group()
def pattern():
    """Build and verify pattern groups."""


@pattern.command('build')
@pattern_options
@common_options
def pattern_build(group_file, family, pattern, pattern_file, p, config_path, cap, machine_readable, timing,
                  verbose):
    """Build a pattern and summarize it."""
    _run(config_path, cap, machine_readable, timing, verbose,
         lambda a: a.pattern_build(pattern=pattern, group_file=group_file, family=family,
                                   pattern_file=pattern_file, p=p))


@pattern.command('verify')
@pattern_options
@common_options
def pattern_verify(group_file, family, pattern, pattern_file, p, config_path, cap, machine_readable, timing,
                   verbose):
    """Verify closure, self-replication and recurrence; report kernel orbits."""
    _run(config_path, cap, machine_readable, timing, verbose,
         lambda a: a.pattern_verify(pattern=pattern, group_file=group_file, family=family,
                                    pattern_file=pattern_file, p=p))


@cli.group()
def process():
    """Exact analyses of the fixed-point process."""


def _process_command(name: str, method: str, default_level: int, help_text: str):
    @process.command(name, help=help_text)
    @pattern_options
    @level_option(default_level)
    @common_options
    def command(group_file, family, pattern, pattern_file, p, level, config_path, cap, machine_readable,
                timing, verbose):
        _run(config_path, cap, machine_readable, timing, verbose,
             lambda a: getattr(a, method)(level=level, pattern=pattern, group_file=group_file, family=family,
                                          pattern_file=pattern_file, p=p))
    return command


process_dist = _process_command('dist', 'process_dist', 2, "Exact joint law of (Y_1, ..., Y_n).")
process_martingale = _process_command('martingale', 'process_martingale', 2,
                                      "Kernel criterion plus exact conditional expectations.")
process_fpp = _process_command('fpp', 'process_fpp', 2, "Exact fixed-point proportions up to level n.")
process_afplp = _process_command('afplp', 'process_afplp', 2, "Average fixed points of lifts, level by level.")


@cli.group()
def sample():
    """Seeded Monte Carlo estimates."""


@sample.command('fpp')
@pattern_options
@level_option(2)
@click.option('--trials', type=click.IntRange(min=1), help='Number of trials (default from config)')
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), help='64-bit seed (default from config)')
@click.option('--progress', is_flag=True, help='Show a progress bar')
@common_options
def sample_fpp(group_file, family, pattern, pattern_file, p, level, trials, seed, progress, config_path, cap,
               machine_readable, timing, verbose):
    """Estimate the fixed-point proportion at level n by sampling."""
    _run(config_path, cap, machine_readable, timing, verbose,
         lambda a: a.sample_fpp(level=level, trials=trials, seed=seed, progress=progress or None, pattern=pattern,
                                group_file=group_file, family=family, pattern_file=pattern_file, p=p))


@cli.command('verify-paper')
@common_options
def verify_paper(config_path, cap, machine_readable, timing, verbose):
    """Run the exact verification suite; exit 1 if any check fails."""
    _run(config_path, cap, machine_readable, timing, verbose, lambda a: a.verify_paper())


def main():
    cli()


if __name__ == '__main__':
    main()
