"""
Command line interface of holosim.

Subcommands::

    holosim run --scenario FILE [--seed N] [--horizon N] [--format F]
    holosim replay [--tables T] [--out FILE]
    holosim export --trace FILE [--tables T] [--out FILE]
    holosim holons (--trace FILE | --paper) [--k N] [--xml FILE]
    holosim prob --n N --c C --k K [--xml FILE]
    holosim mc --n N --c C --k K [--trials N] [--seed N] [--event E]

Exit codes: 0 success, 1 input error, 2 engine error, 3 mismatch with the
golden tables, 64 usage error.
"""

import argparse
import logging
import sys

import lxml.etree as ET

from holosim.base import report
from holosim.constants import (EXIT_ENGINE, EXIT_INPUT, EXIT_MISMATCH,
                               EXIT_OK, EXIT_USAGE, TABLE_NAMES,
                               TRACE_FORMATS)
from holosim.engine import run, trace_from_jsonl, trace_to_jsonl
from holosim.holarchy import (holon_forest, holon_timeline, holons_at,
                              timeline_csv)
from holosim.probability import (MC_EVENTS, ProbParams, format_power,
                                 mc_estimate, p_any_triple, p_bound,
                                 p_favorite, p_triple, probability_report,
                                 within_three_sigma)
from holosim.scenario import (build_config, compare_tables, export_tables,
                              load_scenario, paper_example)
from holosim.utils import (EngineError, GoldenMismatch, InputError,
                           UsageError)

__all__ = ['main', 'build_parser', 'REFERENCE_TIMELINE']

LOGGER = logging.getLogger(__name__)

REFERENCE_TIMELINE = [(14, 'Emerged', 'α'), (36, 'Dissolved', 'α'),
                      (46, 'Emerged', 'β'), (49, 'Emerged', 'γ')]


class ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser exiting with EXIT_USAGE on invalid arguments."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def _positive(value):
    """argparse type of integers >= 1."""
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError('%s is not a positive integer'
                                         % value)
    return number


def _write(text, out):
    """Write text to the file out, or to standard output for "-"."""
    if out in (None, '-'):
        sys.stdout.write(text)
        return
    with open(out, 'w', encoding='utf-8', newline='\n') as outfile:
        outfile.write(text)


def _write_xml(element, out):
    """Write an element tree as an XML document."""
    with open(out, 'wb') as outfile:
        outfile.write(ET.tostring(element, pretty_print=True,
                                  xml_declaration=True, encoding='UTF-8'))


def _tables(choice):
    """Table names selected by a --tables value."""
    return list(TABLE_NAMES) if choice == 'all' else [choice]


def _export(trace, tables):
    """Table projections of a trace over all ticks, one block per table."""
    ticks = range(1, trace.horizon + 1)
    return '\n'.join(export_tables(trace, ticks, name) for name in tables)


def _reference_trace():
    """Replay the bundled example."""
    scenario = paper_example()
    return run(build_config(scenario), scenario)


def cmd_run(args):
    """Run a scenario file and write its trace."""
    scenario = load_scenario(args.scenario)
    cfg = build_config(scenario, seed=args.seed, horizon=args.horizon)
    trace = run(cfg, scenario)
    if args.format == 'jsonl':
        _write(trace_to_jsonl(trace), args.out)
    else:
        _write(_export(trace, _tables(args.tables)), args.out)
    return EXIT_OK


def cmd_replay(args):
    """Replay the bundled example and compare it with the golden tables."""
    trace = _reference_trace()
    tables = _tables(args.tables)
    if args.out:
        _write(_export(trace, tables), args.out)
    ticks = range(1, trace.horizon + 1)
    for name in tables:
        compare_tables(name, export_tables(trace, ticks, name))
        print('%s: OK' % name)
    return EXIT_OK


def cmd_export(args):
    """Project the tables of a saved trace."""
    with open(args.trace, encoding='utf-8') as infile:
        trace = trace_from_jsonl(infile.read())
    _write(_export(trace, _tables(args.tables)), args.out)
    return EXIT_OK


def cmd_holons(args):
    """Print the holon timeline of a trace."""
    if args.paper:
        trace = _reference_trace()
    else:
        with open(args.trace, encoding='utf-8') as infile:
            trace = trace_from_jsonl(infile.read())
    timeline = holon_timeline(trace, args.k, args.c)
    sys.stdout.write(timeline_csv(timeline))
    if args.xml:
        snapshots = list(holons_at(trace, args.k, args.c))
        holons = snapshots[-1][1] if snapshots else frozenset()
        _write_xml(report([holon_forest(holons, trace.horizon)]), args.xml)
    if args.paper and timeline != REFERENCE_TIMELINE:
        LOGGER.error('Holon timeline differs from %s', REFERENCE_TIMELINE)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_prob(args):
    """Print the closed forms."""
    params = ProbParams(args.n, args.c, args.k)
    bound = p_bound(params)
    rows = [('p_favorite', p_favorite(args.n, args.c)),
            ('p_triple', p_triple(params)),
            ('p_any_triple', p_any_triple(params)),
            ('middle_bound', bound.middle)]
    for name, value in rows:
        print('%s = %s ~ %.6e' % (name, value, float(value)))
    print('approximation = %s ~ %.6e' % (
        format_power(args.n, bound.exponent), float(bound.approximation)))
    if args.xml:
        _write_xml(report([probability_report(params)]), args.xml)
    return EXIT_OK


def cmd_mc(args):
    """Estimate p_triple or p_favorite and compare with the closed form."""
    params = ProbParams(args.n, args.c, args.k)
    if args.event == 'triple':
        expected = p_triple(params)
    else:
        expected = p_favorite(args.n, args.c)
    estimate, stderr = mc_estimate(params, args.trials, args.seed,
                                   args.event, args.workers)
    verdict = within_three_sigma(estimate, expected, args.trials)
    print('estimate = %.8f +- %.8f' % (estimate, stderr))
    print('expected = %s ~ %.8f' % (expected, float(expected)))
    print('verdict = %s' % ('PASS' if verdict else 'FAIL'))
    return EXIT_OK


def build_parser():
    """Return the argument parser of the holosim command."""
    parser = ArgumentParser(
        prog='holosim',
        description='Simulate holon emergence in peer-to-peer fusion.')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log to standard error, -vv for debug')
    commands = parser.add_subparsers(dest='command', required=True)
    tables = list(TABLE_NAMES) + ['all']

    command = commands.add_parser('run', help='run a scenario file')
    command.add_argument('--scenario', required=True)
    command.add_argument('--seed', type=int)
    command.add_argument('--horizon', type=int)
    command.add_argument('--format', choices=TRACE_FORMATS, default='jsonl')
    command.add_argument('--tables', choices=tables, default='best0')
    command.add_argument('--out', default='-')
    command.set_defaults(func=cmd_run)

    command = commands.add_parser('replay',
                                  help='replay the bundled example')
    command.add_argument('--tables', choices=tables, default='all')
    command.add_argument('--out')
    command.set_defaults(func=cmd_replay)

    command = commands.add_parser('export', help='tables of a saved trace')
    command.add_argument('--trace', required=True)
    command.add_argument('--tables', choices=tables, default='all')
    command.add_argument('--out', default='-')
    command.set_defaults(func=cmd_export)

    command = commands.add_parser('holons', help='holon timeline')
    source = command.add_mutually_exclusive_group(required=True)
    source.add_argument('--trace')
    source.add_argument('--paper', '--reference', dest='paper',
                        action='store_true',
                        help='the bundled example scenario')
    command.add_argument('--k', type=_positive, default=1)
    command.add_argument('--c', type=_positive, default=1)
    command.add_argument('--xml')
    command.set_defaults(func=cmd_holons)

    for name, func in (('prob', cmd_prob), ('mc', cmd_mc)):
        command = commands.add_parser(name)
        command.add_argument('--n', type=int, required=True)
        command.add_argument('--c', type=int, default=1)
        command.add_argument('--k', type=int, default=1)
        command.set_defaults(func=func)
    commands.choices['prob'].add_argument('--xml')
    mc_parser = commands.choices['mc']
    mc_parser.add_argument('--trials', type=_positive, default=100000)
    mc_parser.add_argument('--seed', type=int, default=0)
    mc_parser.add_argument('--event', choices=MC_EVENTS, default='triple')
    mc_parser.add_argument('--workers', type=_positive, default=1)
    return parser


def main(argv=None):
    """Run the holosim command and return its exit code."""
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if args.verbose > 1 else logging.INFO,
            format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except GoldenMismatch as exception:
        sys.stderr.write('holosim: %s\n' % exception)
        return EXIT_MISMATCH
    except (InputError, OSError) as exception:
        sys.stderr.write('holosim: %s\n' % exception)
        return EXIT_INPUT
    except EngineError as exception:
        sys.stderr.write('holosim: %s\n' % exception)
        return EXIT_ENGINE
    except UsageError as exception:
        sys.stderr.write('holosim: %s\n' % exception)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
