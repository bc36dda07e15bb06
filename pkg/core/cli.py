"""
Command-line entry point.

    graphstar words {reduce|nf|stdform|closure|nclen|truncations} --graph G --word 1,0,2
    graphstar words oracle --max-vertices 4 --max-word-len 6
    graphstar verify {ucp|schwarz|lemmas|techlem|y1square|degenerate|choda|decomposition} --seed S
    graphstar fock {independence|moments} --seed S
    graphstar groups {pd|ball} --seed S
    graphstar dilate {halmos|egervary|gram|vn|independence} --seed S
    graphstar report [--suite "GROUP NAME"] [--limit N]

The first positional argument of a suite command is its suite name. Only
`report` takes --suite, the full recorded name such as "dilate egervary".

Exit status: 0 when every trial passes, 1 on a violation, 2 on a usage error.
"""

import argparse
import json
import logging
import os
from pathlib import Path
import sys

from . import graphwords
from .exceptions import GraphStarError

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    'verify': ('ucp', 'schwarz', 'lemmas', 'techlem', 'y1square', 'degenerate', 'choda', 'decomposition'),
    'fock': ('independence', 'moments'),
    'groups': ('pd', 'ball'),
    'dilate': ('halmos', 'egervary', 'gram', 'vn', 'independence'),
}

EXIT_PASS, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _suite_arguments(p, max_vertices=5, max_word_len=4, seed_required=True):
    p.add_argument('--graph', help="graph file in the 'n <count>' / 'e <i> <j>' format")
    p.add_argument('--seed', type=int, required=seed_required, default=0)
    p.add_argument('--trials', type=int, default=10)
    p.add_argument('--dims', type=_int_list, help="one dimension for all vertices, or one per vertex")
    p.add_argument('--groups', help="comma-separated group specs such as cyclic:2,sym:3")
    p.add_argument('--max-word-len', type=int, default=max_word_len)
    p.add_argument('--max-vertices', type=int, default=max_vertices)
    p.add_argument('--block', type=int, help="target tensor leg size")
    p.add_argument('--degree', type=int, help="dilation degree or polynomial degree")
    p.add_argument('--radius', type=int, help="ball radius")
    p.add_argument('--tol', type=float, help="override the PSD and equality tolerances")
    p.add_argument('--threads', type=int, help="defaults to GRAPHSTAR_THREADS")
    p.add_argument('--out', help="write the JSON report here instead of stdout")
    p.add_argument('--csv', help="write Gram eigenvalue spectra, one row per trial")
    p.add_argument('--record', action='store_true', help="store the report as a SuiteRun")


def build_parser(parser=None):
    if parser is None:
        parser = argparse.ArgumentParser(prog='graphstar', description="Graph products of C*-algebras: word calculus and verification suites.")
    sub = parser.add_subparsers(dest='group', required=True)

    words = sub.add_parser('words', help="word operations and the exhaustive word oracle")
    words.add_argument('operation', choices=graphwords.WORD_OPERATIONS + ('oracle',))
    words.add_argument('--word', default='')
    words.add_argument('--words', help="semicolon-separated words for closure, e.g. 0,1;2")
    words.add_argument('--v0', type=int)
    _suite_arguments(words, max_vertices=4, max_word_len=6, seed_required=False)

    for group, names in SUBCOMMANDS.items():
        p = sub.add_parser(group)
        p.add_argument('suite', choices=names)
        _suite_arguments(p)

    report = sub.add_parser('report', help="list recorded suite runs")
    report.add_argument('--suite', help="recorded suite name, e.g. 'dilate egervary'")
    report.add_argument('--limit', type=int, default=20)
    return parser


def setup_django():
    import django
    from django.apps import apps

    if not apps.ready:
        os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'graphstar.settings')
        django.setup()


def _load_graph(args, required=True):
    if not args.graph:
        if required:
            raise UsageError("--graph is required")
        return None
    return graphwords.SimplicialGraph.load(args.graph)


def word_command(args, stdout):
    g = _load_graph(args)
    word = graphwords.parse_word(args.word)
    words = [graphwords.parse_word(s) for s in args.words.split(';')] if args.words else []
    if args.operation in ('stdform', 'nclen') and args.v0 is None:
        raise UsageError(f"'{args.operation}' needs --v0")
    result = graphwords.run_operation(g, args.operation, word, words, args.v0)
    if 'nc_length' in result:
        stdout.write(f"{result['nc_length']}\n")
    elif args.operation == 'stdform':
        parts = ' '.join(f"{k}={graphwords.format_word(result[k]) or '()'}" for k in ('y', 'c'))
        stdout.write(f"{parts} v0={result['v0']} b={graphwords.format_word(result['b']) or '()'}\n")
    elif 'words' in result:
        for w in result['words']:
            stdout.write(f"{graphwords.format_word(w) or '()'}\n")
    else:
        stdout.write(f"{graphwords.format_word(result['word'])}\n")
    return EXIT_PASS


def config_from_args(args):
    from .suites import RunConfig

    name = 'words oracle' if args.group == 'words' else f"{args.group} {args.suite}"
    return RunConfig(
        name=name,
        seed=args.seed,
        trials=args.trials,
        graph=_load_graph(args, required=False),
        dims=args.dims,
        groups=tuple(s.strip() for s in args.groups.split(',')) if args.groups else None,
        max_word_len=args.max_word_len,
        max_vertices=args.max_vertices,
        block=args.block,
        degree=args.degree,
        radius=args.radius,
        tol=args.tol,
        threads=args.threads,
    )


def emit(result, args, stdout):
    from .models import SuiteRun
    from .suites import write_spectra

    report = result.report
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
        stdout.write(f"{report['suite']}: {report['passes']} passed, {report['failures']} failed, "
                     f"{report['skipped']} skipped -> {args.out}\n")
    else:
        stdout.write(text + "\n")
    if args.csv:
        write_spectra(args.csv, result)
    if args.record:
        run = SuiteRun.from_report(report)
        run.save()
        logger.info(f"recorded suite run {run.pk}")


def list_runs(args, stdout):
    from .models import SuiteRun

    runs = SuiteRun.objects.all()
    if args.suite:
        runs = runs.filter(suite=args.suite)
    for run in runs[:max(args.limit, 0)]:
        stdout.write(f"{run.pk}\t{run.created_at.isoformat()}\t{run}\n")
    return EXIT_PASS


def run(args, stdout=None, stderr=None):
    from .suites import run_suite

    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        if args.group == 'report':
            return list_runs(args, stdout)
        if args.group == 'words' and args.operation != 'oracle':
            return word_command(args, stdout)
        cfg = config_from_args(args)
    except (UsageError, GraphStarError, OSError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    result = run_suite(cfg)
    try:
        emit(result, args, stdout)
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    return EXIT_PASS if result.report['passed'] else EXIT_VIOLATION


def main(argv=None, stdout=None, stderr=None):
    setup_django()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return run(args, stdout, stderr)


if __name__ == '__main__':
    sys.exit(main())
