"""Command line front end of the workbench.

Usage::

  chrsem answers --program p.chr --goal "g(U), h(V)" --mode sa --depth 8
  chrsem traces --program p.chr --goal "g(U)" --depth 4 --json g.json
  chrsem compose g.json h.json --json gh.json
  chrsem check-comp --program p.chr --g1 "g(U)" --g2 "h(V)" --depth 4
  chrsem check-correct --program p.chr --goal "g(U), h(V)" --depth 4
  chrsem corpus --jobs 4 --json table.json

Exit status is 0 on success, 1 when a checked property fails and 2 on
usage, file or parse errors.
"""
# Created: October 2026

import argparse
import configparser
import json
import os
import sys

from .abstraction import alpha
from .composition import check_compositionality, compose_sets
from .errors import ChrSyntaxError, TraceFileError, UnsupportedError
from .observables import check_correctness
from .standard import StandardEngine
from .syntax import parse_goal, parse_program
from .terms import Supply
from .tracefile import TraceFile
from .traces import TraceEngine
from .utils import get_workbench_config, parallel_map

PROG = 'chrsem'


class UsageError(Exception):
    """Invalid combination of command line arguments.
    """


def read_program(path):
    with open(path, encoding='utf-8') as f:
        return parse_program(f.read())


def parse_split(text, names=None):
    """Return the two goals of a ``G1 | G2`` split sharing variable names.
    """
    if text.count('|') != 1:
        raise UsageError(f'expected a goal split of the form "G1 | G2", got {text!r}')
    names = {} if names is None else names
    left, right = text.split('|')
    return parse_goal(left, names), parse_goal(right, names)


def write_json(path, data):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n')


def print_report(report, out):
    for value in sorted(v.tostring() for v in report.only_lhs):
        print(f'- {value}', file=out)
    for value in sorted(v.tostring() for v in report.only_rhs):
        print(f'+ {value}', file=out)
    status = 'ok' if not (report.only_lhs or report.only_rhs) else (
        'truncated' if report.truncated else 'FAILED')
    print(f'{status}: {len(report.lhs)} left, {len(report.rhs)} right,'
          f' {len(report.only_lhs) + len(report.only_rhs)} differences', file=out)


def cmd_answers(args, config, out):
    program = read_program(args.program)
    goal = parse_goal(args.goal)
    engine = StandardEngine(program, naive=args.naive)
    answers = engine.answers(goal, config['depth'], qualified=args.mode == 'qa',
                             jobs=config['jobs'])
    for line in answers.tostrings():
        print(line, file=out)
    if args.json:
        write_json(args.json, dict(program=args.program, goal=goal.tostring(),
                                   depth=config['depth'], mode=args.mode,
                                   answers=answers.tostrings(), truncated=answers.truncated))
    return 0


def cmd_traces(args, config, out):
    program = read_program(args.program)
    goal = parse_goal(args.goal)
    engine = TraceEngine(program)
    traces = engine.enumerate(goal, config['depth'])
    tracefile = TraceFile(program, goal, config['depth'], {alpha(d) for d in traces})
    for sigma in tracefile.canonical_sequences():
        print(sigma.tostring(), file=out)
    if args.json:
        tracefile.save(args.json)
    return 0


def cmd_compose(args, config, out):
    names = {}
    first = TraceFile.load(args.files[0], names)
    second = TraceFile.load(args.files[1], names)
    if first.program.tostring() != second.program.tostring():
        raise UsageError(f'{args.files[0]} and {args.files[1]} are for different programs')
    composed = compose_sets(first.sequences, first.goal,
                            second.sequences, second.goal)
    goal = first.goal.conjoin(second.goal)
    tracefile = TraceFile(first.program, goal, first.depth + second.depth - 1, composed,
                          certificates=[c.tojson() for _, c in
                                        sorted(composed.items(), key=lambda i: i[0].tostring())])
    for sigma in tracefile.canonical_sequences():
        print(sigma.tostring(), file=out)
    if args.json:
        tracefile.save(args.json)
    return 0


def cmd_check_comp(args, config, out):
    program = read_program(args.program)
    names = {}
    goal1 = parse_goal(args.g1, names)
    goal2 = parse_goal(args.g2, names)
    report = check_compositionality(program, goal1, goal2, config['depth'])
    print_report(report, out)
    if args.json:
        write_json(args.json, report.tojson())
    return 0 if report.ok else 1


def cmd_check_correct(args, config, out):
    program = read_program(args.program)
    goal = parse_goal(args.goal)
    report = check_correctness(program, goal, config['depth'], jobs=config['jobs'])
    print_report(report, out)
    if args.json:
        write_json(args.json, report.tojson())
    return 0 if report.ok else 1


def load_corpus(corpus_dir):
    """Return the corpus entries listed in ``corpus.cfg``.

    Each section names a program file, its goals, its goal splits and
    the depth of the checks::

      [gh]
      file = gh.chr
      goals =
          g(U), h(V)
          g(U)
      splits =
          g(U) | h(V)
      depth = 4

    Returns
    -------
    entries : list of dict
      With keys name, text, goals, splits and depth. A directory
      without ``corpus.cfg`` has no entries.
    """
    fn = os.path.join(corpus_dir, 'corpus.cfg')
    if not os.path.isfile(fn):
        return []
    conf = configparser.ConfigParser()
    conf.read(fn, encoding='utf-8')
    entries = []
    for name in conf.sections():
        section = conf[name]
        with open(os.path.join(corpus_dir, section['file']), encoding='utf-8') as f:
            text = f.read()
        entries.append(dict(
            name=name, text=text,
            goals=[g.strip() for g in section.get('goals', '').splitlines() if g.strip()],
            splits=[s.strip() for s in section.get('splits', '').splitlines() if s.strip()],
            depth=section.getint('depth', fallback=None)))
    return entries


def _corpus_task(task):
    kind, name, text, goal, depth, seed = task
    with Supply(seed):
        program = parse_program(text)
        if kind == 'check-correct':
            report = check_correctness(program, parse_goal(goal), depth)
        else:
            goal1, goal2 = parse_split(goal)
            report = check_compositionality(program, goal1, goal2, depth)
    if report.only_lhs or report.only_rhs:
        status = 'truncated' if report.truncated else 'fail'
    else:
        status = 'pass'
    return dict(program=name, check=kind, goal=goal, depth=depth, status=status,
                lhs=len(report.lhs), rhs=len(report.rhs),
                differences=len(report.only_lhs) + len(report.only_rhs))


def corpus_harness(corpus_dir=None, depth=None, jobs=None, seed=None):
    """Run the correctness and compositionality checks of the corpus.

    Parameters
    ----------
    corpus_dir : str
    depth : int
      Overrides the depth of every corpus entry.
    jobs, seed : int

    Returns
    -------
    rows : list of dict
      One row per check in corpus order.
    """
    config = get_workbench_config(corpus_dir=corpus_dir, jobs=jobs, seed=seed)
    tasks = []
    for entry in load_corpus(config['corpus_dir']):
        d = depth or entry['depth'] or config['depth']
        tasks.extend(('check-correct', entry['name'], entry['text'], g, d, config['seed'])
                     for g in entry['goals'])
        tasks.extend(('check-comp', entry['name'], entry['text'], s, d, config['seed'])
                     for s in entry['splits'])
    return parallel_map(_corpus_task, tasks, config['jobs'])


def format_table(rows):
    header = ('program', 'check', 'goal', 'depth', 'status', 'differences')
    lines = [header] + [tuple(str(row[k]) for k in header) for row in rows]
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return '\n'.join('  '.join(v.ljust(w) for v, w in zip(line, widths)).rstrip()
                     for line in lines)


def cmd_corpus(args, config, out):
    rows = corpus_harness(config['corpus_dir'], depth=args.depth, jobs=config['jobs'],
                          seed=config['seed'])
    print(format_table(rows), file=out)
    failed = sum(row['status'] == 'fail' for row in rows)
    print(f'{len(rows) - failed} passed, {failed} failed', file=out)
    if args.json:
        write_json(args.json, dict(rows=rows))
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog=PROG, description='Workbench for the semantics of Constraint Handling Rules')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--depth', type=int, default=None,
                        help='derivation depth, defaults to 6')
    common.add_argument('--jobs', type=int, default=None, help='number of worker processes')
    common.add_argument('--seed', type=int, default=None, help='fresh variable seed')
    common.add_argument('--json', metavar='PATH', default=None, help='write JSON output')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('answers', parents=[common], help='answers of the standard semantics')
    p.add_argument('--program', required=True, metavar='PATH')
    p.add_argument('--goal', required=True)
    p.add_argument('--mode', choices=['sa', 'qa'], default='sa',
                   help='data sufficient (sa) or qualified (qa) answers')
    p.add_argument('--naive', action='store_true',
                   help='fire propagation rules without history')
    p.set_defaults(func=cmd_answers)

    p = sub.add_parser('traces', parents=[common], help='abstract sequences of a goal')
    p.add_argument('--program', required=True, metavar='PATH')
    p.add_argument('--goal', required=True)
    p.set_defaults(func=cmd_traces)

    p = sub.add_parser('compose', parents=[common], help='compose two trace files')
    p.add_argument('files', nargs=2, metavar='FILE')
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser('check-comp', parents=[common], help='check compositionality')
    p.add_argument('--program', required=True, metavar='PATH')
    p.add_argument('--g1', required=True)
    p.add_argument('--g2', required=True)
    p.set_defaults(func=cmd_check_comp)

    p = sub.add_parser('check-correct', parents=[common],
                       help='compare standard answers with recovered answers')
    p.add_argument('--program', required=True, metavar='PATH')
    p.add_argument('--goal', required=True)
    p.set_defaults(func=cmd_check_correct)

    p = sub.add_parser('corpus', parents=[common], help='run the checks of the corpus')
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None, out=None):
    """Run the workbench and return the exit status.
    """
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    config = get_workbench_config(depth=args.depth, jobs=args.jobs, seed=args.seed)
    try:
        if config['depth'] < 1:
            raise UsageError(f'--depth must be at least 1, got {config["depth"]}')
        with Supply(config['seed']):
            return args.func(args, config, out)
    except (OSError, ChrSyntaxError, TraceFileError, UnsupportedError, UsageError,
            ValueError) as exc:
        print(f'{PROG}: error: {exc}', file=sys.stderr)
        return 2
