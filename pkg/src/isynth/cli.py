"""Command-line front end.

Exit status: 0 success or realizable, 1 unrealizable, 2 bad input,
3 resource limit.
"""
import argparse
import logging
import os
import re
import sys

from isynth import bench, dfa as D
from isynth.engine import MODES, Session
from isynth.errors import (FormatError, InputError, IsynthError,
                           ResourceLimit, UnknownAtom)
from isynth.game import AtomPartition, DfaGame, solve
from isynth.ltlf import Context, parse_formula, prog_trace, to_str


EXIT_OK, EXIT_UNREAL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

logger = logging.getLogger('isynth')


def state_cap(args):
    if getattr(args, 'state_cap', None) is not None:
        return args.state_cap
    env = os.environ.get('ISYNTH_STATE_CAP')
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f'ISYNTH_STATE_CAP is not an integer: {env!r}')
    return None


def read_arg(value):
    """A file's contents if `value` names an existing file, else `value`."""
    if value is not None and os.path.isfile(value):
        with open(value) as fh:
            return fh.read()
    return value


def _strip_comment(line):
    return line.split('#', 1)[0].strip()


def parse_partition(text):
    """Read ``.inputs:`` / ``.outputs:`` lines into an `AtomPartition`."""
    inputs = outputs = None
    for n, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if not line:
            continue
        key, _, rest = line.partition(':')
        key = key.strip()
        if key == '.inputs':
            inputs = rest.split()
        elif key == '.outputs':
            outputs = rest.split()
        else:
            raise FormatError(f'partition line {n}: unexpected {line!r}')
    if inputs is None or outputs is None:
        raise FormatError('partition needs ".inputs:" and ".outputs:" lines')
    try:
        return AtomPartition(outputs, inputs)
    except ValueError as e:
        raise FormatError(str(e)) from None


def load_partition(path):
    with open(path) as fh:
        return parse_partition(fh.read())


_ASSIGN_RE = re.compile(r'([A-Za-z_][A-Za-z0-9_-]*)=([01])\Z')


def parse_assignment(text, allowed=None, complete=False):
    """``{a,b}`` or ``a=1 b=0``; returns the frozenset of true atoms.

    @param allowed: if given, atoms outside it raise `UnknownAtom`
    @param complete: with ``atom=v`` syntax, require every allowed atom
    """
    text = text.strip()
    if text.startswith('{'):
        if not text.endswith('}'):
            raise FormatError(f'unterminated set {text!r}')
        names = [a.strip() for a in text[1:-1].replace(',', ' ').split()]
        seen = set(names)
        true = frozenset(names)
    else:
        seen = set()
        true = set()
        for tok in text.split():
            m = _ASSIGN_RE.match(tok)
            if m is None:
                raise FormatError(f'expected atom=0|1, got {tok!r}')
            name, val = m.groups()
            if name in seen:
                raise FormatError(f'atom {name!r} assigned twice')
            seen.add(name)
            if val == '1':
                true.add(name)
        true = frozenset(true)
        if complete and allowed is not None and seen != set(allowed):
            missing = sorted(set(allowed) - seen)
            if missing:
                raise FormatError(f'missing values for {missing}')
    if allowed is not None:
        extra = sorted(seen - set(allowed))
        if extra:
            raise UnknownAtom(f'unknown atoms {extra}')
    return true


def parse_trace(text, allowed=None):
    text = text.strip()
    if not text:
        return []
    return [parse_assignment(part, allowed) for part in text.split(';')]


def _ordered_set(w, order):
    return '{' + ','.join(a for a in order if a in w) + '}'


# subcommands

def cmd_synth(args, out):
    part = load_partition(args.part)
    ctx = Context(part.atoms, frozen=True)
    phi = parse_formula(read_arg(args.formula), ctx)
    A = D.minimize(D.from_formula(phi, part.atoms, cap=state_cap(args)))
    game = DfaGame(A, part)
    sol = solve(game)
    ok = game.initial in sol.winning
    print('REALIZABLE' if ok else 'UNREALIZABLE', file=out)
    if args.dump:
        with open(args.dump, 'w') as fh:
            fh.write(D.export_text(A))
            fh.write('strategy\n')
            for s in sorted(sol.strategy):
                cube = ''.join(
                    ('1' if a in sol.strategy[s] else '0')
                    if a in part.agent else '-' for a in A.atoms)
                fh.write(f'move {s} {cube}\n')
    return EXIT_OK if ok else EXIT_UNREAL


def parse_scenario(text):
    """Return ``(partition, directives)``; directives are
    ``('goal', text, line)`` or ``('step', assignment, line)``."""
    lines = []
    for n, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if line:
            lines.append((n, line))
    if not lines or lines[0][1] != 'scenario v1':
        raise FormatError('missing header "scenario v1"')
    header = {}
    i = 1
    while i < len(lines) and lines[i][1].split()[0] in ('inputs', 'outputs'):
        key, *names = lines[i][1].split()
        if key in header:
            raise FormatError(f'line {lines[i][0]}: duplicate {key!r}')
        header[key] = names
        i += 1
    if set(header) != {'inputs', 'outputs'}:
        raise FormatError('scenario needs "inputs" and "outputs" lines')
    try:
        part = AtomPartition(header['outputs'], header['inputs'])
    except ValueError as e:
        raise FormatError(str(e)) from None
    directives = []
    for n, line in lines[i:]:
        word, _, rest = line.partition(' ')
        if word == 'goal':
            if not rest.strip():
                raise FormatError(f'line {n}: empty goal')
            directives.append(('goal', rest.strip(), n))
        elif word == 'step':
            if rest.strip().startswith('{'):
                raise FormatError(f'line {n}: step needs atom=0|1 values')
            try:
                w = parse_assignment(rest, part.env, complete=True)
            except InputError as e:
                raise FormatError(f'line {n}: {e}') from None
            directives.append(('step', w, n))
        else:
            raise FormatError(f'line {n}: unknown directive {word!r}')
    return part, directives


def _status_lines(session, out, numbers):
    # `numbers` maps adopted goals back to the order they were given in
    for i, g, st in zip(numbers, session.goals, session.goal_status()):
        print(f'status goal {i} arrival {g.arrival}: '
              f'satisfied_now={str(st.satisfied_now).lower()} '
              f'satisfied_ever={str(st.satisfied_ever).lower()}', file=out)


def _verdict_line(k, session, v, out):
    word = 'REALIZABLE' if v.realizable else 'UNREALIZABLE'
    print(f'goal {k} at step {session.clock}: {word} '
          f'(arena {v.arena_states} states)', file=out)


def cmd_incr(args, out):
    with open(args.scenario) as fh:
        part, directives = parse_scenario(fh.read())
    session = Session(part, args.engine, state_cap=state_cap(args))
    all_ok = True
    k = 0
    adopted = []
    for kind, value, line in directives:
        if kind == 'goal':
            v = session.add_goal(value)
            _verdict_line(k, session, v, out)
            all_ok = all_ok and v.realizable
            if v.realizable:
                adopted.append(k)
            k += 1
        else:
            m = session.agent_move()
            session.env_move(value)
            print(f'step {session.clock - 1}: agent '
                  f'{_ordered_set(m, part.agent)} env '
                  f'{_ordered_set(value, part.env)}', file=out)
    _status_lines(session, out, adopted)
    return EXIT_OK if all_ok else EXIT_UNREAL


def cmd_bench(args, out):
    spec = bench.BenchSpec(args.family, tuple(args.params),
                           range(args.goals), args.engine, args.timeout_s,
                           args.seed, args.steps_per_goal, args.policy,
                           state_cap(args))
    rows = bench.run_instance(spec)
    if args.out:
        bench.write_csv(rows, args.out)
    else:
        out.write(bench.format_csv(rows))
    return EXIT_OK


def cmd_prog(args, out):
    ctx = Context()
    simplified = not args.no_simplify
    text = read_arg(args.formula)
    phi = parse_formula(text, ctx, simplified=simplified)
    trace = parse_trace(args.on or '')
    for w in trace:
        for a in w:
            ctx.register(a)
    print(to_str(prog_trace(phi, trace, simplified)), file=out)
    return EXIT_OK


def cmd_dfa(args, out):
    text = read_arg(args.formula)
    if args.part:
        part = load_partition(args.part)
        ctx = Context(part.atoms, frozen=True)
        atoms = part.atoms
    else:
        ctx = Context()
        atoms = None
    phi = parse_formula(text, ctx)
    A = D.minimize(D.from_formula(phi, atoms, cap=state_cap(args)))
    out.write(D.export_dot(A) if args.dot else D.export_text(A))
    return EXIT_OK


def cmd_repl(args, out, inp=None):
    inp = sys.stdin if inp is None else inp
    part = load_partition(args.part)
    session = Session(part, args.engine, state_cap=state_cap(args))
    print('commands: goal <formula> | <env assignment> | quit', file=out)
    k = 0
    adopted = []
    while True:
        try:
            move = session.peek_move()
        except IsynthError as e:
            print(f'error: {e}', file=out)
            return EXIT_INPUT
        print(f'[{session.clock}] agent move {_ordered_set(move, part.agent)}'
              f' > ', end='', file=out)
        out.flush()
        line = inp.readline()
        if not line:
            print(file=out)
            break
        line = _strip_comment(line)
        if not line:
            print(file=out)
            continue
        if line in ('quit', 'exit'):
            break
        try:
            if line.startswith('goal '):
                v = session.add_goal(line[5:].strip())
                _verdict_line(k, session, v, out)
                if v.realizable:
                    adopted.append(k)
                k += 1
            else:
                if line.startswith('step '):
                    line = line[5:]
                x = parse_assignment(line, part.env)
                m = session.agent_move()
                session.env_move(x)
                print(f'step {session.clock - 1}: agent '
                      f'{_ordered_set(m, part.agent)} env '
                      f'{_ordered_set(x, part.env)}', file=out)
                _status_lines(session, out, adopted)
        except ResourceLimit as e:
            print(f'resource limit: {e}', file=out)
        except (InputError, IsynthError) as e:
            print(f'error: {e}', file=out)
    _status_lines(session, out, adopted)
    return EXIT_OK


# argument parsing

def _formula_args(p, part_required):
    p.add_argument('formula_pos', nargs='?', metavar='FORMULA',
                   help='formula text or file (alternative to --formula)')
    p.add_argument('--formula', help='formula text or file containing it')
    p.add_argument('--part', required=part_required,
                   help='partition file (.inputs:/.outputs:)')


def build_parser():
    ap = argparse.ArgumentParser(
        prog='isynth',
        description='LTLf synthesis with goals added during execution.')
    ap.add_argument('-v', '--verbose', action='count', default=0)
    ap.add_argument('--state-cap', type=int, default=None,
                    help='maximum DFA states (env ISYNTH_STATE_CAP)')
    sub = ap.add_subparsers(dest='cmd', required=True)

    p = sub.add_parser('synth', help='one-shot realizability check')
    _formula_args(p, True)
    p.add_argument('--dump', help='write automaton and strategy here')

    p = sub.add_parser('incr', help='replay a scenario file')
    p.add_argument('--scenario', required=True)
    p.add_argument('--engine', choices=MODES, default='dp')

    p = sub.add_parser('bench', help='run a benchmark instance')
    p.add_argument('--family', required=True, choices=sorted(bench.FAMILIES))
    p.add_argument('--params', type=int, nargs='+', required=True)
    p.add_argument('--goals', type=int, default=2,
                   help='number of goals to add (n = 0..GOALS-1)')
    p.add_argument('--engine', choices=MODES, default='dp')
    p.add_argument('--timeout-s', type=float, default=60.0)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--steps-per-goal', type=int, default=1)
    p.add_argument('--policy', choices=('random', 'passive'),
                   default='random')
    p.add_argument('--out', help='CSV path (default: stdout)')

    p = sub.add_parser('prog', help='progress a formula through a trace')
    _formula_args(p, False)
    p.add_argument('--on', default='',
                   help='trace, e.g. "{a};{}" or "a=1 b=0;a=0 b=1"')
    p.add_argument('--no-simplify', action='store_true')

    p = sub.add_parser('dfa', help='print the minimal DFA of a formula')
    _formula_args(p, False)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument('--dot', action='store_true')
    fmt.add_argument('--text', action='store_true')

    p = sub.add_parser('repl', help='interactive session')
    p.add_argument('--part', required=True)
    p.add_argument('--engine', choices=MODES, default='dp')
    return ap


COMMANDS = {
    'synth': cmd_synth, 'incr': cmd_incr, 'bench': cmd_bench,
    'prog': cmd_prog, 'dfa': cmd_dfa, 'repl': cmd_repl,
}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    ap = build_parser()
    args = ap.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format='%(name)s: %(message)s')
    if hasattr(args, 'formula_pos'):
        if args.formula is None:
            args.formula = args.formula_pos
        elif args.formula_pos is not None:
            ap.error('give the formula either positionally or with --formula')
        if args.formula is None:
            ap.error('a formula is required')
    try:
        return COMMANDS[args.cmd](args, out)
    except ResourceLimit as e:
        print(f'resource limit: {e}', file=sys.stderr)
        return EXIT_LIMIT
    except (IsynthError, OSError, ValueError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
