"""Benchmark families and the execute-and-add measurement harness.

Each generator returns the atom partition and a builder ``n -> text``
producing goal formulas in the ASCII syntax.  The harness adds goals
``n = 0, 1, ...`` one after the other, executing some steps of the
current strategy between additions.
"""
import csv
import io
import logging
import time
import warnings
from dataclasses import dataclass, field

from isynth.engine import Session, make_policy, run_episode, verify_log
from isynth.errors import ResourceLimit, StepLimit
from isynth.game import AtomPartition


logger = logging.getLogger(__name__)

CSV_HEADER = ('family', 'params', 'goal_n', 'engine', 'verdict', 'add_ms',
              'new_dfa_states', 'arena_states', 'episode_steps', 'seed')


def _and(items):
    items = list(items)
    if not items:
        return 'true'
    return ' & '.join(f'({s})' for s in items)


def _or(items):
    items = list(items)
    if not items:
        return 'false'
    return ' | '.join(f'({s})' for s in items)


def _nest(op, k, body):
    for _ in range(k):
        body = f'{op}({body})'
    return body


def _chain(atoms):
    """``F(a0 & X(F(a1 & X(... F(a_last)))))``."""
    body = f'F({atoms[-1]})'
    for a in reversed(atoms[:-1]):
        body = f'F({a} & X({body}))'
    return body


# tireworld

def gen_tireworld(l):
    """Navigation with flat tires over `l` locations.

    Returns ``(partition, builder, phi_org)``; ``phi_org`` is the domain
    description together with ``builder(0)``.
    """
    if l < 1:
        raise ValueError('tireworld needs at least one location')
    at = [f'at_{i}' for i in range(l)]
    mv = [f'move_{i}' for i in range(l)]
    agent = at + mv + ['change-tire', 'flat-tire']
    part = AtomPartition(agent, ['make-flat'])
    alpha = f'G(make-flat -> {_or(mv)})'

    def located(j):
        return _and([at[j]] + [f'!{at[k]}' for k in range(l) if k != j])

    init = located(0)
    pre = _and([f'G({m} -> !flat-tire)' for m in mv] +
               ['G(change-tire -> flat-tire)'])
    mutex = _and([
        f'G(change-tire | {_or(mv)})',
        f'G(change-tire -> !({_or(mv)}))'] + [
        f'G({mv[i]} -> !change-tire & !({_or(mv[j] for j in range(l) if j != i)}))'
        for i in range(l)])
    flat, fixed, change = [], [], []
    for i in range(l):
        for j in range(l):
            if i == j:
                continue
            rest = _and([f'!{at[k]}' for k in range(l) if k != j])
            flat.append(f'{at[i]} & {mv[j]} & make-flat -> '
                        f'N({at[j]} & flat-tire & {rest})')
            fixed.append(f'{at[i]} & {mv[j]} & !make-flat -> '
                         f'N({at[j]} & !flat-tire & {rest})')
        change.append(f'{at[i]} & change-tire -> N({located(i)} & !flat-tire)')
    trans = _and([f'G({_and(flat)})', f'G({_and(fixed)})',
                  f'G({_and(change)})'])

    def builder(n):
        visits = [at[v % l] for v in range(2 * n + 2)]
        return f'({alpha}) -> ({_chain(visits)})'

    phi_org = _and([init, pre, mutex, trans, builder(0)])
    return part, builder, phi_org


# counter

def counter_value(k, v):
    """Bit literals of `v` over `k` bits (``b_0`` least significant)."""
    if v >= 1 << k:
        warnings.warn(f'counter value {v} needs more than {k} bits; '
                      f'using {v % (1 << k)}', stacklevel=2)
        v %= 1 << k
    return _and(f'b_{i}' if v >> i & 1 else f'!b_{i}' for i in range(k))


def gen_counter(k):
    """A `k`-bit counter incremented on the environment's request.

    Returns ``(partition, builder, phi_org)``.
    """
    if k < 1:
        raise ValueError('counter needs at least one bit')
    bits = [f'b_{i}' for i in range(k)]
    carry = [f'c_{i}' for i in range(k + 1)]
    part = AtomPartition(bits + carry, ['add'])
    init = _and([f'!{b}' for b in bits] + [f'!{c}' for c in carry])
    # strong next: a weak one would demand `add` at the last step, which
    # the environment can always refuse
    pre = 'G(X(c_0) -> add)'
    blocks = []
    for i in range(k):
        b, c, c1 = bits[i], carry[i], carry[i + 1]
        blocks.append('G(' + _and([
            f'!{c} & !{b} -> N(!{b} & !{c1})',
            f'!{c} & {b} -> N({b} & !{c1})',
            f'{c} & !{b} -> N({b} & !{c1})',
            f'{c} & {b} -> N(!{b} & {c1})']) + ')')
    trans = _and(blocks)

    def builder(n):
        return f'G(add) -> F({counter_value(k, 2 * n + 1)})'

    phi_org = _and([init, pre, trans, builder(0)])
    return part, builder, phi_org


# plants

def gen_plants(p):
    """Keep `p` plants alive by watering them.  Returns ``(partition, builder)``."""
    if p < 1:
        raise ValueError('plants needs at least one plant')
    alive = [f'alive_{i}' for i in range(p)]
    part = AtomPartition(['water'], ['rain'] + alive)

    def alpha(i):
        return f'G(N({alive[i]}) <-> {alive[i]} & (water | rain))'

    def builder(n):
        days = 3 * (n + 1)
        conj = []
        for i in range(p):
            body = _and(_nest('X', j, alive[i]) for j in range(days))
            conj.append(f'({alpha(i)}) -> F({body})')
        return _and(conj)

    return part, builder


# requests

def gen_requests(i, j):
    """`i` services, each needing `j` actions.  Returns ``(partition, builder)``."""
    if i < 1 or j < 1:
        raise ValueError('requests needs i >= 1 and j >= 1')
    reqs = [f'r_{s}' for s in range(i)]
    acts = [[f'a_{s}_{t}' for t in range(1, j + 1)] for s in range(i)]
    part = AtomPartition([a for row in acts for a in row], reqs)
    any_req = _or(reqs)
    request = _and(f'{reqs[s]} -> {_chain(acts[s])}' for s in range(i))

    def env_seq(k):
        parts = [_nest('N', v, f'({any_req})') for v in range(k)]
        parts.append(_nest('N', k, f'G(!({any_req}))'))
        return _and(parts)

    def builder(n):
        k = 2 * n + 1
        return f'({env_seq(k)}) -> (({request}) & {_nest("X", k, "true")})'

    return part, builder


FAMILIES = {
    'tireworld': (gen_tireworld, 1),
    'counter': (gen_counter, 1),
    'plants': (gen_plants, 1),
    'requests': (gen_requests, 2),
}


def family(name, params):
    """Partition and goal function ``n -> text`` of a named family.

    For families with a domain description, goal 0 is the original goal
    (domain plus ``builder(0)``).
    """
    try:
        gen, arity = FAMILIES[name]
    except KeyError:
        raise ValueError(f'unknown family {name!r}') from None
    params = tuple(int(x) for x in params)
    if len(params) != arity:
        raise ValueError(f'{name} takes {arity} parameter(s)')
    out = gen(*params)
    part, builder = out[0], out[1]
    if len(out) == 3:
        phi_org = out[2]

        def goal(n):
            return phi_org if n == 0 else builder(n)
        return part, goal
    return part, builder


# harness

@dataclass
class BenchSpec:
    family: str
    params: tuple
    goals: range = range(2)
    engine: str = 'dp'
    timeout_s: float = 60.0
    seed: int = 0
    steps_per_goal: int = 1
    policy: str = 'random'
    state_cap: int = None


@dataclass
class ResultRow:
    family: str
    params: str
    goal_n: int
    engine: str
    verdict: str
    add_ms: float
    new_dfa_states: int
    arena_states: int
    episode_steps: int
    seed: int
    # not part of the CSV
    joint_ok: bool = None
    literal_ok: bool = None
    error: str = None
    extra: dict = field(default_factory=dict, repr=False)

    def csv_fields(self):
        ms = '' if self.add_ms is None else f'{self.add_ms:.3f}'
        return [self.family, self.params, self.goal_n, self.engine,
                self.verdict, ms, _blank(self.new_dfa_states),
                _blank(self.arena_states), _blank(self.episode_steps),
                self.seed]


def _blank(v):
    return '' if v is None else v


def run_instance(spec, clock=time.perf_counter):
    """Run one instance; one row per attempted addition.

    After each realizable addition but the last, `steps_per_goal`
    agent/env steps are played.  After the last addition the session
    plays to joint acceptance and the log is checked with `verify_log`.
    A timeout stops the instance; the remaining rows say ``timeout``.
    """
    part, goal = family(spec.family, spec.params)
    params = '-'.join(str(p) for p in spec.params)
    session = Session(part, spec.engine, state_cap=spec.state_cap)
    policy = make_policy(spec.policy, spec.seed)
    goals = list(spec.goals)
    rows = []
    stopped = False
    for idx, n in enumerate(goals):
        row = ResultRow(spec.family, params, n, spec.engine, 'timeout', None,
                        None, None, None, spec.seed)
        rows.append(row)
        if stopped:
            continue
        t0 = clock()
        try:
            v = session.add_goal(goal(n), timeout_s=spec.timeout_s)
        except ResourceLimit as e:
            row.add_ms = (clock() - t0) * 1000.0
            row.error = str(e)
            stopped = True
            logger.info('%s %s: goal %d aborted: %s',
                        spec.family, params, n, e)
            continue
        row.add_ms = (clock() - t0) * 1000.0
        row.verdict = 'realizable' if v.realizable else 'unrealizable'
        row.new_dfa_states = v.new_dfa_states
        row.arena_states = v.arena_states
        last = idx == len(goals) - 1
        if not last:
            steps = spec.steps_per_goal if session.active is not None else 0
            for _ in range(steps):
                m = session.agent_move()
                session.env_move(policy(session, m))
            row.episode_steps = steps
        elif session.active is not None:
            try:
                log = run_episode(session, policy)
                row.episode_steps = log.steps
            except StepLimit as e:
                log = e.log
                row.episode_steps = log.steps
                row.error = str(e)
            row.literal_ok, row.joint_ok = verify_log(log)
            row.extra['log'] = log
        else:
            row.episode_steps = 0
    return rows


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, 'w', newline='') as fh:
        fh.write(format_csv(rows))
