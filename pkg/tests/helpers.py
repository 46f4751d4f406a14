"""Random generators and brute-force oracles shared by the tests."""
import itertools
import random

from isynth import dfa as D
from isynth.bdd import FALSE
from isynth.game import AtomPartition, DfaGame
from isynth.ltlf import eval_trace


def random_formula(rng, ctx, atoms, depth):
    """Random NNF formula (not simplified) of depth at most `depth`."""
    if depth <= 1 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.08:
            return ctx.true
        if r < 0.16:
            return ctx.false
        a = rng.choice(atoms)
        return ctx.prop(a) if r < 0.6 else ctx.nprop(a)
    sub = lambda: random_formula(rng, ctx, atoms, depth - 1)
    op = rng.choice(['and', 'or', 'X', 'N', 'U', 'R', 'F', 'G'])
    if op == 'and':
        return ctx.and_([sub() for _ in range(rng.randint(2, 3))])
    if op == 'or':
        return ctx.or_([sub() for _ in range(rng.randint(2, 3))])
    if op == 'X':
        return ctx.next(sub())
    if op == 'N':
        return ctx.wnext(sub())
    if op == 'U':
        return ctx.until(sub(), sub())
    if op == 'R':
        return ctx.release(sub(), sub())
    if op == 'F':
        return ctx.eventually(sub())
    return ctx.always(sub())


def letters(atoms):
    """All assignments over `atoms`, as frozensets."""
    out = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        out.append(frozenset(a for a, b in zip(atoms, bits) if b))
    return out


def traces(atoms, max_len, min_len=1):
    ls = letters(atoms)
    for n in range(min_len, max_len + 1):
        yield from itertools.product(ls, repeat=n)


def random_trace(rng, atoms, n):
    return [frozenset(a for a in atoms if rng.random() < 0.5)
            for _ in range(n)]


def nerode_classes(phi, atoms, prefix_len, suffix_len):
    """Number of distinct residual languages of `phi`, by brute force.

    Prefixes up to `prefix_len` letters are told apart by membership of
    ``prefix + suffix`` for all suffixes up to `suffix_len` letters.
    The empty word is in no language.
    """
    def member(t):
        return len(t) > 0 and eval_trace(t, phi)

    suffixes = [()] + list(traces(atoms, suffix_len))
    sigs = set()
    for p in itertools.chain([()], traces(atoms, prefix_len)):
        sigs.add(tuple(member(tuple(p) + tuple(s)) for s in suffixes))
    return len(sigs)


# games

def random_game(rng, n_states, ctx):
    """Random total DFA over agent `y` and env `x` with `n_states` states."""
    bdd = ctx.bdd
    atoms = ('y', 'x')
    for a in atoms:
        ctx.register(a)
    edges = []
    for s in range(n_states):
        by_target = {}
        for w in letters(atoms):
            t = rng.randrange(n_states)
            cube = bdd.cube({a: a in w for a in atoms})
            by_target[t] = bdd._or(by_target.get(t, FALSE), cube.node)
        edges.append([(bdd.ref(g), t) for t, g in sorted(by_target.items())])
    accepting = {s for s in range(n_states) if rng.random() < 0.3}
    A = D.Dfa(bdd, atoms, rng.randrange(n_states), accepting, edges)
    return DfaGame(A, AtomPartition(['y'], ['x']))


def minimax_win(game, s, depth):
    """Can the agent force a visit to an accepting state within `depth` steps?"""
    A = game.dfa
    agent_moves = letters(game.partition.agent)
    env_moves = letters(game.partition.env)
    memo = {}

    def win(s, d):
        if s in A.accepting:
            return True
        if d == 0:
            return False
        key = (s, d)
        if key not in memo:
            memo[key] = any(
                all(win(D.step(A, s, y | x), d - 1) for x in env_moves)
                for y in agent_moves)
        return memo[key]

    return win(s, depth)


def strategy_wins(game, solution, s, depth):
    """Does every play following the strategy from `s` reach F in time?"""
    A = game.dfa
    env_moves = letters(game.partition.env)

    def play(s, d):
        if s in A.accepting:
            return True
        if d == 0 or s not in solution.strategy:
            return False
        y = solution.strategy[s]
        return all(play(D.step(A, s, y | x), d - 1) for x in env_moves)

    return play(s, depth)


def explore_all(session, max_steps, check, budget=200_000):
    """Play every environment sequence from `session` until joint acceptance.

    Calls `check(log)` on each completed play; returns the number of
    plays, or raises AssertionError if some play exceeds `max_steps`.
    """
    env_moves = letters(session.partition.env)
    count = 0

    def rec(s, steps):
        nonlocal count
        if s.jointly_accepting():
            count += 1
            assert count <= budget, 'exploration budget exhausted'
            check(s.log(steps))
            return
        assert steps < max_steps, 'play exceeded the step bound'
        for x in env_moves:
            t = s.fork()
            t.agent_move()
            t.env_move(x)
            rec(t, steps + 1)

    rec(session, 0)
    return count


# Boolean expressions for the BDD kernel

VARS = ('a', 'b', 'c', 'd')


def random_expr(rng, depth):
    """Nested tuples over VARS with ops not/and/or/ite/const."""
    if depth <= 1 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return ('const', rng.random() < 0.5)
        return ('var', rng.choice(VARS))
    op = rng.choice(['not', 'and', 'or', 'ite'])
    if op == 'not':
        return ('not', random_expr(rng, depth - 1))
    if op == 'ite':
        return ('ite',) + tuple(random_expr(rng, depth - 1) for _ in range(3))
    return (op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))


def evaluate(e, w):
    op = e[0]
    if op == 'const':
        return e[1]
    if op == 'var':
        return e[1] in w
    if op == 'not':
        return not evaluate(e[1], w)
    if op == 'and':
        return evaluate(e[1], w) and evaluate(e[2], w)
    if op == 'or':
        return evaluate(e[1], w) or evaluate(e[2], w)
    return evaluate(e[2], w) if evaluate(e[1], w) else evaluate(e[3], w)


def build(bdd, e):
    op = e[0]
    if op == 'const':
        return bdd.true if e[1] else bdd.false
    if op == 'var':
        return bdd.var(e[1])
    if op == 'not':
        return bdd.not_(build(bdd, e[1]))
    if op == 'and':
        return bdd.and_(build(bdd, e[1]), build(bdd, e[2]))
    if op == 'or':
        return bdd.or_(build(bdd, e[1]), build(bdd, e[2]))
    return bdd.ite(*(build(bdd, x) for x in e[1:]))


ASSIGNMENTS = [frozenset(v for v, b in zip(VARS, bits) if b)
               for bits in itertools.product((0, 1), repeat=4)]


def truth_table(e):
    return tuple(evaluate(e, w) for w in ASSIGNMENTS)
