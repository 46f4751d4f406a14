"""Reachability games on DFAs and their strategies.

The agent picks its atoms first, then the environment answers; a
state is winning when the agent can force a visit to an accepting
state.  Ties between winning moves are broken by `BDD.any_sat`.
"""
import time
from dataclasses import dataclass

from isynth.bdd import FALSE
from isynth.dfa import step as dfa_step
from isynth.errors import AlternationError, OutOfRegion, Timeout, UnknownAtom
from isynth.ltlf.semantics import as_assignment


@dataclass(frozen=True)
class AtomPartition:
    """Agent (output) atoms `agent` and environment (input) atoms `env`."""
    agent: tuple
    env: tuple

    def __post_init__(self):
        object.__setattr__(self, 'agent', tuple(self.agent))
        object.__setattr__(self, 'env', tuple(self.env))
        both = set(self.agent) & set(self.env)
        if both:
            raise ValueError(f'atoms {sorted(both)} are both agent and env')
        if len(set(self.agent)) != len(self.agent) or \
                len(set(self.env)) != len(self.env):
            raise ValueError('duplicate atom in partition')

    @property
    def atoms(self):
        return self.agent + self.env


class DfaGame:

    def __init__(self, dfa, partition):
        if set(dfa.atoms) != set(partition.atoms):
            raise ValueError(
                f'partition {sorted(partition.atoms)} does not match '
                f'automaton vocabulary {sorted(dfa.atoms)}')
        self.dfa = dfa
        self.partition = partition
        bdd = dfa.bdd
        self._env_levels = frozenset(bdd.level_of(a) for a in partition.env)

    @property
    def initial(self):
        return self.dfa.initial

    def _forall_env(self, u, cache):
        return self.dfa.bdd._quantify(u, self._env_levels, True, cache)


@dataclass
class Solution:
    """Winning region, per-state agent move, and fixpoint iteration count.

    `rank[s]` is the iteration at which `s` entered the region.
    """
    winning: frozenset
    strategy: dict
    iterations: int
    rank: dict


def cpre(game, W):
    """Controllable predecessors of `W`, with a witness move for each."""
    A = game.dfa
    bdd = A.bdd
    W = set(W)
    cache = {}
    states = set()
    witness = {}
    for s, out in enumerate(A.edges):
        into = FALSE
        for g, t in out:
            if t in W:
                into = bdd._or(into, g.node)
        if into == FALSE:
            continue
        f = game._forall_env(into, cache)
        if f != FALSE:
            states.add(s)
            witness[s] = bdd.any_sat(bdd.ref(f))
    return states, witness


def solve(game, deadline=None):
    """Least fixpoint of ``W = F | cpre(W)`` with strategy extraction."""
    A = game.dfa
    W = set(A.accepting)
    rank = {s: 0 for s in W}
    strategy = {}
    it = 0
    while True:
        if deadline is not None and time.perf_counter() > deadline:
            raise Timeout('time budget exhausted')
        pre, witness = cpre(game, W)
        new = pre - W
        if not new:
            break
        it += 1
        for s in new:
            strategy[s] = witness[s]
            rank[s] = it
        W |= new
    # accepting states: keep playing inside the region if possible
    for s in A.accepting:
        strategy[s] = witness.get(s, frozenset())
    return Solution(frozenset(W), strategy, it, rank)


def is_realizable(game, solution=None):
    if solution is None:
        solution = solve(game)
    return game.initial in solution.winning


class Transducer:
    """Executable strategy: `move()` and `step(x)` strictly alternate."""

    def __init__(self, game, solution, state=None):
        self.game = game
        self.solution = solution
        self.current = game.initial if state is None else state
        self.pending = None
        self.visited_accepting = self.current in game.dfa.accepting
        self._env = frozenset(game.partition.env)

    def copy(self):
        t = Transducer(self.game, self.solution, self.current)
        t.pending = self.pending
        t.visited_accepting = self.visited_accepting
        return t

    def peek(self):
        """The move `move()` would return, without committing to it."""
        m = self.solution.strategy.get(self.current)
        if m is None:
            if not self.visited_accepting:
                raise OutOfRegion(
                    f'state {self.current} is outside the winning region')
            m = frozenset()
        return m

    def move(self):
        if self.pending is not None:
            raise AlternationError('move() called twice without step()')
        self.pending = self.peek()
        return self.pending

    def step(self, x):
        if self.pending is None:
            raise AlternationError('step() called before move()')
        x = as_assignment(x)
        extra = x - self._env
        if extra:
            raise UnknownAtom(f'not environment atoms: {sorted(extra)}')
        w = self.pending | x
        self.pending = None
        self.current = dfa_step(self.game.dfa, self.current, w)
        if self.current in self.game.dfa.accepting:
            self.visited_accepting = True
        return self.current


def make_transducer(game, solution):
    return Transducer(game, solution)
