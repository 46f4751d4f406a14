"""Incremental synthesis sessions.

A `Session` keeps the adopted goals, the history played so far and
the strategy in use.  Goals arrive with `add_goal` at any point of the
execution; a goal is adopted only if the whole goal set, each goal
read from its own arrival onwards, is still realizable.

Two engines are available:

``dp``
    every goal automaton is built once; later additions reuse the
    stored automata with their initial state moved along the history.
``fp``
    every addition rebuilds one automaton from the conjunction of the
    progressed formulas of the stored goals and the new goal.
"""
import logging
import random
import time
from dataclasses import dataclass, field

from isynth import dfa as D
from isynth.errors import AlternationError, StepLimit, UnknownAtom
from isynth.game import DfaGame, Transducer, solve
from isynth.ltlf import formula as fm
from isynth.ltlf.formula import Context, Formula
from isynth.ltlf.parser import parse_formula
from isynth.ltlf.semantics import as_assignment, eval_empty, eval_trace, prog_step


logger = logging.getLogger(__name__)
MODES = ('dp', 'fp')


@dataclass
class GoalRecord:
    formula: Formula
    arrival: int
    dfa: object = None
    current: int = None
    residual: Formula = None
    satisfied_ever: bool = False

    def copy(self):
        return GoalRecord(self.formula, self.arrival, self.dfa, self.current,
                          self.residual, self.satisfied_ever)


@dataclass
class Verdict:
    realizable: bool
    formula: Formula
    arena: object
    new_dfa_states: int
    transducer: Transducer = None

    def __bool__(self):
        return self.realizable

    @property
    def arena_states(self):
        return len(self.arena)


@dataclass
class GoalStatus:
    satisfied_now: bool
    satisfied_ever: bool


class Session:
    """Incremental synthesis over a fixed atom partition.

    @param partition: `AtomPartition`; agent atoms come first in the
        BDD variable order
    @param mode: ``'dp'`` or ``'fp'``
    @param state_cap: per-automaton state limit
    """

    def __init__(self, partition, mode='dp', ctx=None, state_cap=None):
        if mode not in MODES:
            raise ValueError(f'unknown engine {mode!r}')
        self.partition = partition
        self.mode = mode
        self.state_cap = state_cap
        if ctx is None:
            ctx = Context(partition.atoms, frozen=True)
        self.ctx = ctx
        self.vocab = tuple(partition.atoms)
        self._env = frozenset(partition.env)
        self._agent = frozenset(partition.agent)
        self.goals = []
        self.history = []
        self.active = None
        self._move = None

    @property
    def clock(self):
        return len(self.history)

    def fork(self):
        """Independent copy sharing the immutable parts (context, DFAs)."""
        s = Session.__new__(Session)
        s.__dict__.update(self.__dict__)
        s.goals = [g.copy() for g in self.goals]
        s.history = list(self.history)
        s.active = None if self.active is None else self.active.copy()
        return s

    def parse(self, text):
        return parse_formula(text, self.ctx)

    def _formula(self, phi):
        if isinstance(phi, Formula):
            if phi.ctx is not self.ctx:
                phi = self.ctx.rebuild(phi)
            return fm.simplify(phi)
        return self.parse(phi)

    # goal addition

    def build_arena(self, phi, deadline=None):
        """Game automaton for adding `phi` now, and the new-goal DFA size."""
        cap = self.state_cap
        # every translation starts cold, so FP cannot reuse the
        # transitions of earlier conversions through the memo tables
        self.ctx.forget_progressions()
        if self.mode == 'dp':
            new = D.minimize(D.from_formula(phi, self.vocab, cap, deadline))
            parts = [g.dfa.with_initial(g.current) for g in self.goals]
            parts.append(new)
            arena = D.minimize(D.trim(D.product(parts, cap, deadline)))
            return arena, new
        psi = fm.simplify_and(
            self.ctx, [g.residual for g in self.goals] + [phi])
        arena = D.minimize(D.from_formula(psi, self.vocab, cap, deadline))
        return arena, arena

    def add_goal(self, phi, timeout_s=None):
        """Try to adopt goal `phi` (text or `Formula`) at the current clock.

        The session only changes if the verdict is realizable.
        """
        if self._move is not None:
            raise AlternationError('add_goal() between agent and env moves')
        deadline = None
        if timeout_s is not None:
            deadline = time.perf_counter() + timeout_s
        phi = self._formula(phi)
        arena, new = self.build_arena(phi, deadline)
        game = DfaGame(arena, self.partition)
        sol = solve(game, deadline)
        ok = game.initial in sol.winning
        v = Verdict(ok, phi, arena, len(new))
        logger.debug('add_goal %s at %d: %s (arena %d states)',
                     fm.to_str(phi), self.clock, ok, len(arena))
        if not ok:
            return v
        rec = GoalRecord(phi, self.clock, residual=phi)
        if self.mode == 'dp':
            rec.dfa = new
            rec.current = new.initial
        self.goals.append(rec)
        self.active = Transducer(game, sol)
        v.transducer = self.active
        return v

    # execution

    def peek_move(self):
        if self._move is not None:
            return self._move
        return frozenset() if self.active is None else self.active.peek()

    def agent_move(self):
        if self._move is not None:
            raise AlternationError('agent_move() called twice')
        if self.active is None:
            m = frozenset()
        else:
            m = self.active.move()
        self._move = m
        return m

    def env_move(self, x):
        if self._move is None:
            raise AlternationError('env_move() before agent_move()')
        x = as_assignment(x)
        extra = x - self._env
        if extra:
            raise UnknownAtom(f'not environment atoms: {sorted(extra)}')
        w = self._move | x
        self._move = None
        self.history.append(w)
        if self.active is not None:
            self.active.step(x)
        for g in self.goals:
            if self.mode == 'dp':
                g.current = D.step(g.dfa, g.current, w)
            else:
                g.residual = prog_step(g.residual, w)
            if self._accepting(g):
                g.satisfied_ever = True
        return w

    def _accepting(self, g):
        if self.clock == g.arrival:
            return False
        if self.mode == 'dp':
            return g.current in g.dfa.accepting
        return eval_empty(g.residual)

    def goal_status(self):
        return [GoalStatus(self._accepting(g), g.satisfied_ever)
                for g in self.goals]

    def jointly_accepting(self):
        return all(self._accepting(g) for g in self.goals)

    def log(self, steps=None, moves=None):
        return EpisodeLog(tuple(self.history),
                          tuple((g.arrival, g.formula) for g in self.goals),
                          tuple(moves or ()),
                          self.clock if steps is None else steps)


def new_session(partition, mode='dp', **kw):
    return Session(partition, mode, **kw)


# episodes

@dataclass
class EpisodeLog:
    """Full history of a session plus the goal arrivals.

    `moves` are the agent moves of the episode, `steps` how many steps
    the episode itself executed.
    """
    trace: tuple
    goals: tuple
    moves: tuple = ()
    steps: int = 0


class RandomPolicy:
    """Uniform environment moves from a seeded generator."""

    def __init__(self, seed=0):
        self.seed = seed
        self.rng = random.Random(seed)

    def __call__(self, session, move):
        return frozenset(a for a in session.partition.env
                         if self.rng.random() < 0.5)


class PassivePolicy:
    """All environment atoms false."""

    def __call__(self, session, move):
        return frozenset()


class ScriptedPolicy:
    """Replays the given environment moves, then stays passive."""

    def __init__(self, moves):
        self.moves = [as_assignment(x) for x in moves]
        self.i = 0

    def __call__(self, session, move):
        if self.i >= len(self.moves):
            return frozenset()
        x = self.moves[self.i]
        self.i += 1
        return x


def make_policy(name, seed=0):
    if name == 'random':
        return RandomPolicy(seed)
    if name == 'passive':
        return PassivePolicy()
    raise ValueError(f'unknown policy {name!r}')


def default_max_steps(session):
    if session.active is None:
        return 0
    return 4 * len(session.active.game.dfa)


def run_episode(session, policy, max_steps=None):
    """Play until all goals are satisfied at once.

    Raises `StepLimit` after `max_steps` steps (default: four times the
    arena size).
    """
    if max_steps is None:
        max_steps = default_max_steps(session)
    moves = []
    while not session.jointly_accepting():
        if len(moves) >= max_steps:
            err = StepLimit(f'goals not met within {max_steps} steps')
            err.log = session.log(len(moves), moves)
            raise err
        m = session.agent_move()
        session.env_move(policy(session, m))
        moves.append(m)
    return session.log(len(moves), moves)


def verify_log(log):
    """Check a log against the goal formulas with the trace semantics.

    Returns ``(literal_ok, joint_ok)``.  `literal_ok` asks that each goal
    be satisfied by some slice starting at its arrival; `joint_ok` asks
    for one end point where all those slices are satisfied together.
    """
    trace = log.trace
    n = len(trace)
    if not log.goals:
        return True, True
    sat = []
    for arrival, phi in log.goals:
        sat.append({k for k in range(arrival, n)
                    if eval_trace(trace[arrival:k + 1], phi)})
    literal_ok = all(sat)
    joint_ok = bool(set.intersection(*sat))
    return literal_ok, joint_ok
