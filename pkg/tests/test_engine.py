import random

import pytest

from isynth import dfa as D
from isynth.engine import (EpisodeLog, PassivePolicy, RandomPolicy,
                           ScriptedPolicy, Session, make_policy, run_episode,
                           verify_log)
from isynth.errors import AlternationError, StepLimit, UnknownAtom
from isynth.game import AtomPartition
from isynth.ltlf import Context, to_str

from helpers import explore_all, random_formula


PART = AtomPartition(['y'], ['x'])


def snapshot(s):
    return ([(g.formula, g.arrival, g.current, g.residual) for g in s.goals],
            list(s.history), s.active)


@pytest.mark.parametrize('mode', ['dp', 'fp'])
def test_single_goal(mode):
    s = Session(PART, mode)
    v = s.add_goal('F y')
    assert v.realizable and bool(v)
    assert s.agent_move() == {'y'}
    s.env_move(set())
    assert s.jointly_accepting()
    assert s.goal_status()[0].satisfied_now


@pytest.mark.parametrize('mode', ['dp', 'fp'])
def test_rejection_has_no_side_effects(mode):
    s = Session(PART, mode)
    s.add_goal('G (x -> y)')
    s.agent_move()
    s.env_move({'x'})
    before = snapshot(s)
    v = s.add_goal('G false')
    assert not v.realizable and v.transducer is None
    assert snapshot(s) == before
    v = s.add_goal('F (x & !y)')
    assert not v
    assert snapshot(s) == before


@pytest.mark.parametrize('mode', ['dp', 'fp'])
def test_conflict_with_history(mode):
    s = Session(PART, mode)
    assert s.add_goal('G y')
    s.agent_move()
    s.env_move(set())
    assert not s.add_goal('F !y')
    # the goal set is unchanged and still playable
    assert len(s.goals) == 1
    s.agent_move()


def test_new_goal_counts_from_arrival():
    s = Session(PART, 'dp')
    s.add_goal('G (x -> X y)')
    s.agent_move()
    s.env_move({'x'})
    # "y now" must hold at the arrival step, i.e. the next one
    v = s.add_goal('y')
    assert v
    assert s.agent_move() == {'y'}


def test_alternation_and_env_atoms():
    s = Session(PART)
    s.add_goal('F y')
    with pytest.raises(AlternationError):
        s.env_move(set())
    s.agent_move()
    with pytest.raises(AlternationError):
        s.agent_move()
    with pytest.raises(AlternationError):
        s.add_goal('true')
    with pytest.raises(UnknownAtom):
        s.env_move({'y'})
    s.env_move({'x'})


def test_moves_without_goals():
    s = Session(PART)
    assert s.peek_move() == frozenset()
    assert s.agent_move() == frozenset()
    s.env_move({'x'})
    assert s.jointly_accepting()


def test_dp_arena_reuses_stored_automata():
    s = Session(PART, 'dp')
    s.add_goal('G (x -> F y)')
    stored = s.goals[0].dfa
    s.agent_move()
    s.env_move({'x'})
    s.add_goal('F x | F y')
    assert s.goals[0].dfa is stored


def test_fork_is_independent():
    s = Session(PART)
    s.add_goal('F (y & X y)')
    t = s.fork()
    t.agent_move()
    t.env_move({'x'})
    assert s.clock == 0 and t.clock == 1
    assert s.goals[0].current != t.goals[0].current
    t.add_goal('F x | F y')
    assert len(s.goals) == 1 and len(t.goals) == 2


@pytest.mark.parametrize('mode', ['dp', 'fp'])
def test_exhaustive_environment(mode):
    s = Session(PART, mode)
    assert s.add_goal('G (x -> N y) & F y')
    s.agent_move()
    s.env_move({'x'})
    assert s.add_goal('F (y & X y)')
    n = len(s.active.game.dfa)

    def check(log):
        assert verify_log(log)[1]

    assert explore_all(s, 4 * n, check) > 1


def test_run_episode_and_policies():
    s = Session(PART, 'dp')
    s.add_goal('F (y & X y)')
    log = run_episode(s, RandomPolicy(3))
    assert verify_log(log) == (True, True)
    assert log.steps == len(log.moves) == 2
    assert isinstance(make_policy('passive'), PassivePolicy)
    with pytest.raises(ValueError):
        make_policy('greedy')
    p = ScriptedPolicy([{'x'}, set()])
    assert [p(None, None) for _ in range(3)] == [{'x'}, set(), set()]


def test_step_limit_carries_log():
    s = Session(PART)
    s.add_goal('F (y & X X y)')
    with pytest.raises(StepLimit) as e:
        run_episode(s, PassivePolicy(), max_steps=1)
    assert e.value.log.steps == 1


def test_verify_log_divergence():
    ctx = Context(PART.atoms)
    gy, fny = ctx.always(ctx.prop('y')), ctx.eventually(ctx.nprop('y'))
    log = EpisodeLog((frozenset({'y'}), frozenset()), ((0, gy), (1, fny)))
    assert verify_log(log) == (True, False)
    assert verify_log(EpisodeLog((), ())) == (True, True)


def test_random_scenarios_agree():
    rng = random.Random(41)
    for i in range(60):
        dp = Session(PART, 'dp')
        fp = Session(PART, 'fp', ctx=dp.ctx)
        for _ in range(3):
            phi = random_formula(rng, dp.ctx, ['x', 'y'], 3)
            a, b = dp.add_goal(phi), fp.add_goal(phi)
            assert a.realizable == b.realizable, (i, to_str(phi))
            assert D.lang_equiv_nonempty(a.arena, b.arena), (i, to_str(phi))
            for _ in range(rng.randint(0, 2)):
                x = frozenset({'x'}) if rng.random() < 0.5 else frozenset()
                assert dp.agent_move() == fp.agent_move()
                dp.env_move(x)
                fp.env_move(x)


def test_bad_mode():
    with pytest.raises(ValueError):
        Session(PART, 'zz')


def test_cache_coherence():
    # stored DFA pointers match a fresh fold over the history since arrival
    rng = random.Random(42)
    for _ in range(20):
        s = Session(PART, 'dp')
        for _ in range(4):
            s.add_goal(random_formula(rng, s.ctx, ['x', 'y'], 3))
            for _ in range(rng.randint(0, 3)):
                s.agent_move()
                s.env_move({'x'} if rng.random() < 0.5 else set())
            for g in s.goals:
                want = D.run(g.dfa, s.history[g.arrival:])
                assert g.current == want
