import random

import pytest

from isynth import dfa as D
from isynth.errors import AlternationError, OutOfRegion, UnknownAtom
from isynth.game import (AtomPartition, DfaGame, Transducer, cpre,
                         is_realizable, solve)
from isynth.ltlf import Context, parse_formula

from helpers import minimax_win, random_game, strategy_wins


PART = AtomPartition(['y'], ['x'])


def game_of(text):
    ctx = Context(PART.atoms)
    A = D.minimize(D.from_formula(parse_formula(text, ctx), PART.atoms))
    return DfaGame(A, PART)


def test_partition_validation():
    with pytest.raises(ValueError):
        AtomPartition(['a'], ['a'])
    with pytest.raises(ValueError):
        AtomPartition(['a', 'a'], [])
    assert AtomPartition(['a'], ['b']).atoms == ('a', 'b')


def test_game_vocabulary_must_match():
    ctx = Context(['y', 'x', 'z'])
    A = D.from_formula(parse_formula('F z', ctx), ['y', 'x', 'z'])
    with pytest.raises(ValueError):
        DfaGame(A, PART)


@pytest.mark.parametrize('text,want', [
    ('F y', True), ('F x', False), ('true', True), ('G false', False),
    ('F (y & X y)', True), ('G y', True), ('F (x | y)', True),
    ('y U x', False), ('X (x -> y)', True), ('F x | F y', True),
])
def test_handcrafted(text, want):
    g = game_of(text)
    sol = solve(g)
    assert is_realizable(g, sol) == want
    for s in g.dfa.states:
        assert (s in sol.winning) == minimax_win(g, s, len(g.dfa))


def test_eventually_y_strategy():
    g = game_of('F y')
    sol = solve(g)
    t = Transducer(g, sol)
    assert t.move() == {'y'}
    t.step(set())
    assert t.visited_accepting


def test_random_games_match_minimax():
    rng = random.Random(31)
    for i in range(150):
        ctx = Context()
        g = random_game(rng, rng.randint(1, 6), ctx)
        sol = solve(g)
        n = len(g.dfa)
        for s in g.dfa.states:
            win = minimax_win(g, s, n)
            assert (s in sol.winning) == win, (i, s)
            if win:
                assert strategy_wins(g, sol, s, n), (i, s)
        assert is_realizable(g, sol) == (g.initial in sol.winning)


def test_rank_is_distance():
    rng = random.Random(32)
    for _ in range(50):
        g = random_game(rng, 5, Context())
        sol = solve(g)
        for s in sol.winning:
            r = sol.rank[s]
            assert minimax_win(g, s, r)
            assert r == 0 or not minimax_win(g, s, r - 1)


def test_cpre_of_nothing_is_empty():
    g = game_of('F y')
    assert cpre(g, set()) == (set(), {})


def test_transducer_alternation_and_atoms():
    g = game_of('F y')
    t = Transducer(g, solve(g))
    with pytest.raises(AlternationError):
        t.step(set())
    t.move()
    with pytest.raises(AlternationError):
        t.move()
    with pytest.raises(UnknownAtom):
        t.step({'y'})
    t.step({'x'})
    t.move()
    c = t.copy()
    c.step(set())
    assert t.pending is not None and c.pending is None


def test_transducer_out_of_region():
    g = game_of('F x')
    sol = solve(g)
    t = Transducer(g, sol)
    with pytest.raises(OutOfRegion):
        t.move()


def test_move_after_acceptance_is_defined():
    g = game_of('y')
    sol = solve(g)
    t = Transducer(g, sol)
    t.move()
    t.step(set())
    # after the goal is met the transducer keeps answering
    for _ in range(3):
        t.move()
        t.step({'x'})
