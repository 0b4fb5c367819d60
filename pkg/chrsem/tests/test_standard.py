import pytest

from chrsem.errors import TruncationWarning
from chrsem.standard import (StandardEngine, StdConfig, data_sufficient_answers,
                             qualified_answers, std_derivations, std_step, initial_config)
from chrsem.syntax import parse_goal, parse_program
from chrsem.theory import BuiltinStore, implies
from chrsem.tests import corpus_program, gh_program

PROPAGATE = 'p @ a(X) ==> b(X).\n'


@pytest.fixture(scope='module')
def gh():
    return gh_program()


@pytest.mark.parametrize('goal, expected', [
    ('g(U), h(V)', ['U = V']),
    ('g(U)', []),
    ('k(U), h(V)', []),
    ('true', ['true']),
    ('false', ['false']),
    ('U = a', ['U = a']),
    ('g(U), h(V), U = a, V = b', ['false']),
])
def test_data_sufficient_answers(gh, goal, expected):
    answers = data_sufficient_answers(gh, parse_goal(goal), 8)
    assert answers.tostrings() == expected
    assert not answers.truncated


def test_qualified_answers(gh):
    assert qualified_answers(gh, parse_goal('g(U)'), 8).tostrings() == ['g(U)']
    assert qualified_answers(gh, parse_goal('g(U), h(V)'), 8).tostrings() == ['U = V']
    answers = qualified_answers(gh, parse_goal('g(U), g(W), h(V)'), 8)
    assert answers.tostrings() == ['g(U), W = V', 'g(W), U = V']


def test_propagation_history():
    program = parse_program(PROPAGATE)
    goal = parse_goal('a(U)')
    assert qualified_answers(program, goal, 6).tostrings() == ['a(U), b(U)']
    assert data_sufficient_answers(program, goal, 6).tostrings() == []


def test_naive_propagation_truncates():
    program = parse_program(PROPAGATE)
    with pytest.warns(TruncationWarning, match='truncated at depth 5'):
        answers = qualified_answers(program, parse_goal('a(U)'), 5, naive=True)
    assert answers.truncated
    assert len(answers) == 0


def test_transitions(gh):
    engine = StandardEngine(gh)
    cfg = initial_config(parse_goal('g(U), h(V)'))
    labels = sorted(label[0] for label, _ in engine.transitions(cfg))
    assert labels == ['introduce', 'introduce']
    assert len(std_step(cfg, gh)) == 2
    assert engine.transitions(StdConfig(cfg.goal, store=BuiltinStore.false)) == []


def test_derivations(gh):
    derivations = std_derivations(gh, parse_goal('g(U), h(V)'), 8)
    assert len(derivations) == 2
    for path in derivations:
        assert len(path) == 5
        assert not path[-1].goal and not path[-1].chr_store
    with pytest.raises(ValueError, match='depth must be at least 1'):
        std_derivations(gh, parse_goal('g(U)'), 0)


def test_answers_equal_regardless_of_truncation(gh):
    goal = parse_goal('g(U), h(V)')
    with pytest.warns(TruncationWarning):
        short = data_sufficient_answers(gh, goal, 2)
    assert short.truncated
    assert short.tostrings() == []
    assert data_sufficient_answers(gh, goal, 8) == data_sufficient_answers(gh, goal, 9)


@pytest.mark.slow
def test_parallel_answers(gh):
    goal = parse_goal('g(U), g(W), h(V)')
    sequential = qualified_answers(gh, goal, 8)
    parallel = qualified_answers(gh, goal, 8, jobs=2)
    assert sequential == parallel
    assert sequential.tostrings() == parallel.tostrings()


@pytest.mark.parametrize('name, goal', [
    ('gh', 'g(U), g(W), h(V)'),
    ('prodcons', 'p(U), r(V)'),
    ('guarded', 'set(U), check(U)'),
    ('body', 'pair(U, V)'),
])
def test_sufficient_answers_are_qualified(name, goal):
    program = corpus_program(name)
    goal = parse_goal(goal)
    sufficient = data_sufficient_answers(program, goal, 8)
    qualified = qualified_answers(program, goal, 8)
    assert set(sufficient) <= set(qualified)
    for path in std_derivations(program, goal, 8):
        for before, after in zip(path, path[1:]):
            assert implies(after.store, before.store)
