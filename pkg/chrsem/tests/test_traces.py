import pytest
from hypothesis import given, settings, strategies as st

from chrsem.abstraction import alpha, var_sets_abstract
from chrsem.errors import SequenceError, UnsupportedError
from chrsem.syntax import parse_goal, parse_program
from chrsem.terms import AtomMultiset, EMPTY
from chrsem.theory import BuiltinStore, implies
from chrsem.traces import (CompConfig, ConcreteSequence, ConcreteStep, TraceEngine, comp_step,
                           enumerate_sprime, is_compatible, var_sets_concrete)
from chrsem.tests import corpus_entries, corpus_program, gh_program


@pytest.fixture(scope='module')
def gh():
    return gh_program()


def test_comp_step_partial_match(gh):
    goal = parse_goal('g(U)').indexed(0)
    steps = comp_step(CompConfig(goal), gh)
    assert len(steps) == 1
    (K, cfg), = steps
    assert [a.pred for a in K] == ['h']
    assert len(cfg.goal) == 1 and cfg.goal[0].is_builtin
    assert not cfg.store.is_true


def test_comp_step_candidates(gh):
    goal = parse_goal('g(U), h(V)').indexed(0)
    engine = TraceEngine(gh)
    steps = engine.comp_step(CompConfig(goal))
    assumed = sorted(t.K.tostring() for t in steps)
    # full match, g assuming a general h, g assuming h(V),
    # h assuming a general g and h assuming g(U)
    assert len(steps) == 5
    assert assumed.count('{}') == 1
    no_assumptions = TraceEngine(gh, assumptions=False).comp_step(CompConfig(goal))
    assert len(no_assumptions) == 1
    assert not no_assumptions[0].K


def test_comp_step_builtins_and_false(gh):
    goal = parse_goal('U = a, g(U)').indexed(0)
    engine = TraceEngine(gh)
    solves = [t for t in engine.comp_step(CompConfig(goal)) if t.target.builtins() == EMPTY
              and len(t.target) == 1]
    assert len(solves) == 1
    assert solves[0].d.tostring() == 'U = a'
    assert engine.comp_step(CompConfig(goal, BuiltinStore.false)) == []


def test_body_index(gh):
    goal = parse_goal('g(U), h(V)').indexed(0)
    engine = TraceEngine(gh, assumptions=False)
    t, = engine.comp_step(CompConfig(goal))
    assert [a.index for a in t.target] == [1]
    assert t.target[0].is_builtin


def test_enumerate_without_assumptions(gh):
    goal = parse_goal('g(U), h(V)')
    traces = enumerate_sprime(gh, goal, 4)
    connected = TraceEngine(gh, assumptions=False).enumerate(goal, 4)
    # terminal, fire and stop, fire, solve and stop
    assert len(connected) == 3
    assert connected <= traces
    assert not connected.truncated
    for delta in connected:
        delta.validate()
        assert delta.is_assumption_free
        assert delta.is_chained


def test_enumerate_truncation(gh):
    goal = parse_goal('g(U), h(V)')
    assert TraceEngine(gh).enumerate(goal, 1).truncated
    assert len(TraceEngine(gh).enumerate(goal, 1)) == 1
    with pytest.raises(ValueError, match='depth must be at least 1'):
        TraceEngine(gh).enumerate(goal, 0)


def test_enumerate_assumes_rewritten_goal_atoms(gh):
    goal = parse_goal('g(U), h(V)')
    g, h = (AtomMultiset([a]) for a in goal.atoms)

    def assumed(traces):
        return {(delta[0].K, delta[1].K) for delta in traces if len(delta) == 3}

    # the second step assumes the atom the first step rewrote
    pairs = assumed(TraceEngine(gh).enumerate(goal, 3))
    assert (g, h) in pairs
    assert (h, g) in pairs
    pairs = assumed(TraceEngine(gh, context=()).enumerate(goal, 3))
    assert (g, h) not in pairs
    assert (h, g) not in pairs


def test_propagation_unsupported():
    program = parse_program('p @ a(X) ==> b(X).')
    with pytest.raises(UnsupportedError, match='propagation rules are not supported'):
        TraceEngine(program)


def test_sequence_validate(gh):
    goal = parse_goal('g(U)').indexed(0)
    terminal = ConcreteStep.terminal(goal, BuiltinStore.true)
    ConcreteSequence([terminal]).validate()
    with pytest.raises(SequenceError, match='empty sequence'):
        ConcreteSequence([]).validate()
    step = ConcreteStep(goal, BuiltinStore.true, EMPTY, AtomMultiset(), BuiltinStore.true)
    with pytest.raises(SequenceError, match='last step 1 is not terminal'):
        ConcreteSequence([step]).validate()
    with pytest.raises(SequenceError, match='output goal of step 1'):
        ConcreteSequence([step, terminal]).validate()


def test_compatibility(gh):
    goal = parse_goal('g(U), h(V)').indexed(0)
    engine = TraceEngine(gh, assumptions=False)
    t, = engine.comp_step(CompConfig(goal))
    tail = ConcreteSequence([ConcreteStep.terminal(t.target, t.d)])
    assert is_compatible(t, tail)
    stronger = ConcreteSequence([ConcreteStep.terminal(t.target, BuiltinStore.true)])
    assert not is_compatible(t, stronger)


CORPUS_GOALS = [
    ('gh', 'g(U), h(V)'),
    ('prodcons', 'p(U), r(V)'),
    ('body', 'pair(U, V)'),
    ('guarded', 'set(U), check(U)'),
]


@pytest.mark.parametrize('name, goal', CORPUS_GOALS)
def test_variable_sets_preserved_by_abstraction(name, goal):
    program = corpus_program(name)
    goal = parse_goal(goal)
    for delta in enumerate_sprime(program, goal, 3):
        delta.validate()
        assert var_sets_concrete(delta) == var_sets_abstract(alpha(delta))


@pytest.mark.slow
def test_variable_sets_corpus():
    for entry in corpus_entries():
        program = parse_program(entry['text'])
        for text in entry['goals']:
            goal = parse_goal(text)
            for delta in enumerate_sprime(program, goal, min(entry['depth'], 4)):
                assert var_sets_concrete(delta) == var_sets_abstract(alpha(delta)), (
                    entry['name'], text, delta)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(CORPUS_GOALS), st.integers(min_value=1, max_value=2))
def test_enumeration_monotone_in_depth(entry, depth):
    name, text = entry
    program = corpus_program(name)
    goal = parse_goal(text)
    shorter = enumerate_sprime(program, goal, depth)
    longer = enumerate_sprime(program, goal, depth + 1)
    assert shorter <= longer
    assert {delta for delta in longer if len(delta) <= depth} == shorter
    for delta in longer:
        delta.validate()
        # stores only grow along a derivation
        for t in delta:
            assert implies(t.d, t.c)
