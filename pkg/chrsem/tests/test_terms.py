import pytest
from hypothesis import given, strategies as st

from chrsem.terms import (Var, Fun, Atom, AtomMultiset, Supply, _render, apply, canonicalize,
                          equation, free_vars, ordered_vars, rename_apart, substitute)
from chrsem.syntax import parse_goal
from chrsem.theory import BuiltinStore, solve


def test_var_identity():
    assert Var(1, 'X') == Var(1, 'Y')
    assert hash(Var(1, 'X')) == hash(Var(1))
    assert Var(1, 'X') != Var(2, 'X')
    assert Var(1).tostring() == '_G1'
    with pytest.raises(TypeError, match='variable id must be int'):
        Var('X')


def test_tostring():
    X = Var(1, 'X')
    assert Fun('f', [X, Fun('a')]).tostring() == 'f(X, a)'
    assert Atom('g', [X]).tostring() == 'g(X)'
    assert Atom('g', [X], 2).tostring(show_index=True) == 'g(X)^2'
    assert equation(X, Fun('a')).tostring() == 'X = a'
    assert Atom('true').is_builtin
    assert equation(X, X).is_builtin
    assert Atom('g', [X]).is_user


def test_multiset():
    X = Var(1, 'X')
    a, b = Atom('a', [X]), Atom('b', [X])
    assert AtomMultiset([b, a, b]) == AtomMultiset([b, b, a])
    m = AtomMultiset([a, b, b])
    assert m.mdiff([b]) == AtomMultiset([a, b])
    assert m.mdiff([b, b, b]) == AtomMultiset([a])
    assert AtomMultiset([b, b]).issubmultiset(m)
    assert not AtomMultiset([a, a]).issubmultiset(m)
    assert (m + [a]).mdiff([a, a]) == AtomMultiset([b, b])
    a1, a2 = a.with_index(1), a.with_index(2)
    assert AtomMultiset([a1]).intersection([a2]) == AtomMultiset()
    assert AtomMultiset([a1]).intersection([a1, a2]) == AtomMultiset([a1])
    assert AtomMultiset([a1]).mdiff([a2], respect_index=False) == AtomMultiset()
    assert AtomMultiset([a1, a2]).strip() == AtomMultiset([a, a])
    assert AtomMultiset([a, b]).tostring() == '{a(X), b(X)}'


def test_vars():
    goal = parse_goal('g(X, f(Y)), h(Y, Z)')
    names = [v.name for v in ordered_vars(goal.items())]
    assert names == ['X', 'Y', 'Z']
    assert len(free_vars(goal.items())) == 3


def test_substitute_walk():
    X, Y = Var(1, 'X'), Var(2, 'Y')
    s = {X: Y, Y: Fun('a')}
    assert substitute(Fun('f', [X]), s) == Fun('f', [Fun('a')])
    assert substitute(Fun('f', [X]), s, walk=False) == Fun('f', [Y])


def test_supply_keyed():
    s = Supply(seed=3)
    v = s.keyed(1, 2, 3, 4)
    assert Supply(seed=3).keyed(1, 2, 3, 4) == v
    assert Supply(seed=4).keyed(1, 2, 3, 4) != v
    assert s.tag_of(v) == 1
    assert s.tag_of(s.fresh('X')) is None
    with pytest.raises(ValueError, match='out of range'):
        s.keyed(4096, 0, 0, 0)
    with pytest.raises(ValueError, match='non-negative'):
        Supply(seed=-1)


def test_supply_context():
    with Supply(seed=5) as s:
        assert Supply.get() is s
        with Supply(seed=6) as t:
            assert Supply.get() is t
        assert Supply.get() is s
    assert Supply.get() is not s


def test_rename_apart_keyed():
    goal = parse_goal('g(X, Y), h(Y)')
    supply = Supply()
    r1 = rename_apart(goal.items(), supply, key=(0, 1, 0))
    r2 = rename_apart(goal.items(), supply, key=(0, 1, 0))
    r3 = rename_apart(goal.items(), supply, key=(0, 2, 0))
    assert r1 == r2
    assert r1 != r3
    assert [v.name for v in ordered_vars(r1)] == ['X', 'Y']
    assert not free_vars(r1) & free_vars(goal.items())


def test_canonicalize_example():
    g1 = parse_goal('g(X), h(Y)')
    g2 = parse_goal('h(B), g(A)')
    c1 = canonicalize(g1.atoms)
    assert c1 == canonicalize(g2.atoms)
    assert c1.tostring() == '{g(V0), h(V1)}'


def test_canonicalize_fixed_names():
    goal = parse_goal('g(U), h(Z)')
    U = goal.variables()[0]
    c = canonicalize(goal.atoms, fixed=[U], keep_names=True)
    assert c.tostring() == '{g(U), h(_V1)}'
    assert canonicalize(c, fixed=[v for v in c[0].args], keep_names=True) == c


_preds = st.sampled_from(['p', 'q', 'r'])


@st.composite
def atom_lists(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    atoms = []
    for _ in range(n):
        pred = draw(_preds)
        ids = draw(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=2))
        atoms.append((pred, ids))
    return atoms


@given(atom_lists(), st.integers(min_value=1, max_value=1000))
def test_canonicalize_order_preserving_renaming(atoms, shift):
    original = AtomMultiset(Atom(p, [Var(i) for i in ids]) for p, ids in atoms)
    renamed = AtomMultiset(Atom(p, [Var(3 * i + shift) for i in ids]) for p, ids in atoms)
    assert canonicalize(original) == canonicalize(renamed)


@given(atom_lists(), st.permutations([1, 2, 3, 4, 5]))
def test_canonicalize_permuting_renaming(atoms, perm):
    original = AtomMultiset(Atom(p, [Var(i) for i in ids]) for p, ids in atoms)
    renamed = AtomMultiset(Atom(p, [Var(perm[i - 1]) for i in ids]) for p, ids in atoms)
    assert canonicalize(original).tostring() == canonicalize(renamed).tostring()


@given(atom_lists())
def test_canonicalize_idempotent(atoms):
    once = canonicalize(AtomMultiset(Atom(p, [Var(i) for i in ids]) for p, ids in atoms))
    twice = canonicalize(once)
    assert twice == once
    assert twice.tostring() == once.tostring()


def test_canonicalize_symmetric_ties():
    A, B = Var(1, 'A'), Var(2, 'B')

    def atoms(x, y):
        return AtomMultiset([Atom('p', [x]), Atom('p', [y]), Atom('q', [x, y])])

    c = canonicalize(atoms(A, B))
    assert c.tostring() == '{p(V0), p(V1), q(V0, V1)}'
    assert canonicalize(atoms(B, A)).tostring() == c.tostring()
    # aliased variables of a store are tied as well
    store = solve(BuiltinStore.true, [(A, B)])
    value = (store, AtomMultiset([Atom('q', [A, B])]))
    swapped = (store, AtomMultiset([Atom('q', [B, A])]))
    assert _render(canonicalize(value)) == _render(canonicalize(swapped))
    assert _render(canonicalize(value)) == '(V0 = V1, {q(V0, V1)})'


def _terms(variables):
    leaves = st.sampled_from(variables + [Fun('a')])
    return st.recursive(leaves, lambda inner: st.builds(lambda s, t: Fun('f', [s, t]),
                                                        inner, inner), max_leaves=4)


_X, _Y, _Z = Var(1, 'X'), Var(2, 'Y'), Var(3, 'Z')


@given(_terms([_X, _Y, _Z]), st.dictionaries(st.sampled_from([_X, _Y]),
                                               _terms([_Y, _Z]), max_size=2))
def test_apply_idempotent(t, s):
    # no bound variable occurs in the range
    s = {v: u for v, u in s.items() if v not in free_vars(list(s.values()))}
    assert apply(s, apply(s, t)) == apply(s, t)


_atoms = st.builds(lambda p, ids, index: Atom(p, [Var(i) for i in ids], index),
                   _preds, st.lists(st.integers(min_value=1, max_value=3), max_size=2),
                   st.sampled_from([None, 0, 1]))


@given(st.lists(_atoms, max_size=5), st.lists(_atoms, max_size=5))
def test_mdiff_inverts_union(a, b):
    a, b = AtomMultiset(a), AtomMultiset(b)
    assert (a + b).mdiff(b) == a
    assert (a + b).mdiff(b, respect_index=False).strip() == a.strip()
    assert b.issubmultiset(a + b)


@given(st.lists(st.tuples(_preds, st.lists(st.integers(min_value=1, max_value=4),
                                           max_size=3)), min_size=1, max_size=4),
       st.sampled_from([None, (1, 2, 0)]))
def test_rename_apart_fresh(atoms, key):
    supply = Supply(seed=1)
    goal = [Atom(p, [supply.fresh(f'X{i}') for i in ids]) for p, ids in atoms]
    renamed = rename_apart(goal, supply, key=key)
    assert not free_vars(renamed) & free_vars(goal)
    assert len(free_vars(renamed)) == len(free_vars(goal))
    assert [a.signature for a in renamed] == [a.signature for a in goal]
