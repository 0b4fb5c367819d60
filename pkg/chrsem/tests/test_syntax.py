import pytest
from hypothesis import given, strategies as st

from chrsem.errors import ChrSyntaxError
from chrsem.syntax import parse_program, parse_goal, parse_formula, parse_atoms, tokenize
from chrsem.tests import GH


def test_tokenize():
    kinds = [t.kind for t in tokenize('gh @ g(X) <=> true. % done\n')]
    assert kinds == ['ident', 'punct', 'ident', 'punct', 'var', 'punct', 'arrow', 'ident',
                     'punct', 'eof']
    with pytest.raises(ChrSyntaxError, match=r"line 1, column 3: unexpected character '#'"):
        tokenize('g(#)')


def test_parse_rule():
    program = parse_program(GH)
    assert len(program) == 1
    rule = program.rules[0]
    assert rule.name == 'gh'
    assert rule.is_simplification
    assert [a.tostring() for a in rule.head] == ['g(X)', 'h(Y)']
    assert rule.guard == ()
    assert [a.tostring() for a in rule.body] == ['X = Y']
    assert program.tostring() == 'gh @ g(X), h(Y) <=> X = Y.\n'
    assert program.is_simplification_only
    assert program.predicates() == {('g', 1), ('h', 1)}


def test_parse_guard_and_names():
    program = parse_program('''
    % guarded rules
    set(X) <=> X = a.
    check(Y) <=> Y = a | true.
    p(X) ==> q(f(X, b)).
    ''')
    names = [r.name for r in program]
    assert names == ['r1', 'r2', 'r3']
    check = program.rules[1]
    assert [a.tostring() for a in check.guard] == ['Y = a']
    assert check.body == ()
    assert check.tostring() == 'r2 @ check(Y) <=> Y = a | true.'
    assert not program.is_simplification_only
    assert program.functors() == {('a', 0), ('b', 0), ('f', 2)}


def test_parse_round_trip():
    text = parse_program(GH).tostring()
    assert parse_program(text).tostring() == text


@pytest.mark.parametrize('text, message', [
    ('a(X) \\ b(X) <=> true.', 'simpagation rules are not supported'),
    ('X = a <=> true.', 'built-in constraint `X = a` in rule head'),
    ('a(X) <=> b(X) | true.', 'user constraint `b\\(X\\)` in rule guard'),
    ('a(X) <=> X.', 'a variable cannot be used as a constraint'),
    ('a(X) <=> .', 'expected a constraint'),
    ('r @ a(X) <=> true. r @ b(X) <=> true.', "duplicate rule name 'r'"),
    ('a(X) <=> true', "expected '.'"),
    ('a(X), b(X) true.', "expected '<=>' or '==>'"),
])
def test_parse_errors(text, message):
    with pytest.raises(ChrSyntaxError, match=message):
        parse_program(text)


def test_error_position():
    with pytest.raises(ChrSyntaxError) as info:
        parse_program('a(X) <=> true.\nb(X) \\ c(X) <=> true.')
    assert (info.value.line, info.value.column) == (2, 6)
    assert str(info.value).startswith('line 2, column 6: ')


def test_parse_goal():
    names = {}
    goal = parse_goal('g(U), U = a, h(V)', names)
    assert [a.tostring() for a in goal.atoms] == ['g(U)', 'h(V)']
    assert [a.tostring() for a in goal.builtins] == ['U = a']
    assert [v.name for v in goal.variables()] == ['U', 'V']
    other = parse_goal('k(U)', names)
    assert other.variables()[0] == names['U']
    assert goal.conjoin(other).tostring() == 'g(U), h(V), k(U), U = a'
    assert parse_goal('true').tostring() == 'true'
    assert parse_goal('false').builtins[0].tostring() == 'false'
    with pytest.raises(ChrSyntaxError, match='unexpected'):
        parse_goal('g(U) h(V)')


def test_parse_formula_and_atoms():
    names = {}
    formula = parse_formula('X = f(Y), true', names)
    assert [a.tostring() for a in formula] == ['X = f(Y)', 'true']
    with pytest.raises(ChrSyntaxError, match='user constraint'):
        parse_formula('g(X)', names)
    atoms = parse_atoms(['h(Y)', 'g(X)'], names)
    assert atoms.tostring() == '{g(X), h(Y)}'
    assert atoms[0].args[0] == names['X']


_term_texts = st.recursive(st.sampled_from(['X', 'Y', 'Z', 'a', 'b']),
                           lambda inner: st.builds(lambda s, t: f'f({s}, {t})', inner, inner),
                           max_leaves=3)
_user_texts = st.builds(lambda p, args: f'{p}({", ".join(args)})', st.sampled_from(['p', 'q']),
                        st.lists(_term_texts, min_size=1, max_size=2))
_equation_texts = st.builds(lambda s, t: f'{s} = {t}', _term_texts, _term_texts)


@st.composite
def rule_texts(draw):
    head = draw(st.lists(_user_texts, min_size=1, max_size=3))
    guard = draw(st.lists(_equation_texts, max_size=2))
    body = draw(st.lists(st.one_of(_user_texts, _equation_texts), max_size=3))
    arrow = draw(st.sampled_from(['<=>', '==>']))
    text = f'{", ".join(head)} {arrow} '
    if guard:
        text += f'{", ".join(guard)} | '
    return text + (', '.join(body) or 'true') + '.'


@given(st.lists(rule_texts(), min_size=1, max_size=3))
def test_parse_print_round_trip(rules):
    program = parse_program('\n'.join(rules))
    text = program.tostring()
    again = parse_program(text)
    assert again.tostring() == text
    assert len(again) == len(rules)
    for rule in again:
        assert all(a.is_user for a in rule.head)
        assert all(a.is_builtin for a in rule.guard)
