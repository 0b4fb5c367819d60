"""Concrete syntax of CHR programs and goals.

Grammar::

  program  := (rule)*
  rule     := [name "@"] heads ("<=>" | "==>") [guard "|"] body "."
  heads    := atom ("," atom)*
  guard    := builtin ("," builtin)*
  body     := "true" | bodyitem ("," bodyitem)*
  bodyitem := atom | builtin
  builtin  := "true" | "false" | term "=" term
  atom     := ident ["(" term ("," term)* ")"]
  term     := VARIABLE | ident ["(" term ("," term)* ")"]

Comments start with ``%`` and extend to the end of the line.
"""
# Created: October 2026

import re

from .errors import ChrSyntaxError
from .terms import (Var, Fun, Atom, AtomMultiset, Supply, TRUE, equation,
                    iter_vars, substitute)

SIMPLIFICATION = 'simplification'
PROPAGATION = 'propagation'

_arrows = {'<=>': SIMPLIFICATION, '==>': PROPAGATION}

_token_re = re.compile(r'''
    (?P<space>[ \t\r\f]+)
  | (?P<newline>\n)
  | (?P<comment>%[^\n]*)
  | (?P<arrow><=>|==>)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[@|,.()=\\])
''', re.VERBOSE)


class Token(tuple):

    __slots__ = ()

    def __new__(cls, kind, text, line, column):
        return tuple.__new__(cls, (kind, text, line, column))

    kind = property(lambda self: self[0])
    text = property(lambda self: self[1])
    line = property(lambda self: self[2])
    column = property(lambda self: self[3])


def tokenize(text):
    """Return list of tokens, the last one of kind ``eof``.
    """
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _token_re.match(text, pos)
        if m is None:
            raise ChrSyntaxError(f'unexpected character {text[pos]!r}',
                                 line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == 'newline':
            line, line_start = line + 1, m.end()
        elif kind not in ('space', 'comment'):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


class Rule:
    """CHR rule ``name @ head <=> guard | body`` or with ``==>``.
    """

    def __init__(self, name, kind, head, guard=(), body=()):
        self.name = name
        self.kind = kind
        self.head = tuple(head)
        self.guard = tuple(guard)
        self.body = tuple(body)

    @property
    def is_simplification(self):
        return self.kind == SIMPLIFICATION

    def __eq__(self, other):
        if not isinstance(other, Rule):
            return NotImplemented
        return ((self.name, self.kind, self.head, self.guard, self.body)
                == (other.name, other.kind, other.head, other.guard, other.body))

    def __hash__(self):
        return hash((self.name, self.kind, self.head, self.guard, self.body))

    def iter_vars(self):
        yield from iter_vars(self.head)
        yield from iter_vars(self.guard)
        yield from iter_vars(self.body)

    def substitute(self, s, walk=True):
        return Rule(self.name, self.kind, substitute(self.head, s, walk),
                    substitute(self.guard, s, walk), substitute(self.body, s, walk))

    def tostring(self):
        head = ', '.join(a.tostring() for a in self.head)
        arrow = '<=>' if self.is_simplification else '==>'
        guard = ', '.join(a.tostring() for a in self.guard)
        body = ', '.join(a.tostring() for a in self.body) or 'true'
        if guard:
            return f'{self.name} @ {head} {arrow} {guard} | {body}.'
        return f'{self.name} @ {head} {arrow} {body}.'

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


class Program:
    """Ordered collection of CHR rules.
    """

    def __init__(self, rules, text=None):
        self.rules = tuple(rules)
        self.text = text

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return self.rules == other.rules

    def __hash__(self):
        return hash(self.rules)

    @property
    def is_simplification_only(self):
        return all(r.is_simplification for r in self.rules)

    def predicates(self):
        """Return the set of user predicate signatures of the program.
        """
        result = set()
        for rule in self.rules:
            for a in rule.head + rule.body:
                if a.is_user:
                    result.add(a.signature)
        return result

    def functors(self):
        """Return the set of functor signatures of the program.
        """
        result = set()

        def collect(t):
            if isinstance(t, Fun):
                result.add((t.name, len(t.args)))
                for a in t.args:
                    collect(a)

        for rule in self.rules:
            for a in rule.head + rule.guard + rule.body:
                for t in a.args:
                    collect(t)
        return result

    def tostring(self):
        return ''.join(r.tostring() + '\n' for r in self.rules)

    def __str__(self):
        return self.tostring()


class Goal:
    """CHR goal: a multiset of user atoms plus built-in atoms.
    """

    def __init__(self, atoms=(), builtins=()):
        self.atoms = AtomMultiset(atoms)
        self.builtins = tuple(builtins)

    def items(self):
        """Return all goal atoms, user atoms first.
        """
        return tuple(self.atoms) + self.builtins

    def variables(self):
        """Return the goal variables in order of first occurrence.
        """
        return list(dict.fromkeys(iter_vars(self.items())))

    def iter_vars(self):
        return iter_vars(self.items())

    def free_vars(self):
        return set(self.iter_vars())

    def conjoin(self, other):
        return Goal(self.atoms + other.atoms, self.builtins + other.builtins)

    def indexed(self, index=0):
        """Return goal items as an indexed multiset.
        """
        return AtomMultiset(a.with_index(index) for a in self.items())

    def __eq__(self, other):
        if not isinstance(other, Goal):
            return NotImplemented
        return (self.atoms, self.builtins) == (other.atoms, other.builtins)

    def __hash__(self):
        return hash((self.atoms, self.builtins))

    def tostring(self):
        items = self.items()
        if not items:
            return 'true'
        return ', '.join(a.tostring() for a in items)

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


class _Parser:

    def __init__(self, text, supply=None, names=None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.supply = supply if supply is not None else Supply.get()
        self.names = names if names is not None else {}

    def peek(self, offset=0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ChrSyntaxError(message, tok.line, tok.column)

    def expect(self, text):
        tok = self.next()
        if tok.text != text or tok.kind == 'eof':
            found = 'end of input' if tok.kind == 'eof' else repr(tok.text)
            raise self.error(f'expected {text!r}, found {found}', tok)
        return tok

    def at(self, text):
        tok = self.peek()
        return tok.kind != 'eof' and tok.text == text

    def variable(self, name):
        if name == '_':
            return self.supply.fresh('_')
        v = self.names.get(name)
        if v is None:
            v = self.names[name] = self.supply.fresh(name)
        return v

    def term(self):
        tok = self.next()
        if tok.kind == 'var':
            return self.variable(tok.text)
        if tok.kind != 'ident':
            found = 'end of input' if tok.kind == 'eof' else repr(tok.text)
            raise self.error(f'expected a term, found {found}', tok)
        args = []
        if self.at('('):
            self.next()
            args.append(self.term())
            while self.at(','):
                self.next()
                args.append(self.term())
            self.expect(')')
        return Fun(tok.text, args)

    def item(self):
        """Parse an atom or a built-in constraint.
        """
        tok = self.peek()
        t = self.term()
        if self.at('='):
            self.next()
            return equation(t, self.term()), tok
        if isinstance(t, Var):
            raise self.error('a variable cannot be used as a constraint', tok)
        return Atom(t.name, t.args), tok

    def items(self):
        if self.at('.') or self.at('|') or self.peek().kind == 'eof':
            raise self.error('expected a constraint (write `true` for an empty body)')
        result = [self.item()]
        while self.at(','):
            self.next()
            result.append(self.item())
        return result

    def rule(self):
        start = self.peek()
        name = None
        if start.kind == 'ident' and self.peek(1).text == '@':
            name = start.text
            self.pos += 2
        self.names = {}
        head = []
        for atom, tok in self.items():
            if atom.is_builtin:
                raise self.error(f'built-in constraint `{atom}` in rule head', tok)
            head.append(atom)
        tok = self.next()
        if tok.text == '\\':
            raise self.error('simpagation rules are not supported, write them as a'
                             ' propagation rule and a simplification rule', tok)
        if tok.kind != 'arrow':
            raise self.error("expected '<=>' or '==>'", tok)
        kind = _arrows[tok.text]
        items = self.items()
        guard = []
        if self.at('|'):
            self.next()
            for atom, tok in items:
                if atom.is_user:
                    raise self.error(f'user constraint `{atom}` in rule guard', tok)
                if atom != TRUE:
                    guard.append(atom)
            items = self.items()
        self.expect('.')
        body = [atom for atom, tok in items]
        if body == [TRUE]:
            body = []
        return Rule(name, kind, head, guard, body), start

    def program(self):
        rules = []
        while self.peek().kind != 'eof':
            rules.append(self.rule())
        named = []
        seen = {}
        for k, (rule, tok) in enumerate(rules, 1):
            if rule.name is None:
                rule.name = f'r{k}'
            if rule.name in seen:
                raise self.error(f'duplicate rule name {rule.name!r}', tok)
            seen[rule.name] = rule
            named.append(rule)
        return named

    def goal(self):
        items = [atom for atom, tok in self.items()]
        if self.at('.'):
            self.next()
        if self.peek().kind != 'eof':
            raise self.error(f'unexpected {self.peek().text!r}')
        return Goal([a for a in items if a.is_user], [a for a in items if a.is_builtin])

    def formula(self):
        items = [atom for atom, tok in self.items()]
        if self.peek().kind != 'eof':
            raise self.error(f'unexpected {self.peek().text!r}')
        for atom in items:
            if atom.is_user:
                raise self.error(f'user constraint `{atom}` in built-in formula')
        return items


def parse_program(text, supply=None):
    """Parse CHR program text.

    Parameters
    ----------
    text : str
    supply : Supply
      Source of fresh variables, defaults to ``Supply.get()``.

    Returns
    -------
    program : Program
      Rules without explicit names are named ``r<k>`` by position.
    """
    return Program(_Parser(text, supply).program(), text=text)


def parse_goal(text, names=None, supply=None):
    """Parse goal text such as ``g(U), U = a``.

    Parameters
    ----------
    text : str
    names : dict
      Maps variable names to variables. Goals parsed with the same
      dictionary share variables.
    supply : Supply
    """
    return _Parser(text, supply, names).goal()


def parse_formula(text, names=None, supply=None):
    """Parse a conjunction of built-in constraints.
    """
    return _Parser(text, supply, names).formula()


def parse_atoms(texts, names=None, supply=None):
    """Parse a list of atom texts into an AtomMultiset.
    """
    parser_names = names if names is not None else {}
    atoms = []
    for text in texts:
        goal = parse_goal(text, parser_names, supply)
        atoms.extend(goal.items())
    return AtomMultiset(atoms)


def tostring(x):
    """Return the concrete syntax of a program, goal, answer or sequence.
    """
    return x.tostring()
