"""Provides first-order terms, CHR atoms and atom multisets.
"""
# Created: October 2026

import itertools
from collections import Counter


class Term(tuple):
    """Base class of first-order terms.

    Terms are immutable tuples so that they can be hashed, compared
    and used as members of multisets and dictionary keys.
    """

    __slots__ = ()

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


class Var(Term):
    """Logic variable.

    Two variables are equal iff their ids are equal. The display name
    is used for printing only.
    """

    def __new__(cls, id, name=None):
        if not isinstance(id, int):
            raise TypeError(f'variable id must be int, got {type(id).__name__}')
        obj = tuple.__new__(cls, ('var', id))
        obj.name = name
        return obj

    def __getnewargs__(self):
        return (self[1], self.name)

    @property
    def id(self):
        return self[1]

    @property
    def number(self):
        """Return the printing order of a variable.

        Canonical variables have negative ids ``-1 - n`` and are
        ordered by ``n``.
        """
        return -1 - self[1] if self[1] < 0 else self[1]

    def tostring(self):
        if self.name is None:
            return f'_G{self.id}'
        return self.name


class Fun(Term):
    """Compound term ``name(args)``, a constant when args is empty.
    """

    __slots__ = ()

    def __new__(cls, name, args=()):
        return tuple.__new__(cls, ('fun', name, tuple(args)))

    def __getnewargs__(self):
        return (self[1], self[2])

    @property
    def name(self):
        return self[1]

    @property
    def args(self):
        return self[2]

    def tostring(self):
        if not self.args:
            return self.name
        return f'{self.name}({", ".join(a.tostring() for a in self.args)})'


class Atom(tuple):
    """Constraint atom ``pred(args)`` with an optional index.

    Built-in goal items are atoms too: ``=`` with two arguments, and
    ``true`` and ``false`` without arguments. The index records the
    derivation step that introduced the atom into a goal.
    """

    __slots__ = ()

    def __new__(cls, pred, args=(), index=None):
        return tuple.__new__(cls, (pred, tuple(args), index))

    def __getnewargs__(self):
        return tuple(self)

    @property
    def pred(self):
        return self[0]

    @property
    def args(self):
        return self[1]

    @property
    def index(self):
        return self[2]

    @property
    def arity(self):
        return len(self[1])

    @property
    def signature(self):
        return (self[0], len(self[1]))

    @property
    def is_builtin(self):
        return self.signature in _builtin_signatures

    @property
    def is_user(self):
        return not self.is_builtin

    def strip(self):
        """Return atom without index.
        """
        if self.index is None:
            return self
        return Atom(self.pred, self.args)

    def with_index(self, index):
        return Atom(self.pred, self.args, index)

    def equations(self, other):
        """Return argument equations of two atoms with the same signature.
        """
        assert self.signature == other.signature, (self, other)
        return list(zip(self.args, other.args))

    def tostring(self, show_index=False):
        if self.pred == '=' and self.arity == 2:
            s = f'{self.args[0].tostring()} = {self.args[1].tostring()}'
        elif not self.args:
            s = self.pred
        else:
            s = f'{self.pred}({", ".join(a.tostring() for a in self.args)})'
        if show_index and self.index is not None:
            s += f'^{self.index}'
        return s

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring(show_index=True)!r})'


_builtin_signatures = frozenset([('=', 2), ('true', 0), ('false', 0)])

TRUE = Atom('true')
FALSE = Atom('false')


def equation(lhs, rhs):
    """Return the built-in atom ``lhs = rhs``.
    """
    return Atom('=', (lhs, rhs))


def term_key(t):
    """Total order on terms used for sorting multisets.

    Canonical variables sort by their printing order.
    """
    if isinstance(t, Var):
        return (1, t.number, t.id)
    return (0, t.name, len(t.args), tuple(term_key(a) for a in t.args))


def atom_key(a):
    return (a.pred, a.arity, tuple(term_key(t) for t in a.args),
            -1 if a.index is None else a.index)


class AtomMultiset(tuple):
    """Multiset of atoms.

    Elements are kept sorted with duplicates adjacent so that multiset
    equality is tuple equality.
    """

    __slots__ = ()

    def __new__(cls, atoms=()):
        return tuple.__new__(cls, sorted(atoms, key=atom_key))

    def __getnewargs__(self):
        return (tuple(self),)

    def __add__(self, other):
        """Multiset union.
        """
        return AtomMultiset(tuple(self) + tuple(other))

    def mdiff(self, other, respect_index=True):
        """Return multiset difference, saturating at zero.

        Parameters
        ----------
        other : iterable of Atom
          Atoms to remove.
        respect_index : bool
          When True, atoms match only when predicate, arguments and
          index agree. Otherwise indexes are ignored.
        """
        key = _identity if respect_index else Atom.strip
        remove = Counter(key(a) for a in other)
        result = []
        for a in self:
            k = key(a)
            if remove[k] > 0:
                remove[k] -= 1
            else:
                result.append(a)
        return AtomMultiset(result)

    def issubmultiset(self, other, respect_index=True):
        key = _identity if respect_index else Atom.strip
        mine = Counter(key(a) for a in self)
        theirs = Counter(key(a) for a in other)
        return all(theirs[k] >= n for k, n in mine.items())

    def intersection(self, other):
        """Index-respecting multiset intersection.
        """
        theirs = Counter(other)
        result = []
        for a in self:
            if theirs[a] > 0:
                theirs[a] -= 1
                result.append(a)
        return AtomMultiset(result)

    def strip(self):
        return AtomMultiset(a.strip() for a in self)

    def with_index(self, index):
        return AtomMultiset(a.with_index(index) for a in self)

    def user(self):
        return AtomMultiset(a for a in self if a.is_user)

    def builtins(self):
        return AtomMultiset(a for a in self if a.is_builtin)

    def distinct(self):
        """Return the distinct elements in multiset order.
        """
        return list(dict.fromkeys(self))

    def tostring(self, show_index=False):
        return '{' + ', '.join(a.tostring(show_index=show_index) for a in self) + '}'

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring(show_index=True)!r})'


def _identity(a):
    return a


EMPTY = AtomMultiset()


def iter_vars(x):
    """Yield variables of a domain value in left-to-right order,
    duplicates included.
    """
    if isinstance(x, Var):
        yield x
    elif hasattr(x, 'iter_vars'):
        yield from x.iter_vars()
    elif isinstance(x, Fun):
        for a in x.args:
            yield from iter_vars(a)
    elif isinstance(x, Atom):
        for a in x.args:
            yield from iter_vars(a)
    elif isinstance(x, (tuple, list)):
        for item in x:
            yield from iter_vars(item)
    elif x is None or isinstance(x, (str, int)):
        return
    else:
        raise TypeError(f'cannot collect variables of {type(x).__name__}')


def free_vars(x):
    """Return the set of variables occurring in a domain value.
    """
    if isinstance(x, (set, frozenset)):
        result = set()
        for item in x:
            result.update(free_vars(item))
        return result
    if hasattr(x, 'free_vars'):
        return x.free_vars()
    return set(iter_vars(x))


def ordered_vars(x):
    """Return the distinct variables of x in first-occurrence order.
    """
    return list(dict.fromkeys(iter_vars(x)))


def apply(s, t):
    """Apply substitution s to term t.

    Bindings are followed until an unbound variable or a compound
    term is reached, so applying a normalized substitution once is
    the same as applying it twice.
    """
    if isinstance(t, Var):
        u = s.get(t)
        if u is None:
            return t
        return apply(s, u)
    if not t.args:
        return t
    return Fun(t.name, [apply(s, a) for a in t.args])


def rename_term(m, t):
    """Replace variables of t in one pass, without following bindings.
    """
    if isinstance(t, Var):
        return m.get(t, t)
    if not t.args:
        return t
    return Fun(t.name, [rename_term(m, a) for a in t.args])


def substitute(x, s, walk=True):
    """Apply substitution s to any domain value.

    With ``walk=False`` the substitution is a one-pass variable
    renaming, which is required when its range overlaps its domain.
    """
    if isinstance(x, Term):
        return apply(s, x) if walk else rename_term(s, x)
    if isinstance(x, Atom):
        return Atom(x.pred, [substitute(a, s, walk) for a in x.args], x.index)
    if isinstance(x, AtomMultiset):
        return AtomMultiset(substitute(a, s, walk) for a in x)
    if isinstance(x, list):
        return [substitute(item, s, walk) for item in x]
    if type(x) is tuple:
        return tuple(substitute(item, s, walk) for item in x)
    if x is None:
        return x
    return x.substitute(s, walk=walk)


class Supply:
    """Source of fresh variables.

    Sequential ids serve the parser. Keyed ids are computed from a
    ``(tag, position, rule, slot)`` key so that two processes renaming
    the same rule at the same derivation position obtain the same
    variables. The base offset depends on the seed.

    A supply can be activated as a context manager::

      with Supply(seed=3):
          ...
          supply = Supply.get()  # the activated instance
    """

    _instance = None
    _default = None

    radix = 1 << 12

    def __init__(self, seed=0):
        if seed < 0:
            raise ValueError(f'seed must be non-negative, got {seed}')
        self.seed = seed
        self.base = (seed + 1) << 48
        self._counter = itertools.count(1)
        self._parent = None

    def __enter__(self):
        self._parent = type(self)._instance
        type(self)._instance = self
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        type(self)._instance = self._parent
        self._parent = None

    @classmethod
    def get(cls):
        """Return the activated supply or the process default one.
        """
        if cls._instance is not None:
            return cls._instance
        if cls._default is None:
            cls._default = cls()
        return cls._default

    def fresh(self, name=None):
        n = next(self._counter)
        if n >= self.base:
            raise RuntimeError('sequential variable ids exhausted')
        return Var(n, name)

    def keyed_id(self, tag, position, rule, slot):
        r = self.radix
        for value in (tag, position, rule, slot):
            if not 0 <= value < r:
                raise ValueError(f'variable key component out of range: {value}')
        return self.base + ((tag * r + position) * r + rule) * r + slot

    def keyed(self, tag, position, rule, slot, name=None):
        return Var(self.keyed_id(tag, position, rule, slot), name)

    def tag_of(self, var):
        """Return the tag of a keyed variable, None for other variables.
        """
        offset = var.id - self.base
        if 0 <= offset < self.radix ** 4:
            return offset // self.radix ** 3
        return None


def rename_apart(item, supply=None, key=None):
    """Return item with all variables replaced by fresh ones.

    Parameters
    ----------
    item : Rule or sequence of Atom
      Value to rename.
    supply : Supply
      Variable source, defaults to ``Supply.get()``.
    key : tuple
      When given as ``(tag, position, rule)``, keyed variables are
      used with slots numbered by first occurrence.

    Returns
    -------
    renamed : same type as item
    """
    if supply is None:
        supply = Supply.get()
    mapping = {}
    for slot, v in enumerate(ordered_vars(item)):
        if key is None:
            mapping[v] = supply.fresh(v.name)
        else:
            mapping[v] = supply.keyed(*key, slot, name=v.name)
    return substitute(item, mapping, walk=False)


class Numbering:
    """First-occurrence numbering of variables.

    Multisets and stores are visited greedily: the least element
    under the current numbering is visited first. Elements ranked
    equal are picked by :meth:`choose` following a plan, so that
    :func:`canonicalize` can try every way of breaking ties.

    Parameters
    ----------
    fixed : sequence of Var
      Variables numbered first, in the given order.
    plan : list of int
      Option picked at each successive tie, 0 past its end.
    """

    def __init__(self, fixed=(), plan=()):
        self.order = {}
        self.plan = list(plan)
        self.path = []
        for v in fixed:
            self.add(v)

    def add(self, v):
        if v not in self.order:
            self.order[v] = len(self.order)

    def choose(self, options):
        """Return the option of the current tie selected by the plan.
        """
        if len(options) == 1:
            return options[0]
        k = len(self.path)
        i = self.plan[k] if k < len(self.plan) else 0
        self.path.append((i, len(options)))
        return options[i]

    def next_plan(self):
        """Return the plan of the next branch to visit, None when all
        branches were visited.
        """
        path = list(self.path)
        while path and path[-1][0] + 1 >= path[-1][1]:
            path.pop()
        if not path:
            return None
        return [i for i, _ in path[:-1]] + [path[-1][0] + 1]

    def shape(self, x):
        """Return sort key of a term or atom.

        Numbered variables contribute their number, other variables
        their first-occurrence ordinal inside x.
        """
        local = {}

        def key(t):
            if isinstance(t, Var):
                n = self.order.get(t)
                if n is not None:
                    return (1, 0, n)
                return (1, 1, local.setdefault(t, len(local)))
            return (0, t.name, len(t.args), tuple(key(a) for a in t.args))

        if isinstance(x, Atom):
            return (x.pred, x.arity, tuple(key(a) for a in x.args),
                    -1 if x.index is None else x.index)
        return key(x)

    def term(self, t):
        for v in iter_vars(t):
            self.add(v)

    def members(self, variables):
        """Number variables whose relative order is not determined.
        """
        pending = [v for v in variables if v not in self.order]
        while pending:
            v = self.choose(pending)
            pending.remove(v)
            self.add(v)

    def atoms(self, atoms):
        pending = list(atoms)
        while pending:
            keys = [self.shape(a) for a in pending]
            least = min(keys)
            tied = list(dict.fromkeys(a for a, k in zip(pending, keys) if k == least))
            a = self.choose(tied)
            pending.remove(a)
            self.term(a)

    def visit(self, x):
        if hasattr(x, '_canonical_visit'):
            x._canonical_visit(self)
        elif isinstance(x, (Term, Atom)):
            self.term(x)
        elif isinstance(x, AtomMultiset):
            self.atoms(x)
        elif isinstance(x, (tuple, list)):
            for item in x:
                self.visit(item)
        else:
            raise TypeError(f'cannot canonicalize {type(x).__name__}')


def _render(x):
    if isinstance(x, (AtomMultiset, Atom)):
        return x.tostring(show_index=True)
    if type(x) in (tuple, list):
        return '(' + ', '.join(_render(item) for item in x) + ')'
    return x.tostring()


def canonicalize(x, fixed=(), keep_names=False):
    """Rename variables of x by first occurrence.

    Ties between elements that rank equal are broken by trying every
    choice and keeping the renaming with the least printed form.

    Parameters
    ----------
    x : domain value
      Typically an AbstractSequence, an Answer or a store.
    fixed : sequence of Var
      Variables numbered first, in the given order.
    keep_names : bool
      When True, fixed variables keep their display names and other
      variables are named ``_V<n>``. Otherwise all are named ``V<n>``.

    Returns
    -------
    canonical : same type as x
      Alpha-equivalent inputs give identical outputs. Canonical
      variables have negative ids and never clash with supplied ones.
    """
    fixed = list(fixed)
    fixed_set = set(fixed)
    best = None
    plan = []
    while plan is not None:
        numbering = Numbering(fixed, plan)
        numbering.visit(x)
        mapping = {}
        for v, n in numbering.order.items():
            if keep_names and v in fixed_set:
                name = v.name
            elif keep_names:
                name = f'_V{n}'
            else:
                name = f'V{n}'
            mapping[v] = Var(-1 - n, name)
        result = substitute(x, mapping, walk=False)
        key = _render(result)
        if best is None or key < best[0]:
            best = (key, result)
        plan = numbering.next_plan()
    return best[1]
