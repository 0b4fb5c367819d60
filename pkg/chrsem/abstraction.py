"""Abstract sequences and the abstraction of derivations.

An abstract sequence is a list of ``<c, K, H, d>`` tuples: input
store, assumptions, stable atoms and output store. The stable atoms
of a step are the goal atoms that are never rewritten in the rest of
the derivation. Indexes are removed by the abstraction.
"""
# Created: October 2026

from .errors import SequenceError
from .terms import AtomMultiset, EMPTY, free_vars, iter_vars, substitute
from .theory import BuiltinStore, implies
from .traces import ConcreteSequence, ConcreteStep, VarSets


class AbstractTuple(tuple):
    """Tuple ``<c, K, H, d>``.
    """

    __slots__ = ()

    def __new__(cls, c, K=EMPTY, H=EMPTY, d=None):
        return tuple.__new__(cls, (c, AtomMultiset(K), AtomMultiset(H), c if d is None else d))

    def __getnewargs__(self):
        return tuple(self)

    c = property(lambda self: self[0])
    K = property(lambda self: self[1])
    H = property(lambda self: self[2])
    d = property(lambda self: self[3])

    def iter_vars(self):
        yield from self.c.iter_vars()
        yield from iter_vars(self.K)
        yield from iter_vars(self.H)
        yield from self.d.iter_vars()

    def substitute(self, s, walk=True):
        return AbstractTuple(self.c.substitute(s, walk), substitute(self.K, s, walk),
                             substitute(self.H, s, walk), self.d.substitute(s, walk))

    def _canonical_visit(self, numbering):
        self.c._canonical_visit(numbering)
        numbering.atoms(self.K)
        numbering.atoms(self.H)
        self.d._canonical_visit(numbering)

    def replace(self, **kws):
        fields = dict(c=self.c, K=self.K, H=self.H, d=self.d)
        fields.update(kws)
        return AbstractTuple(**fields)

    def tostring(self):
        return f'<{self.c}, {self.K}, {self.H}, {self.d}>'

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


class AbstractSequence(tuple):
    """Non-empty sequence of abstract tuples.

    The goal the sequence describes is kept in the ``goal`` attribute
    as a multiset of non-indexed atoms. It takes no part in equality.
    """

    def __new__(cls, tuples, goal=EMPTY):
        obj = tuple.__new__(cls, tuples)
        obj.goal = AtomMultiset(goal)
        return obj

    def __reduce__(self):
        return (type(self), (tuple(self), self.goal))

    @property
    def instore(self):
        return self[0].c

    @property
    def store(self):
        return self[-1].d

    @property
    def is_chained(self):
        return all(b.c == a.d for a, b in zip(self, self[1:]))

    def iter_vars(self):
        for t in self:
            yield from t.iter_vars()

    def free_vars(self):
        return set(self.iter_vars())

    def substitute(self, s, walk=True):
        return AbstractSequence([t.substitute(s, walk) for t in self],
                                substitute(self.goal, s, walk))

    def _canonical_visit(self, numbering):
        for t in self:
            t._canonical_visit(numbering)

    def replace(self, position, **kws):
        """Return copy with the tuple at 0-based position modified.
        """
        tuples = list(self)
        tuples[position] = tuples[position].replace(**kws)
        return AbstractSequence(tuples, self.goal)

    def validate(self):
        """Raise SequenceError when the sequence is not in the domain.

        The error message names the offending tuple by its 1-based
        position.
        """
        if not self:
            raise SequenceError('empty sequence')
        last = self[-1]
        if last.K or last.c != last.d:
            raise SequenceError(f'tuple {len(self)}: last tuple must have no assumptions'
                                ' and equal stores')
        for i, t in enumerate(self, 1):
            if not implies(t.d, t.c):
                raise SequenceError(f'tuple {i}: output store does not imply input store')
        for i, (a, b) in enumerate(zip(self, self[1:]), 1):
            if not a.H.issubmultiset(b.H):
                raise SequenceError(f'tuple {i + 1}: stable atoms of tuple {i} are'
                                    ' not kept')
            if not implies(b.c, a.d):
                raise SequenceError(f'tuple {i + 1}: input store does not imply the'
                                    f' output store of tuple {i}')
        return self

    def is_valid(self):
        try:
            self.validate()
        except SequenceError:
            return False
        return True

    def tostring(self):
        return ' '.join(t.tostring() for t in self)

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


def stable_sets(delta):
    """Return for each step the indexed atoms of its goal that are
    stable in the rest of the derivation.
    """
    result = []
    acc = None
    for t in reversed(delta):
        acc = t.goal if acc is None else t.goal.intersection(acc)
        result.append(acc)
    return result[::-1]


def stable_atoms(delta):
    """Return the indexed atoms occurring in every goal of delta.
    """
    return stable_sets(delta)[0]


def alpha(delta):
    """Return the abstraction of a concrete sequence.
    """
    tuples = [AbstractTuple(t.c, t.K, H.strip(), t.d)
              for t, H in zip(delta, stable_sets(delta))]
    return AbstractSequence(tuples, delta.goal.strip())


def _goal_vars(goal):
    if goal is None:
        return set()
    return free_vars(goal)


def var_sets_abstract(sigma, goal=None):
    """Return the assumption, stable, constraint and local variables
    of an abstract sequence.

    Parameters
    ----------
    sigma : AbstractSequence
    goal : Goal or AtomMultiset
      Goal of sigma, defaults to ``sigma.goal``.
    """
    if goal is None:
        goal = sigma.goal
    ass = set()
    constr = set()
    for t in sigma[:-1]:
        ass |= free_vars(t.K)
        constr |= t.d.free_vars() - t.c.free_vars()
    stable = free_vars(sigma[-1].H)
    loc = (constr | stable) - (ass | _goal_vars(goal))
    return VarSets(ass, stable, constr, loc)


def instore(gamma):
    return gamma[0].c


def store(gamma):
    return gamma[-1].d


def seq_plus(delta, W):
    """Return delta with the indexed atoms W added to every goal.
    """
    W = AtomMultiset(W)
    return ConcreteSequence([ConcreteStep(t.goal + W, t.c, t.K, t.target + W, t.d)
                             for t in delta])


def seq_drop(delta, W):
    """Return delta with the stable indexed atoms W removed from every goal.
    """
    W = AtomMultiset(W)
    if not W.issubmultiset(stable_atoms(delta)):
        raise SequenceError(f'atoms {W.tostring(show_index=True)} are not stable')
    return ConcreteSequence([ConcreteStep(t.goal.mdiff(W), t.c, t.K, t.target.mdiff(W), t.d)
                             for t in delta])


def terminal_sequence(c=BuiltinStore.true, H=EMPTY, goal=None):
    """Return the length 1 sequence ``<c, {}, H, c>``.
    """
    return AbstractSequence([AbstractTuple(c, EMPTY, H, c)], H if goal is None else goal)
