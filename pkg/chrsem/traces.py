"""Transition system with assumptions and its bounded fixpoint.

A configuration is a pair of an indexed goal and a built-in store.
Atoms of the initial goal are indexed by 0, body atoms of a rule
applied to a goal whose maximal index is ``i`` are indexed by
``i + 1``. A Simplify step may fire a rule on a part of its head and
assume the remaining head atoms; the assumed atoms label the step.

Derivations are represented by concrete sequences of
``<G, c, K, G', d>`` steps closed by a terminal step ``<G, c, {}, G, c>``.
"""
# Created: October 2026

import itertools
from collections import namedtuple

from .errors import SequenceError, UnsupportedError
from .terms import AtomMultiset, EMPTY, Supply, free_vars, iter_vars, rename_apart
from .theory import BuiltinStore, entails_exists, implies, solve


class CompConfig(tuple):
    """Configuration ``<G, c>`` of the transition system with assumptions.
    """

    __slots__ = ()

    def __new__(cls, goal, store=BuiltinStore.true):
        return tuple.__new__(cls, (AtomMultiset(goal), store))

    def __getnewargs__(self):
        return tuple(self)

    goal = property(lambda self: self[0])
    store = property(lambda self: self[1])

    def tostring(self):
        return f'<{self.goal.tostring(show_index=True)}, {self.store.tostring()}>'

    def __str__(self):
        return self.tostring()


class ConcreteStep(tuple):
    """Derivation step ``<G, c> --K--> <G', d>``.
    """

    __slots__ = ()

    def __new__(cls, goal, instore, assumptions, target, outstore):
        return tuple.__new__(cls, (AtomMultiset(goal), instore, AtomMultiset(assumptions),
                                   AtomMultiset(target), outstore))

    def __getnewargs__(self):
        return tuple(self)

    goal = property(lambda self: self[0])
    c = property(lambda self: self[1])
    K = property(lambda self: self[2])
    target = property(lambda self: self[3])
    d = property(lambda self: self[4])

    @classmethod
    def terminal(cls, goal, store):
        return cls(goal, store, EMPTY, goal, store)

    @property
    def is_terminal(self):
        return not self.K and self.goal == self.target and self.c == self.d

    @property
    def config(self):
        return CompConfig(self.target, self.d)

    def iter_vars(self):
        yield from iter_vars(self.goal)
        yield from self.c.iter_vars()
        yield from iter_vars(self.K)
        yield from iter_vars(self.target)
        yield from self.d.iter_vars()

    def free_vars(self):
        return set(self.iter_vars())

    def tostring(self):
        return (f'<{self.goal.tostring(show_index=True)}, {self.c}, {self.K},'
                f' {self.target.tostring(show_index=True)}, {self.d}>')

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


class ConcreteSequence(tuple):
    """Non-empty sequence of derivation steps ending with a terminal step.
    """

    __slots__ = ()

    def __new__(cls, steps):
        return tuple.__new__(cls, steps)

    def __getnewargs__(self):
        return (tuple(self),)

    @property
    def goal(self):
        return self[0].goal

    @property
    def instore(self):
        return self[0].c

    @property
    def store(self):
        return self[-1].d

    @property
    def is_chained(self):
        """Whether every input store equals the previous output store.
        """
        return all(b.c == a.d for a, b in zip(self, self[1:]))

    @property
    def is_assumption_free(self):
        return all(not t.K for t in self)

    def iter_vars(self):
        for t in self:
            yield from t.iter_vars()

    def free_vars(self):
        return set(self.iter_vars())

    def validate(self):
        """Raise SequenceError when the sequence is not a derivation.
        """
        if not self:
            raise SequenceError('empty sequence')
        if not self[-1].is_terminal:
            raise SequenceError(f'last step {len(self)} is not terminal')
        for i, t in enumerate(self[:-1], 1):
            if t.c.is_false:
                raise SequenceError(f'step {i} starts from an inconsistent store')
            nxt = self[i]
            if t.target != nxt.goal:
                raise SequenceError(f'output goal of step {i} is not the input goal'
                                    f' of step {i + 1}')
            if not implies(nxt.c, t.d):
                raise SequenceError(f'input store of step {i + 1} does not imply the'
                                    f' output store of step {i}')
        return self

    def tostring(self):
        return ''.join(t.tostring() for t in self)

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


VarSets = namedtuple('VarSets', ['ass', 'stable', 'constr', 'loc'])


def local_vars_step(t):
    """Return ``Fv(G', d) minus Fv(G, c, K)`` of a step.
    """
    return (free_vars(t.target) | t.d.free_vars()) - (
        free_vars(t.goal) | t.c.free_vars() | free_vars(t.K))


def var_sets_concrete(delta):
    """Return the assumption, stable, constraint and local variables
    of a concrete sequence.
    """
    steps = delta[:-1]
    ass = set()
    constr = set()
    loc = set()
    for t in steps:
        ass |= free_vars(t.K)
        constr |= t.d.free_vars() - t.c.free_vars()
        loc |= local_vars_step(t)
    return VarSets(ass, free_vars(delta[-1].goal), constr, loc)


def inc(delta):
    """Return the input stores of a sequence.
    """
    return [t.c for t in delta]


def is_compatible(t, delta):
    """Decide whether step t may prefix the derivation delta.

    Parameters
    ----------
    t : ConcreteStep
    delta : ConcreteSequence
      Derivation of the output goal of t.
    """
    if not implies(delta[0].c, t.d):
        return False
    vs = var_sets_concrete(delta)
    if vs.loc & t.free_vars():
        return False
    loc_t = local_vars_step(t)
    if not loc_t:
        return True
    if loc_t & vs.ass:
        return False
    produced = t.d.free_vars()
    for u in delta:
        if not (loc_t & u.c.free_vars()) <= produced | vs.stable:
            return False
        produced = produced | u.d.free_vars()
    return True


class TraceSet(frozenset):
    """Set of concrete sequences with a truncation flag.
    """

    def __new__(cls, sequences=(), truncated=False):
        obj = frozenset.__new__(cls, sequences)
        obj.truncated = truncated
        return obj


class TraceEngine:
    """Enumerator of bounded derivations with assumptions.

    Parameters
    ----------
    program : Program
      Simplification rules only.
    tag : int
      Tag of the keyed variables used to rename rules apart. Engines
      for the two halves of a goal use different tags.
    context : iterable of Atom
      Atoms an assumed head atom may be instantiated to, in addition
      to the current goal atoms not matched by the step. Defaults to
      the atoms of the enumerated goal, or to the goal of the
      configuration when :meth:`comp_step` is called before any
      enumeration.
    strengthen : iterable of BuiltinStore
      Stores that may replace an output store as the next input store.
    assumptions : bool
      When False, rules fire only on full head matches.
    supply : Supply
    debug : bool
    """

    def __init__(self, program, tag=0, context=None, strengthen=(), assumptions=True,
                 supply=None, debug=False):
        if not program.is_simplification_only:
            names = [r.name for r in program.rules if not r.is_simplification]
            raise UnsupportedError(f'propagation rules are not supported by'
                                   f' {type(self).__name__}: {", ".join(names)}')
        self.program = program
        self.tag = tag
        self.context = None if context is None else _distinct_user(context)
        self.strengthen = [s for s in dict.fromkeys(strengthen) if not s.is_false]
        self.assumptions = assumptions
        self.supply = supply if supply is not None else Supply.get()
        self.debug = debug
        self._cache = {}
        self._initial = None
        self._truncated = False

    def comp_step(self, cfg, position=1):
        """Return all steps from a configuration.

        Parameters
        ----------
        cfg : CompConfig
        position : int
          Position of the step in its sequence, part of the renaming key.

        Returns
        -------
        steps : list of ConcreteStep
        """
        goal, c = cfg.goal, cfg.store
        if c.is_false:
            return []
        result = {}
        for item in goal.distinct():
            if item.is_builtin:
                t = ConcreteStep(goal, c, EMPTY, goal.mdiff([item]), solve(c, [item]))
                result[t] = None
        for r, rule in enumerate(self.program.rules):
            for t in self._simplify_steps(goal, c, position, r, rule):
                result[t] = None
        if self.debug:
            for t in result:
                print(f'{type(self).__name__}.comp_step: {t}')
        return list(result)

    def _simplify_steps(self, goal, c, position, r, rule):
        users = [a for a in goal if a.is_user]
        sigs = {a.signature for a in users}
        if not any(h.signature in sigs for h in rule.head):
            return
        renamed = rename_apart(rule, self.supply, key=(self.tag, position, r))
        head = renamed.head
        x = free_vars(head) | free_vars(renamed.guard)
        top = max((a.index or 0 for a in users), default=0)
        body = AtomMultiset(a.with_index(top + 1) for a in renamed.body)
        context = self._context(goal)
        by_signature = {}
        for j, a in enumerate(users):
            by_signature.setdefault(a.signature, []).append(j)
        m = len(head)
        sizes = [m] if not self.assumptions else range(m, 0, -1)
        seen = set()
        for k in sizes:
            for positions in itertools.combinations(range(m), k):
                pools = [by_signature.get(head[p].signature, ()) for p in positions]
                for chosen in itertools.product(*pools):
                    if len(set(chosen)) < k:
                        continue
                    matched = tuple(users[j] for j in chosen)
                    if (positions, matched) in seen:
                        continue
                    seen.add((positions, matched))
                    eqs = []
                    for p, a in zip(positions, matched):
                        eqs.extend(head[p].equations(a))
                    rest = goal.mdiff(matched)
                    unmatched = [head[p] for p in range(m) if p not in positions]
                    candidates = _distinct_user(a.strip() for a in rest if a.is_user)
                    candidates = list(dict.fromkeys(candidates + context))
                    options = [[h] + [a for a in candidates if a.signature == h.signature]
                               for h in unmatched]
                    for assumed in itertools.product(*options):
                        aeqs = list(eqs)
                        for h, a in zip(unmatched, assumed):
                            if a != h:
                                aeqs.extend(h.equations(a))
                        ok, _ = entails_exists(c, x, aeqs, renamed.guard)
                        if not ok:
                            continue
                        yield ConcreteStep(goal, c, AtomMultiset(assumed), rest + body,
                                           solve(c, aeqs))

    def _context(self, goal):
        if self.context is not None:
            return self.context
        if self._initial is not None:
            return self._initial
        return _distinct_user(goal)

    def _admissible(self, s, goal, d):
        own = {v for v in s.free_vars() if self.supply.tag_of(v) == self.tag}
        return own <= free_vars(goal) | d.free_vars()

    def next_stores(self, goal, d):
        """Return the candidate input stores following an output store.
        """
        if d.is_false:
            return [d]
        result = [d]
        for s in self.strengthen:
            if s != d and implies(s, d) and self._admissible(s, goal, d):
                result.append(s)
        return result

    def initial_stores(self, goal):
        return self.next_stores(goal, BuiltinStore.true)

    def sequences(self, goal, store, position, remaining):
        """Return derivations of ``<goal, store>`` with at most remaining steps.

        Parameters
        ----------
        goal : AtomMultiset
          Indexed goal.
        store : BuiltinStore
          Input store of the first step.
        position : int
          Position of the first step.
        remaining : int
          Maximal sequence length.

        Returns
        -------
        sequences : frozenset of ConcreteSequence
        """
        key = (goal, store, position, remaining)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = {ConcreteSequence([ConcreteStep.terminal(goal, store)])}
        if not store.is_false:
            steps = self.comp_step(CompConfig(goal, store), position)
            if remaining <= 1:
                if steps:
                    self._truncated = True
            else:
                for t in steps:
                    for c in self.next_stores(t.target, t.d):
                        for tail in self.sequences(t.target, c, position + 1,
                                                   remaining - 1):
                            if is_compatible(t, tail):
                                result.add(ConcreteSequence((t,) + tuple(tail)))
        result = frozenset(result)
        self._cache[key] = result
        return result

    def enumerate(self, goal, depth):
        """Return the derivations of a goal with at most depth steps.

        Unless the engine was given a context, an assumed head atom
        may be instantiated to any atom of the enumerated goal, also
        after that atom was rewritten.

        Parameters
        ----------
        goal : Goal
        depth : int
          Maximal number of tuples of a sequence, terminal step
          included, so depth 1 gives terminal steps only. Depths of
          :class:`chrsem.standard.StandardEngine` count transitions
          instead, see :func:`chrsem.observables.matched_depth`.

        Returns
        -------
        sequences : TraceSet
          The ``truncated`` attribute tells whether some derivation
          was cut at the depth limit.
        """
        if depth < 1:
            raise ValueError(f'depth must be at least 1, got {depth}')
        indexed = goal.indexed(0)
        self._truncated = False
        self._cache.clear()
        self._initial = _distinct_user(indexed)
        result = set()
        for c in self.initial_stores(indexed):
            result.update(self.sequences(indexed, c, 1, depth))
        return TraceSet(result, self._truncated)


def _distinct_user(atoms):
    return list(dict.fromkeys(a.strip() for a in atoms if a.is_user))


def comp_step(cfg, program, position=1, context=None, tag=0):
    """Return the successors of a configuration as ``(K, CompConfig)`` pairs.
    """
    engine = TraceEngine(program, tag=tag, context=context)
    return {(t.K, t.config) for t in engine.comp_step(cfg, position)}


def enumerate_sprime(program, goal, depth, strengthen=(), context=None, tag=0):
    """Return the bounded derivations of a goal.

    The depth bounds the number of tuples of a sequence, terminal
    step included. See :meth:`TraceEngine.enumerate`.
    """
    engine = TraceEngine(program, tag=tag, context=context, strengthen=strengthen)
    return engine.enumerate(goal, depth)
