"""Composition of abstract sequences.

Two sequences for goals G1 and G2 are interleaved into sequences for
the goal ``G1, G2``. Assumptions of one side are then discharged by
stable atoms of the other side, each stable atom being used at most
once.
"""
# Created: October 2026

import warnings
from collections import deque, namedtuple

from .abstraction import AbstractSequence, AbstractTuple, alpha, var_sets_abstract
from .errors import CompositionError, SequenceError, TruncationWarning, UnsupportedError
from .terms import AtomMultiset, atom_key, canonicalize, free_vars
from .theory import atoms_equivalent, implies
from .traces import TraceEngine


class IndexedStableView:
    """Stable atoms of an abstract sequence indexed by the 1-based
    position of the tuple where they first appear.
    """

    def __init__(self, sigma):
        self.sigma = sigma
        views = []
        previous = AtomMultiset()
        acc = AtomMultiset()
        for i, t in enumerate(sigma, 1):
            acc = acc + t.H.mdiff(previous).with_index(i)
            views.append(acc)
            previous = t.H
        self.views = views

    def __getitem__(self, position):
        """Return the indexed stable atoms of the tuple at 1-based position.
        """
        return self.views[position - 1]

    def __len__(self):
        return len(self.views)

    @property
    def final(self):
        return self.views[-1]


def _goal_atoms(goal):
    if hasattr(goal, 'items') and not isinstance(goal, AtomMultiset):
        return AtomMultiset(goal.items())
    return AtomMultiset(goal)


def seq_minus(sigma, W, view=None):
    """Remove indexed stable atoms from every tuple of a sequence.

    Parameters
    ----------
    sigma : AbstractSequence
    W : iterable of Atom
      Atoms indexed by the position of their first appearance.
    view : IndexedStableView
      View of sigma, computed when not given.

    Returns
    -------
    sequence : AbstractSequence
    """
    W = AtomMultiset(W)
    view = view if view is not None else IndexedStableView(sigma)
    if not W.issubmultiset(view.final):
        raise SequenceError(f'{W.tostring(show_index=True)} is not contained in the'
                            f' indexed stable atoms {view.final.tostring(show_index=True)}')
    tuples = [t.replace(H=view[i].mdiff(W).strip()) for i, t in enumerate(sigma, 1)]
    return AbstractSequence(tuples, sigma.goal)


Discharge = namedtuple('Discharge', ['position', 'assumption', 'stable', 'store'])
Discharge.__doc__ = """Assumption at a 1-based tuple position discharged by an indexed
stable atom, the store being the input store of the tuple."""


def discharge(sigma, d, view=None):
    """Apply a single discharge to a sequence.
    """
    view = view if view is not None else IndexedStableView(sigma)
    t = sigma[d.position - 1]
    reduced = sigma.replace(d.position - 1, K=t.K.mdiff([d.assumption]))
    return seq_minus(reduced, [d.stable], view)


def discharges(sigma, view=None):
    """Yield the single discharges applicable to a sequence.
    """
    view = view if view is not None else IndexedStableView(sigma)
    for i, t in enumerate(sigma, 1):
        if not t.K:
            continue
        stable = view[i].distinct()
        for a in t.K.distinct():
            for b in stable:
                if b.signature == a.signature and atoms_equivalent(t.c, a, b.strip()):
                    yield Discharge(i, a, b, t.c)


def _saturate(sigma):
    """Return the closure of one sequence as a mapping to the discharge
    lists reaching each member.
    """
    found = {sigma: ()}
    queue = deque([sigma])
    while queue:
        current = queue.popleft()
        view = IndexedStableView(current)
        for d in discharges(current, view):
            nxt = discharge(current, d, view)
            if nxt not in found:
                found[nxt] = found[current] + (d,)
                queue.append(nxt)
    return found


def eta(S):
    """Return the closure of a set of sequences under discharging
    assumptions by store-equivalent stable atoms.
    """
    result = set()
    for sigma in S:
        if sigma in result:
            continue
        result.update(_saturate(sigma))
    return result


class CompositionCertificate:
    """Record of how a composed sequence was obtained.

    Attributes
    ----------
    sigma1, sigma2 : AbstractSequence
      The composed sequences.
    merged : AbstractSequence
      Their interleaving before discharging assumptions.
    discharges : tuple of Discharge
    result : AbstractSequence
    """

    def __init__(self, sigma1, sigma2, merged, discharges, result):
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self.merged = merged
        self.discharges = tuple(discharges)
        self.result = result

    def verify(self):
        """Replay the discharges and return whether they reach the result.

        Every discharge must relate store-equivalent atoms and use an
        indexed stable atom still available at its position.
        """
        current = self.merged
        for d in self.discharges:
            view = IndexedStableView(current)
            t = current[d.position - 1]
            if d.assumption not in t.K or d.stable not in view[d.position]:
                return False
            if t.c != d.store or not atoms_equivalent(t.c, d.assumption, d.stable.strip()):
                return False
            current = discharge(current, d, view)
        return current == self.result

    def tojson(self):
        return dict(
            sigma1=self.sigma1.tostring(), sigma2=self.sigma2.tostring(),
            merged=self.merged.tostring(),
            discharges=[dict(position=d.position, assumption=d.assumption.tostring(),
                             stable=d.stable.tostring(show_index=True),
                             store=d.store.tostring())
                        for d in self.discharges])


def check_hygiene(sigma1, goal1, sigma2, goal2):
    """Decide whether two sequences use disjoint local variables.
    """
    g1 = free_vars(_goal_atoms(goal1))
    g2 = free_vars(_goal_atoms(goal2))
    loc1 = var_sets_abstract(sigma1, goal1).loc
    loc2 = var_sets_abstract(sigma2, goal2).loc
    return (loc1 | g1) & (loc2 | g2) == g1 & g2


def _prefixable(head, tail, chained):
    first = tail[0]
    if chained and first.c != head.d:
        return False
    return head.H.issubmultiset(first.H) and implies(first.c, head.d)


def interleave(sigma1, goal1, sigma2, goal2, chained=False):
    """Return the interleavings of two sequences.

    The local variables of each sequence must be disjoint from the
    local and goal variables of the other one. The condition is
    checked again on the remaining suffixes at every merging step.

    Parameters
    ----------
    sigma1, sigma2 : AbstractSequence
    goal1, goal2 : Goal or AtomMultiset
    chained : bool
      When True, only interleavings where every input store equals
      the previous output store are returned.

    Returns
    -------
    sequences : set of AbstractSequence
      Members of the domain for the goal ``goal1, goal2``.
    """
    if not check_hygiene(sigma1, goal1, sigma2, goal2):
        raise CompositionError('local variables of the sequences are not disjoint from'
                               ' the variables of the partner goal')
    goal = _goal_atoms(goal1) + _goal_atoms(goal2)
    n1, n2 = len(sigma1), len(sigma2)
    memo = {}

    def merge(a, b):
        key = (a, b)
        if key in memo:
            return memo[key]
        result = memo[key] = []
        if (a or b) and not check_hygiene(suffix(sigma1, a), goal1, suffix(sigma2, b), goal2):
            return result
        t1, t2 = sigma1[a], sigma2[b]
        H = t1.H + t2.H
        if a == n1 - 1 and b == n2 - 1:
            if t1.c == t2.c:
                result.append((AbstractTuple(t1.c, (), H, t1.c),))
        else:
            if a < n1 - 1:
                head = AbstractTuple(t1.c, t1.K, H, t1.d)
                result.extend((head,) + tail for tail in merge(a + 1, b)
                              if _prefixable(head, tail, chained))
            if b < n2 - 1:
                head = AbstractTuple(t2.c, t2.K, H, t2.d)
                result.extend((head,) + tail for tail in merge(a, b + 1)
                              if _prefixable(head, tail, chained))
        return result

    return {AbstractSequence(tuples, goal) for tuples in merge(0, 0)}


def suffix(sigma, start):
    """Return the sequence from the tuple at 0-based position start.
    """
    return AbstractSequence(sigma[start:], sigma.goal)


def _side_conditions(sigma, local):
    if local & var_sets_abstract(sigma).ass:
        return False
    produced = set()
    for t in sigma:
        if not (local & t.c.free_vars()) <= produced | free_vars(t.H):
            return False
        produced |= t.d.free_vars()
    return True


def compose_sets(S1, goal1, S2, goal2, chained=False):
    """Return the composition of two sets of sequences.

    Parameters
    ----------
    S1, S2 : iterable of AbstractSequence
    goal1, goal2 : Goal or AtomMultiset
    chained : bool
      See :func:`interleave`.

    Returns
    -------
    composed : dict
      Maps every composed sequence to a CompositionCertificate.
    """
    by_store = {}
    for sigma2 in S2:
        by_store.setdefault(sigma2.store, []).append(sigma2)
    result = {}
    for sigma1 in S1:
        for sigma2 in by_store.get(sigma1.store, ()):
            if not check_hygiene(sigma1, goal1, sigma2, goal2):
                continue
            local = (var_sets_abstract(sigma1, goal1).loc
                     | var_sets_abstract(sigma2, goal2).loc)
            for merged in interleave(sigma1, goal1, sigma2, goal2, chained=chained):
                for sigma, path in _saturate(merged).items():
                    if sigma in result or not _side_conditions(sigma, local):
                        continue
                    result[sigma] = CompositionCertificate(sigma1, sigma2, merged, path,
                                                           sigma)
    return result


class Report:
    """Comparison of two sets of canonical values.

    A report with differences fails unless it is truncated.
    """

    def __init__(self, lhs, rhs, truncated=False, **extra):
        self.lhs = frozenset(lhs)
        self.rhs = frozenset(rhs)
        self.truncated = truncated
        self.extra = extra

    @property
    def only_lhs(self):
        return self.lhs - self.rhs

    @property
    def only_rhs(self):
        return self.rhs - self.lhs

    @property
    def ok(self):
        return self.truncated or not (self.only_lhs or self.only_rhs)

    def tojson(self):
        def strings(values):
            return sorted(v.tostring() for v in values)
        result = dict(lhs=strings(self.lhs), rhs=strings(self.rhs),
                      only_lhs=strings(self.only_lhs), only_rhs=strings(self.only_rhs),
                      truncated=self.truncated)
        result.update(self.extra)
        return result

    def __repr__(self):
        return (f'{type(self).__name__}(lhs={len(self.lhs)}, rhs={len(self.rhs)},'
                f' only_lhs={len(self.only_lhs)}, only_rhs={len(self.only_rhs)},'
                f' truncated={self.truncated})')


def _harvest(traces):
    stores = set()
    atoms = set()
    for delta in traces:
        for t in delta:
            if not t.d.is_false:
                stores.add(t.d)
            atoms.update(a.strip() for a in t.target if a.is_user)
    return stores, atoms


def _canonical(sigma, goal_vars):
    return canonicalize(sigma, fixed=goal_vars, keep_names=True)


class CompositionalityChecker:
    """Compare the semantics of a conjoined goal with the composition of
    the semantics of its parts.

    Parameters
    ----------
    program : Program
      Simplification rules only.
    depth : int
      Maximal number of tuples of a sequence, the terminal one
      included, so a sequence of depth n covers n - 1 transitions.
    max_rounds : int
      Bound on the rounds exchanging stores and atoms between the
      parts, defaults to ``depth + 1``.
    debug : bool
    """

    def __init__(self, program, depth, max_rounds=None, supply=None, debug=False):
        if not program.is_simplification_only:
            raise UnsupportedError('compositionality is checked for simplification'
                                   ' rules only')
        if depth < 1:
            raise ValueError(f'depth must be at least 1, got {depth}')
        self.program = program
        self.depth = depth
        self.max_rounds = depth + 1 if max_rounds is None else max_rounds
        self.supply = supply
        self.debug = debug

    def joint(self, goal1, goal2):
        """Return the abstraction of the derivations of the conjoined goal.

        Assumptions are drawn from the atoms of both goals, as for the
        parts.
        """
        goal = goal1.conjoin(goal2)
        engine = TraceEngine(self.program, tag=0, supply=self.supply, debug=self.debug)
        return {alpha(delta) for delta in engine.enumerate(goal, self.depth)}

    def parts(self, goal1, goal2):
        """Enumerate both parts, exchanging stores and atoms until no new
        ones appear.

        Returns
        -------
        traces1, traces2 : TraceSet
        converged : bool
        """
        initial = list(goal1.atoms) + list(goal2.atoms)
        stores1, stores2 = set(), set()
        atoms1, atoms2 = set(), set()
        for k in range(self.max_rounds):
            context1 = initial + sorted(atoms2, key=atom_key)
            context2 = initial + sorted(atoms1, key=atom_key)
            engine1 = TraceEngine(self.program, tag=1, context=context1, strengthen=stores2,
                                  supply=self.supply, debug=self.debug)
            engine2 = TraceEngine(self.program, tag=2, context=context2, strengthen=stores1,
                                  supply=self.supply, debug=self.debug)
            traces1 = engine1.enumerate(goal1, self.depth)
            traces2 = engine2.enumerate(goal2, self.depth)
            new_stores1, new_atoms1 = _harvest(traces1)
            new_stores2, new_atoms2 = _harvest(traces2)
            if self.debug:
                print(f'{type(self).__name__}.parts: round {k}: {len(traces1)} and'
                      f' {len(traces2)} sequences, {len(new_stores1 | new_stores2)} stores')
            if (new_stores1 <= stores1 and new_stores2 <= stores2
                    and new_atoms1 <= atoms1 and new_atoms2 <= atoms2):
                return traces1, traces2, True
            stores1 |= new_stores1
            stores2 |= new_stores2
            atoms1 |= new_atoms1
            atoms2 |= new_atoms2
        return traces1, traces2, False

    def check(self, goal1, goal2):
        """Return the comparison report of both semantics.

        Both sides are restricted to sequences starting from the empty
        store whose stores chain, and canonicalized with the goal
        variables kept.
        """
        goal = goal1.conjoin(goal2)
        goal_vars = goal.variables()
        lhs = {_canonical(s, goal_vars) for s in self.joint(goal1, goal2)
               if s.instore.is_true and s.is_chained}
        traces1, traces2, converged = self.parts(goal1, goal2)
        composed = compose_sets({alpha(d) for d in traces1}, goal1,
                                {alpha(d) for d in traces2}, goal2, chained=True)
        rhs = {}
        for sigma, certificate in composed.items():
            if len(sigma) <= self.depth and sigma.instore.is_true:
                rhs.setdefault(_canonical(sigma, goal_vars), certificate)
        if not converged:
            warnings.warn(f'store exchange for {goal1} and {goal2} did not converge in'
                          f' {self.max_rounds} rounds', TruncationWarning, stacklevel=2)
        return Report(lhs, rhs, truncated=not converged, certificates=len(rhs))


def check_compositionality(program, goal1, goal2, depth, max_rounds=None):
    """Compare the semantics of ``goal1, goal2`` with the composition of
    the semantics of goal1 and goal2.

    ``depth`` counts the tuples of a sequence as in
    :class:`CompositionalityChecker`.

    Returns
    -------
    report : Report
    """
    checker = CompositionalityChecker(program, depth, max_rounds=max_rounds)
    return checker.check(goal1, goal2)
