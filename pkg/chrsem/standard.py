"""Standard transition system of CHR.

Configurations are ``<G, K, d>`` triples. The four transitions are:

- Solve: a built-in constraint of the goal is conjoined to d;
- Introduce: a user constraint moves from the goal to the CHR store K;
- Simplify: matched head atoms are replaced by the rule body;
- Propagate: the rule body is added and the matched atoms are kept.

A propagation rule fires at most once for every multiset of CHR store
atom identities unless the engine is created with ``naive=True``.
"""
# Created: October 2026

import itertools
import warnings

from .errors import TruncationWarning
from .terms import (AtomMultiset, EMPTY, Supply, canonicalize,
                    free_vars, iter_vars, rename_apart, substitute)
from .theory import BuiltinStore, entails_exists, project, solve
from .utils import parallel_map

# Tag of keyed variables created by the standard engine.
STANDARD_TAG = 3


class Answer:
    """Answer of a goal: remaining user atoms and a built-in store.

    Data sufficient answers have no user atoms.
    """

    false = None

    def __init__(self, atoms=EMPTY, store=BuiltinStore.true):
        self.atoms = AtomMultiset(atoms)
        self.store = store

    @property
    def is_false(self):
        return self.store.is_false

    def __eq__(self, other):
        if not isinstance(other, Answer):
            return NotImplemented
        return (self.atoms, self.store) == (other.atoms, other.store)

    def __hash__(self):
        return hash((self.atoms, self.store))

    def iter_vars(self):
        yield from iter_vars(self.atoms)
        yield from self.store.iter_vars()

    def substitute(self, s, walk=True):
        return Answer(substitute(self.atoms, s, walk), self.store.substitute(s, walk))

    def _canonical_visit(self, numbering):
        numbering.atoms(self.atoms)
        self.store._canonical_visit(numbering)

    def tostring(self):
        if self.store.is_false:
            return 'false'
        items = [a.tostring() for a in self.atoms]
        if not self.store.is_true:
            items.append(self.store.tostring())
        return ', '.join(items) or 'true'

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


Answer.false = Answer(EMPTY, BuiltinStore.false)


def make_answer(goal_vars, atoms, store):
    """Return the canonical answer ``exists_{-goal_vars} (atoms /\\ store)``.

    Parameters
    ----------
    goal_vars : sequence of Var
      Goal variables in order of first occurrence. They keep their
      names, other variables print as ``_V<n>``.
    atoms : AtomMultiset
      Remaining user atoms, empty for data sufficient answers.
    store : BuiltinStore
    """
    if store.is_false:
        return Answer.false
    atoms = substitute(AtomMultiset(a.strip() for a in atoms), store.bindings)
    keep = set(goal_vars) | free_vars(atoms)
    answer = Answer(atoms, project(store, keep))
    return canonicalize(answer, fixed=goal_vars, keep_names=True)


class AnswerSet:
    """Set of canonical answers.

    Two answer sets are equal when they contain the same answers,
    regardless of truncation.
    """

    def __init__(self, answers=(), truncated=False):
        self.answers = frozenset(answers)
        self.truncated = truncated

    def __iter__(self):
        return iter(sorted(self.answers, key=Answer.tostring))

    def __len__(self):
        return len(self.answers)

    def __contains__(self, answer):
        return answer in self.answers

    def __eq__(self, other):
        if not isinstance(other, AnswerSet):
            return NotImplemented
        return self.answers == other.answers

    def __hash__(self):
        return hash(self.answers)

    def __or__(self, other):
        return AnswerSet(self.answers | other.answers, self.truncated or other.truncated)

    def tostrings(self):
        return sorted(a.tostring() for a in self.answers)

    def __repr__(self):
        extra = ', truncated=True' if self.truncated else ''
        return f'{type(self).__name__}({self.tostrings()!r}{extra})'


class StdConfig(tuple):
    """Configuration ``<G, K, d>`` of the standard transition system.

    The CHR store holds ``(ident, atom)`` pairs, identities are
    assigned by Introduce in increasing order. ``fired`` records the
    propagation history.
    """

    __slots__ = ()

    def __new__(cls, goal, chr_store=(), store=BuiltinStore.true, fired=frozenset(),
                next_ident=0):
        return tuple.__new__(cls, (AtomMultiset(goal), tuple(chr_store), store,
                                   frozenset(fired), next_ident))

    def __getnewargs__(self):
        return tuple(self)

    goal = property(lambda self: self[0])
    chr_store = property(lambda self: self[1])
    store = property(lambda self: self[2])
    fired = property(lambda self: self[3])
    next_ident = property(lambda self: self[4])

    @property
    def atoms(self):
        """CHR store as a multiset of atoms.
        """
        return AtomMultiset(a for _, a in self.chr_store)

    @property
    def is_failed(self):
        return self.store.is_false

    def iter_vars(self):
        yield from iter_vars(self.goal)
        yield from iter_vars(self.atoms)
        yield from self.store.iter_vars()

    def tostring(self):
        return (f'<{self.goal.tostring()}, {self.atoms.tostring()},'
                f' {self.store.tostring()}>')

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


def initial_config(goal):
    """Return ``<G, {}, true>`` for a goal.
    """
    return StdConfig(AtomMultiset(goal.items()))


def _remove(chr_store, entries):
    drop = {ident for ident, _ in entries}
    return tuple(e for e in chr_store if e[0] not in drop)


class StandardEngine:
    """Interpreter of the standard transition system.

    Parameters
    ----------
    program : Program
    naive : bool
      When True, propagation rules may fire repeatedly on the same
      CHR store atoms.
    supply : Supply
      Source of keyed variables used to rename rules apart.
    debug : bool
      Print transitions.
    """

    def __init__(self, program, naive=False, supply=None, debug=False):
        self.program = program
        self.naive = naive
        self.supply = supply if supply is not None else Supply.get()
        self.debug = debug

    def transitions(self, cfg, level=0):
        """Return labelled successors of a configuration.

        Parameters
        ----------
        cfg : StdConfig
        level : int
          Transition count of cfg, part of the renaming key.

        Returns
        -------
        transitions : list of (label, StdConfig)
          Labels are ``('solve', atom)``, ``('introduce', atom)``,
          ``('simplify', rule_name)`` and ``('propagate', rule_name)``.
        """
        if cfg.is_failed:
            return []
        result = []
        for item in cfg.goal.distinct():
            rest = cfg.goal.mdiff([item])
            if item.is_builtin:
                store = solve(cfg.store, [item])
                result.append((('solve', item),
                               StdConfig(rest, cfg.chr_store, store, cfg.fired,
                                         cfg.next_ident)))
            else:
                chr_store = cfg.chr_store + ((cfg.next_ident, item),)
                result.append((('introduce', item),
                               StdConfig(rest, chr_store, cfg.store, cfg.fired,
                                         cfg.next_ident + 1)))
        for r, rule in enumerate(self.program.rules):
            result.extend(self._rule_transitions(cfg, level, r, rule))
        if self.debug:
            for label, succ in result:
                print(f'{type(self).__name__}.transitions: {cfg} --{label[0]}'
                      f' {label[1]}--> {succ}')
        return result

    def _rule_transitions(self, cfg, level, r, rule):
        head = list(rule.head)
        if len(head) > len(cfg.chr_store):
            return []
        renamed = rename_apart(rule, self.supply, key=(STANDARD_TAG, level, r))
        head = list(renamed.head)
        x = free_vars(renamed.head) | free_vars(renamed.guard)
        result = []
        seen = set()
        for entries in itertools.permutations(cfg.chr_store, len(head)):
            if any(h.signature != a.signature for h, (_, a) in zip(head, entries)):
                continue
            match_key = tuple(ident for ident, _ in entries)
            if match_key in seen:
                continue
            seen.add(match_key)
            history_key = (r, tuple(sorted(match_key)))
            if not rule.is_simplification and not self.naive and history_key in cfg.fired:
                continue
            eqs = []
            for h, (_, a) in zip(head, entries):
                eqs.extend(h.equations(a))
            ok, _ = entails_exists(cfg.store, x, eqs, renamed.guard)
            if not ok:
                continue
            store = solve(cfg.store, eqs)
            goal = cfg.goal + AtomMultiset(renamed.body)
            if rule.is_simplification:
                result.append((('simplify', rule.name),
                               StdConfig(goal, _remove(cfg.chr_store, entries), store,
                                         cfg.fired, cfg.next_ident)))
            else:
                fired = cfg.fired if self.naive else cfg.fired | {history_key}
                result.append((('propagate', rule.name),
                               StdConfig(goal, cfg.chr_store, store, fired,
                                         cfg.next_ident)))
        return result

    def step(self, cfg, level=0):
        """Return the set of successors of a configuration.
        """
        return {succ for _, succ in self.transitions(cfg, level)}

    def explore(self, configs, depth, level=0):
        """Breadth-first exploration of the transition relation.

        Parameters
        ----------
        configs : iterable of StdConfig
          Configurations at transition count ``level``.
        depth : int
          Maximal number of further transitions.

        Returns
        -------
        terminals : list of StdConfig
          Configurations without successors, in exploration order.
        truncated : bool
          Whether some configuration at the depth limit has successors.
        """
        frontier = dict.fromkeys(configs)
        terminals = {}
        truncated = False
        for k in range(depth + 1):
            following = {}
            for cfg in frontier:
                succ = self.transitions(cfg, level + k)
                if not succ:
                    terminals[cfg] = None
                elif k == depth:
                    truncated = True
                else:
                    following.update(dict.fromkeys(s for _, s in succ))
            frontier = following
        return list(terminals), truncated

    def _terminals(self, goal, depth, jobs=1):
        if depth < 1:
            raise ValueError(f'depth must be at least 1, got {depth}')
        start = initial_config(goal)
        if jobs <= 1:
            return self.explore([start], depth)
        first = list(dict.fromkeys(s for _, s in self.transitions(start, 0)))
        if not first:
            return [start], False
        tasks = [(self.program, cfg, depth - 1, self.naive, self.supply.seed)
                 for cfg in first]
        terminals = {}
        truncated = False
        for found, trunc in parallel_map(_explore_task, tasks, jobs):
            terminals.update(dict.fromkeys(found))
            truncated = truncated or trunc
        return list(terminals), truncated

    def answers(self, goal, depth, qualified=False, jobs=1):
        """Return data sufficient or qualified answers of a goal.

        Parameters
        ----------
        goal : Goal
        depth : int
          Maximal number of transitions, at least 1.
        qualified : bool
          When True, terminal configurations with a non-empty CHR
          store contribute answers that include the store atoms.
        jobs : int
          Number of worker processes for the first derivation level.

        Returns
        -------
        answers : AnswerSet
        """
        terminals, truncated = self._terminals(goal, depth, jobs=jobs)
        goal_vars = goal.variables()
        answers = set()
        for cfg in terminals:
            if cfg.is_failed:
                answers.add(Answer.false)
            elif not cfg.goal and (qualified or not cfg.chr_store):
                answers.add(make_answer(goal_vars, cfg.atoms, cfg.store))
        if truncated:
            warnings.warn(f'derivations of {goal} truncated at depth {depth}',
                          TruncationWarning, stacklevel=2)
        return AnswerSet(answers, truncated)

    def derivations(self, goal, depth):
        """Return all maximal derivations of a goal up to depth.

        A derivation is a list of configurations starting with the
        initial one. Derivations cut at the depth limit are included.
        """
        if depth < 1:
            raise ValueError(f'depth must be at least 1, got {depth}')
        result = []
        stack = [[initial_config(goal)]]
        while stack:
            path = stack.pop()
            succ = [] if len(path) > depth else self.transitions(path[-1], len(path) - 1)
            if not succ:
                result.append(path)
                continue
            for _, cfg in reversed(succ):
                stack.append(path + [cfg])
        return result


def _explore_task(args):
    program, cfg, depth, naive, seed = args
    with Supply(seed) as supply:
        engine = StandardEngine(program, naive=naive, supply=supply)
        return engine.explore([cfg], depth, level=1)


def std_step(cfg, program, level=0, naive=False):
    """Return the set of successors of a standard configuration.
    """
    return StandardEngine(program, naive=naive).step(cfg, level)


def data_sufficient_answers(program, goal, depth, naive=False, jobs=1):
    """Return data sufficient answers of a goal.

    Answers are the goal-variable projections of the stores of
    successful terminal configurations (empty goal and empty CHR
    store), plus ``false`` when some derivation fails.
    """
    return StandardEngine(program, naive=naive).answers(goal, depth, jobs=jobs)


def qualified_answers(program, goal, depth, naive=False, jobs=1):
    """Return qualified answers of a goal.
    """
    return StandardEngine(program, naive=naive).answers(goal, depth, qualified=True,
                                                        jobs=jobs)


def std_derivations(program, goal, depth, naive=False):
    return StandardEngine(program, naive=naive).derivations(goal, depth)


def config_key(cfg, goal_vars=()):
    """Return a canonical ``(atoms, store)`` pair of a configuration.

    Used to compare standard configurations with trace configurations
    regardless of CHR store identities and variable names.
    """
    atoms = AtomMultiset(a.strip() for a in tuple(cfg.goal) + tuple(cfg.atoms))
    return canonicalize((atoms, cfg.store), fixed=goal_vars)
