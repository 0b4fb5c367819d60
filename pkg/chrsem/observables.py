"""Observables recovered from the compositional semantics.

Connected sequences are the abstract sequences that describe actual
computations: they make no assumptions, every input store is the
previous output store, and they end with an empty goal or a failure.
"""
# Created: October 2026

from .abstraction import alpha
from .composition import Report
from .errors import UnsupportedError
from .standard import AnswerSet, StandardEngine, StdConfig, make_answer
from .terms import AtomMultiset, EMPTY, canonicalize, ordered_vars
from .theory import equivalent
from .traces import TraceEngine


class ConnectedFlag:
    """Result of :func:`is_connected`.

    ``clause`` is the number of the first violated condition: 1 when
    the sequence makes assumptions, 2 when stores are not chained and
    3 when the final goal is not empty and the final store is
    consistent.
    """

    def __init__(self, connected, clause=None):
        self.connected = connected
        self.clause = clause

    def __bool__(self):
        return self.connected

    def __eq__(self, other):
        if isinstance(other, bool):
            return self.connected == other
        if not isinstance(other, ConnectedFlag):
            return NotImplemented
        return (self.connected, self.clause) == (other.connected, other.clause)

    def __hash__(self):
        return hash((self.connected, self.clause))

    def __repr__(self):
        if self.connected:
            return f'{type(self).__name__}(True)'
        return f'{type(self).__name__}(False, clause={self.clause})'


def is_connected(sigma):
    if any(t.K for t in sigma):
        return ConnectedFlag(False, 1)
    for a, b in zip(sigma, sigma[1:]):
        if not equivalent(a.d, b.c):
            return ConnectedFlag(False, 2)
    last = sigma[-1]
    if last.H and not last.c.is_false:
        return ConnectedFlag(False, 3)
    return ConnectedFlag(True)


def sa_from_traces(program, goal, depth):
    """Return the data sufficient answers of a goal computed from the
    connected sequences of its semantics that start from the empty
    store.

    Parameters
    ----------
    program : Program
      Simplification rules only.
    goal : Goal
    depth : int
      Maximal number of tuples of a sequence, the terminal one
      included. Standard derivations of :func:`matched_depth`
      transitions give the same answers.

    Returns
    -------
    answers : AnswerSet
    """
    engine = TraceEngine(program, assumptions=False)
    traces = engine.enumerate(goal, depth)
    goal_vars = goal.variables()
    answers = set()
    for delta in traces:
        sigma = alpha(delta)
        if sigma.instore.is_true and is_connected(sigma):
            answers.add(make_answer(goal_vars, EMPTY, sigma.store))
    return AnswerSet(answers, traces.truncated)


def matched_depth(program, goal, depth):
    """Return the number of standard transitions covering sequences of
    the given length.

    Every step of a sequence is one Solve or Simplify transition
    preceded by the Introduce transitions of the atoms it rewrites.
    """
    body = max((sum(1 for a in r.body if a.is_user) for r in program.rules), default=0)
    return max(1, (depth - 1) * (1 + body) + len(goal.atoms))


def check_correctness(program, goal, depth, std_depth=None, jobs=1):
    """Compare data sufficient answers of the standard transition system
    with those recovered from the compositional semantics.

    Parameters
    ----------
    program : Program
      Simplification rules only.
    goal : Goal
    depth : int
      Maximal number of tuples of a sequence, the terminal one
      included. Unlike ``std_depth`` it does not count transitions.
    std_depth : int
      Maximal number of standard transitions, defaults to
      :func:`matched_depth`.
    jobs : int

    Returns
    -------
    report : Report
      ``lhs`` holds the standard answers, ``rhs`` the recovered ones.
    """
    if not program.is_simplification_only:
        raise UnsupportedError('correctness is checked for simplification rules only')
    if std_depth is None:
        std_depth = matched_depth(program, goal, depth)
    lhs = StandardEngine(program).answers(goal, std_depth, jobs=jobs)
    rhs = sa_from_traces(program, goal, depth)
    return Report(lhs.answers, rhs.answers, truncated=lhs.truncated or rhs.truncated)


def _key(atoms, store, goal_vars):
    atoms = AtomMultiset(a.strip() for a in atoms)
    return canonicalize((atoms, store), fixed=goal_vars)


def replay(program, delta, debug=False):
    """Drive the standard transition system along a derivation.

    Parameters
    ----------
    program : Program
    delta : ConcreteSequence
      Assumption free derivation whose stores chain, starting from
      the empty store.

    Returns
    -------
    derivation : list of StdConfig
      Standard derivation visiting the configurations of delta, with
      Introduce transitions inserted, or None when there is none.
    """
    if not delta.is_assumption_free or not delta.is_chained or not delta.instore.is_true:
        return None
    engine = StandardEngine(program, debug=debug)
    goal_vars = ordered_vars(delta.goal)
    path = [StdConfig(a.strip() for a in delta.goal)]
    for t in delta[:-1]:
        while any(a.is_user for a in path[-1].goal):
            for label, cfg in engine.transitions(path[-1], len(path) - 1):
                if label[0] == 'introduce':
                    path.append(cfg)
                    break
        target = _key(t.target, t.d, goal_vars)
        for label, cfg in engine.transitions(path[-1], len(path) - 1):
            if label[0] in ('solve', 'simplify'):
                if _key(tuple(cfg.goal) + tuple(cfg.atoms), cfg.store, goal_vars) == target:
                    path.append(cfg)
                    break
        else:
            return None
    return path

