"""Herbrand equality theory: built-in stores and their judgments.

A built-in store is either inconsistent or a normalized solved form.
In every class of aliased variables the representative is the
variable with the smallest id; the other members map to it. When the
class is bound to a compound term, every member maps to that term.
Hence two consistent stores are equal iff they are equivalent.
"""
# Created: October 2026

from .terms import Var, Atom, apply, iter_vars, rename_term


class BuiltinStore:
    """Built-in constraint store.

    Use :data:`BuiltinStore.true` and :data:`BuiltinStore.false`, or
    :func:`solve`, rather than calling the constructor with bindings.
    """

    true = None
    false = None

    def __init__(self, bindings=None, consistent=True):
        if not consistent:
            self.bindings = None
            self._key = None
        else:
            self.bindings = _normalize(bindings or {})
            self._key = tuple(sorted(self.bindings.items(), key=lambda kv: kv[0].id))

    @property
    def is_false(self):
        return self.bindings is None

    @property
    def is_true(self):
        return self.bindings is not None and not self.bindings

    def __eq__(self, other):
        if not isinstance(other, BuiltinStore):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __getstate__(self):
        return (self.bindings, self._key)

    def __setstate__(self, state):
        self.bindings, self._key = state

    def equations(self):
        """Return the solved form as a list of ``(var, term)`` pairs.
        """
        if self.bindings is None:
            return []
        return list(self._key)

    def iter_vars(self):
        for v, t in self.equations():
            yield v
            yield from iter_vars(t)

    def free_vars(self):
        return set(self.iter_vars())

    def substitute(self, s, walk=True):
        if self.is_false:
            return self
        if walk:
            return solve(BuiltinStore.true, [(apply(s, v), apply(s, t))
                                             for v, t in self.equations()])
        return solve(BuiltinStore.true, [(rename_term(s, v), rename_term(s, t))
                                         for v, t in self.equations()])

    def classes(self):
        """Return the variable classes of the store.

        Returns
        -------
        classes : list of (members, term)
          members is a list of variables, term is the compound term
          the class is bound to or None.
        """
        groups = {}
        for v, t in self.equations():
            if isinstance(t, Var):
                groups.setdefault(t, [t]).append(v)
            else:
                groups.setdefault(('term', t), []).append(v)
        result = []
        for key, members in groups.items():
            term = None if isinstance(key, Var) else key[1]
            result.append((members, term))
        return result

    def _canonical_visit(self, numbering):
        pending = self.classes()
        while pending:
            def class_key(members, term):
                nums = sorted(numbering.order[m] for m in members if m in numbering.order)
                shape = () if term is None else numbering.shape(term)
                return (not nums, tuple(nums), len(members), term is not None, shape)
            keys = [class_key(*item) for item in pending]
            least = min(keys)
            members, term = numbering.choose([item for item, k in zip(pending, keys)
                                              if k == least])
            pending.remove((members, term))
            numbering.members(members)
            if term is not None:
                numbering.term(term)

    def tostring(self):
        if self.is_false:
            return 'false'
        if not self.bindings:
            return 'true'
        pairs = sorted(self.bindings.items(), key=lambda kv: kv[0].number)
        return ', '.join(f'{v.tostring()} = {t.tostring()}' for v, t in pairs)

    def __str__(self):
        return self.tostring()

    def __repr__(self):
        return f'{type(self).__name__}({self.tostring()!r})'


def _normalize(bindings):
    resolved = {}
    for v, t in bindings.items():
        t = apply(bindings, t)
        if t != v:
            resolved[v] = t
    classes = {}
    for v, t in resolved.items():
        if isinstance(t, Var):
            classes.setdefault(t, {t}).add(v)
    rename = {}
    for members in classes.values():
        rep = min(members, key=lambda u: u.id)
        for m in members:
            if m != rep:
                rename[m] = rep
    result = dict(rename)
    for v, t in resolved.items():
        if not isinstance(t, Var):
            result[v] = rename_term(rename, t)
    return result


BuiltinStore.true = BuiltinStore()
BuiltinStore.false = BuiltinStore(consistent=False)


class _Inconsistent(Exception):
    pass


def _equations(formula):
    """Return list of term pairs from atoms or pairs, raise on false.
    """
    result = []
    for item in formula:
        if isinstance(item, Atom):
            if item.signature == ('true', 0):
                continue
            if item.signature == ('false', 0):
                raise _Inconsistent
            if item.signature != ('=', 2):
                raise ValueError(f'not a built-in constraint: {item}')
            result.append(tuple(item.args))
        else:
            lhs, rhs = item
            result.append((lhs, rhs))
    return result


def _walk(s, t):
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _occurs(s, v, t):
    return any(u == v for u in iter_vars(apply(s, t)))


def solve(d, formula):
    """Conjoin a built-in formula to a store.

    Parameters
    ----------
    d : BuiltinStore
    formula : iterable
      Built-in atoms (``=``, ``true``, ``false``) or ``(lhs, rhs)``
      term pairs.

    Returns
    -------
    store : BuiltinStore
      Solved form equivalent to ``formula /\\ d``, or
      ``BuiltinStore.false`` when the conjunction is unsatisfiable.
    """
    if d.is_false:
        return d
    try:
        stack = _equations(formula)
    except _Inconsistent:
        return BuiltinStore.false
    bindings = dict(d.bindings)
    while stack:
        lhs, rhs = stack.pop()
        lhs = _walk(bindings, lhs)
        rhs = _walk(bindings, rhs)
        if lhs == rhs:
            continue
        if isinstance(lhs, Var) or isinstance(rhs, Var):
            v, t = (lhs, rhs) if isinstance(lhs, Var) else (rhs, lhs)
            if _occurs(bindings, v, t):
                return BuiltinStore.false
            bindings[v] = t
        elif lhs.name != rhs.name or len(lhs.args) != len(rhs.args):
            return BuiltinStore.false
        else:
            stack.extend(zip(lhs.args, rhs.args))
    return BuiltinStore(bindings)


def entails_exists(d, x, eqs, guard=()):
    """Decide ``CT |= d -> exists x (eqs /\\ guard)`` by matching.

    Variables outside ``x`` are rigid: after applying the solved form
    of ``d`` they behave as distinct constants.

    Parameters
    ----------
    d : BuiltinStore
    x : set of Var
      Existential variables, disjoint from the variables of d.
    eqs : iterable
      Head equations as term pairs or built-in atoms.
    guard : iterable
      Guard built-in atoms.

    Returns
    -------
    result : (bool, dict)
      Whether the entailment holds and, if so, the witness binding
      for the variables of x it needed.
    """
    if d.is_false:
        return True, {}
    try:
        pending = _equations(list(eqs) + list(guard))
    except _Inconsistent:
        return False, None
    x = set(x)
    pending = [(apply(d.bindings, lhs), apply(d.bindings, rhs)) for lhs, rhs in pending]
    rho = {}
    while pending:
        lhs, rhs = pending.pop()
        lhs = _walk(rho, lhs)
        rhs = _walk(rho, rhs)
        if lhs == rhs:
            continue
        if isinstance(lhs, Var) and lhs in x:
            v, t = lhs, rhs
        elif isinstance(rhs, Var) and rhs in x:
            v, t = rhs, lhs
        elif isinstance(lhs, Var) or isinstance(rhs, Var):
            return False, None
        elif lhs.name != rhs.name or len(lhs.args) != len(rhs.args):
            return False, None
        else:
            pending.extend(zip(lhs.args, rhs.args))
            continue
        if _occurs(rho, v, t):
            return False, None
        rho[v] = t
    return True, {v: apply(rho, v) for v in rho}


def project(d, keep):
    """Return ``exists_{-keep} d`` as a store.

    Kept variables of an aliased class are tied to the kept member with
    the smallest id. Auxiliary variables survive only inside the terms
    kept variables are bound to.
    """
    if d.is_false:
        return d
    keep = set(keep)
    chosen = {}
    new = {}
    classes = d.classes()
    bound = set()
    for members, term in classes:
        bound.update(members)
    for v in keep - bound:
        classes.append(([v], None))
    for members, term in classes:
        kept = [m for m in members if m in keep]
        if term is None:
            rep = next(m for m in members if m not in d.bindings)
            if kept:
                chosen[rep] = min(kept, key=lambda m: m.id)
    for members, term in classes:
        kept = [m for m in members if m in keep]
        if not kept:
            continue
        if term is None:
            target = min(kept, key=lambda m: m.id)
            for m in kept:
                if m != target:
                    new[m] = target
        else:
            term = rename_term(chosen, term)
            for m in kept:
                new[m] = term
    return BuiltinStore(new)


def is_false(d):
    return d.is_false


def implies(c1, c2):
    """Decide ``CT |= c1 -> c2``.
    """
    if c1.is_false:
        return True
    if c2.is_false:
        return False
    ok, _ = entails_exists(c1, (), c2.equations())
    return ok


def equivalent(c1, c2):
    return implies(c1, c2) and implies(c2, c1)


def atoms_equivalent(c, a, b):
    """Decide ``CT |= c /\\ a <-> c /\\ b`` for user atoms a and b.
    """
    if c.is_false:
        return True
    if a.signature != b.signature:
        return False
    ok, _ = entails_exists(c, (), a.equations(b))
    return ok

