"""JSON persistence of abstract sequences.

A trace file holds::

  {
    "version": 1,
    "program": "<program text>",
    "goal": "<goal text>",
    "depth": <int>,
    "sequences": [[{"in_store": ..., "assumptions": [...],
                    "stable": [...], "out_store": ...}, ...], ...],
    "certificates": [...]
  }

Stores and atoms are written in concrete syntax after canonicalizing
every sequence with the goal variables kept. Keys are sorted and lines
end with LF so that equal contents give identical files.
"""
# Created: October 2026

import json
import re

from .abstraction import AbstractSequence, AbstractTuple
from .errors import ChrSyntaxError, SequenceError, TraceFileError
from .syntax import Goal, parse_atoms, parse_formula, parse_goal, parse_program
from .terms import AtomMultiset, Var, canonicalize, substitute
from .theory import BuiltinStore, solve

VERSION = 1

_tuple_keys = ('in_store', 'assumptions', 'stable', 'out_store')

_canonical_name = re.compile(r'_V(\d+)\Z')


class TraceFile:
    """Contents of a trace file.

    Parameters
    ----------
    program : Program
    goal : Goal
    depth : int
    sequences : iterable of AbstractSequence
      Sequences of goal, canonicalized when written.
    certificates : list of dict
      Optional composition certificates in JSON form.
    canonical : bool
      Whether the sequences are canonical already, as after loading.
    """

    def __init__(self, program, goal, depth, sequences, certificates=None, canonical=False):
        self.program = program
        self.goal = goal
        self.depth = depth
        self.sequences = list(sequences)
        self.certificates = certificates
        self.canonical = canonical

    def canonical_sequences(self):
        if self.canonical:
            result = set(self.sequences)
        else:
            goal_vars = self.goal.variables()
            result = {canonicalize(s, fixed=goal_vars, keep_names=True)
                      for s in self.sequences}
        return sorted(result, key=AbstractSequence.tostring)

    def tojson(self):
        program_text = self.program.text if self.program.text is not None else str(self.program)
        data = dict(version=VERSION, program=program_text, goal=self.goal.tostring(),
                    depth=self.depth,
                    sequences=[[_tuple_json(t) for t in s] for s in self.canonical_sequences()])
        if self.certificates is not None:
            data['certificates'] = self.certificates
        return data

    def dumps(self):
        return json.dumps(self.tojson(), sort_keys=True, indent=2, ensure_ascii=False) + '\n'

    def save(self, path):
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(self.dumps())

    @classmethod
    def fromjson(cls, data, names=None):
        """Return trace file contents from decoded JSON.

        Parameters
        ----------
        data : dict
        names : dict
          Variable names of the goal. Files loaded with the same
          dictionary share goal variables. Without it, variables get
          the ids canonicalization gave them when the file was saved.

        Raises
        ------
        TraceFileError
          When the data is malformed or a sequence is not in the domain.
        """
        if not isinstance(data, dict):
            raise TraceFileError('trace file must contain a JSON object')
        version = data.get('version')
        if version != VERSION:
            raise TraceFileError(f'unsupported trace file version {version!r},'
                                 f' expected {VERSION}')
        for key, kind in (('program', str), ('goal', str), ('depth', int),
                          ('sequences', list)):
            if not isinstance(data.get(key), kind):
                raise TraceFileError(f'missing or invalid field {key!r}')
        canonical = names is None
        names = {} if names is None else names
        try:
            program = parse_program(data['program'])
            goal = parse_goal(data['goal'], names)
        except ChrSyntaxError as exc:
            raise TraceFileError(f'cannot parse trace file header: {exc}') from exc
        fixed = {}
        if canonical:
            fixed = {v: Var(-1 - n, v.name) for n, v in enumerate(goal.variables())}
            goal = Goal(substitute(goal.atoms, fixed, walk=False),
                        substitute(goal.builtins, fixed, walk=False))
        goal_atoms = AtomMultiset(goal.items())
        sequences = []
        for k, item in enumerate(data['sequences'], 1):
            if not isinstance(item, list) or not item:
                raise TraceFileError(f'sequence {k}: expected a non-empty list of tuples')
            local = dict(names)
            tuples = []
            for i, t in enumerate(item, 1):
                try:
                    tuples.append(_tuple_fromjson(t, local))
                except (ChrSyntaxError, TypeError, KeyError) as exc:
                    raise TraceFileError(f'sequence {k}, tuple {i}: {exc}') from exc
            sigma = AbstractSequence(tuples, goal_atoms)
            try:
                if canonical:
                    sigma = sigma.substitute(_canonical_ids(local, fixed), walk=False)
                sigma.validate()
            except (TypeError, SequenceError) as exc:
                raise TraceFileError(f'sequence {k}: {exc}') from exc
            sequences.append(sigma)
        return cls(program, goal, data['depth'], sequences, data.get('certificates'),
                   canonical=canonical)

    @classmethod
    def load(cls, path, names=None):
        try:
            with open(path, encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise TraceFileError(f'{path}: invalid JSON: {exc}') from exc
        return cls.fromjson(data, names)


def _tuple_json(t):
    return dict(in_store=t.c.tostring(), assumptions=[a.tostring() for a in t.K],
                stable=[a.tostring() for a in t.H], out_store=t.d.tostring())


def _canonical_ids(names, fixed):
    """Return the renaming of parsed variables to canonical ids.

    Raises TypeError for a variable that is neither a goal variable
    nor named ``_V<n>``.
    """
    mapping = {}
    for name, v in names.items():
        if v in fixed:
            mapping[v] = fixed[v]
            continue
        m = _canonical_name.match(name)
        if m is None:
            raise TypeError(f'variable {name} is neither a goal variable nor canonical')
        mapping[v] = Var(-1 - int(m.group(1)), name)
    return mapping


def _store(text, names):
    return solve(BuiltinStore.true, parse_formula(text, names))


def _tuple_fromjson(t, names):
    if not isinstance(t, dict) or set(t) != set(_tuple_keys):
        raise TypeError(f'expected an object with keys {", ".join(_tuple_keys)}')
    return AbstractTuple(_store(t['in_store'], names), parse_atoms(t['assumptions'], names),
                         parse_atoms(t['stable'], names), _store(t['out_store'], names))


def save_traces(path, tracefile):
    tracefile.save(path)


def load_traces(path, names=None):
    return TraceFile.load(path, names)
