# Workbench for the compositional semantics of Constraint Handling Rules.
from .syntax import parse_program, parse_goal  # noqa: F401
from .standard import StandardEngine, data_sufficient_answers, qualified_answers  # noqa: F401
from .traces import TraceEngine, enumerate_sprime  # noqa: F401
from .abstraction import alpha  # noqa: F401
from .composition import eta, interleave, compose_sets, check_compositionality  # noqa: F401
from .observables import is_connected, sa_from_traces, check_correctness  # noqa: F401

__version__ = '0.1.0'
