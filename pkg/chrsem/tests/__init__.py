__all__ = ['corpus_program', 'corpus_entries', 'gh_program']


import os
import pytest

from chrsem.syntax import parse_program
from chrsem.utils import default_corpus_dir

GH = 'gh @ g(X), h(Y) <=> true | X = Y.\n'


def corpus_program(name):
    """Return a parsed program of the bundled corpus.

    Usage from a chrsem/tests/test_xyz.py file:

    .. code-block:: python

       import pytest
       from chrsem.tests import corpus_program

       @pytest.fixture(scope='module')
       def prodcons():
           return corpus_program('prodcons')
    """
    fn = os.path.join(default_corpus_dir(), f'{name}.chr')
    if not os.path.isfile(fn):
        pytest.skip(f'corpus program {name} not found')
    with open(fn, encoding='utf-8') as f:
        return parse_program(f.read())


def corpus_entries():
    """Return the entries of the bundled corpus configuration.
    """
    from chrsem.workbench import load_corpus
    return load_corpus(default_corpus_dir())


def gh_program():
    return parse_program(GH)
