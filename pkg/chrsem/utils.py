"""Collection of helper functions
"""

import os
import sys
import pickle
import configparser
import multiprocessing

try:
    import tblib
    import tblib.pickling_support
except ImportError:
    tblib = None

if tblib is not None:
    tblib.pickling_support.install()


def default_corpus_dir():
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), 'corpus')


def get_workbench_config(**config):
    """Retrieve the workbench configuration parameters.

    The configuration is read from
    :code:`$HOME/.config/chrsem/workbench.conf` (in Windows, from
    :code:`%UserProfile/.config/chrsem/workbench.conf` or
    :code:`%AllUsersProfile/.config/chrsem/workbench.conf`). When
    :code:`CHR_WORKBENCH_CONF` environment variable is defined then
    the configuration is read from the file specified in this
    variable.

    The configuration file uses INI syntax, for instance::

      [workbench]
      depth: <derivation depth, defaults to 6>
      jobs: <number of worker processes, defaults to 1>
      seed: <fresh variable seed, defaults to 0>

      [corpus]
      directory: <directory of corpus.cfg>

    The :code:`CHR_CORPUS_DIR` environment variable overrides the
    corpus directory.

    Parameters
    ----------
    config : dict
      Specify configuration parameters that override the parameters
      from configuration file. None values are ignored.

    Returns
    -------
    config : dict
      A dictionary of `depth`, `jobs`, `seed` and `corpus_dir`.
    """
    result = dict(depth=6, jobs=1, seed=0, corpus_dir=default_corpus_dir())

    conf_file = os.environ.get('CHR_WORKBENCH_CONF', None)
    if conf_file is not None and not os.path.isfile(conf_file):
        print(f'chrsem.utils.get_workbench_config:'
              f' CHR_WORKBENCH_CONF={conf_file!r}'
              ' is not a file, ignoring.', file=sys.stderr)
        conf_file = None
    if conf_file is None:
        conf_file_base = os.path.join('.config', 'chrsem', 'workbench.conf')
        for prefix_env in ['UserProfile', 'AllUsersProfile', 'HOME']:
            prefix = os.environ.get(prefix_env, None)
            if prefix is not None:
                fn = os.path.join(prefix, conf_file_base)
                if os.path.isfile(fn):
                    conf_file = fn
                    break

    if conf_file is not None:
        conf = configparser.ConfigParser()
        conf.read(conf_file)
        if 'workbench' in conf:
            workbench = conf['workbench']
            for key in ('depth', 'jobs', 'seed'):
                if key in workbench:
                    result[key] = int(workbench[key])
        if 'corpus' in conf:
            corpus = conf['corpus']
            if 'directory' in corpus:
                result['corpus_dir'] = os.path.expanduser(corpus['directory'])

    corpus_dir = os.environ.get('CHR_CORPUS_DIR', None)
    if corpus_dir:
        result['corpus_dir'] = corpus_dir

    for key, value in config.items():
        if value is not None:
            result[key] = value
    return result


def _call(func, item):
    try:
        return True, func(item)
    except Exception:
        if tblib is not None:
            return False, pickle.dumps(sys.exc_info()[1:])
        # tblib would be required to pickle traceback instances
        et, ev, tb = sys.exc_info()
        return False, pickle.dumps((RuntimeError(f'{et.__name__}: {ev}'), None))


def _star_call(args):
    return _call(*args)


def parallel_map(func, items, jobs=1):
    """Apply func to items, possibly in worker processes.

    Parameters
    ----------
    func : callable
      Module level function taking a single picklable argument.
    items : iterable
    jobs : int
      Number of worker processes. With ``jobs <= 1`` the items are
      processed in the current process.

    Returns
    -------
    results : list
      Results in the order of items. An exception raised in a worker
      is re-raised in the caller with the worker traceback.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    ctx = multiprocessing.get_context('spawn')
    with ctx.Pool(min(jobs, len(items))) as pool:
        outcomes = pool.map(_star_call, [(func, item) for item in items])
    results = []
    for ok, value in outcomes:
        if not ok:
            exc, tb = pickle.loads(value)
            raise exc.with_traceback(tb)
        results.append(value)
    return results
