import os

import pytest

from chrsem.utils import default_corpus_dir, get_workbench_config, parallel_map


@pytest.fixture
def no_home(monkeypatch, tmpdir):
    for name in ('UserProfile', 'AllUsersProfile', 'CHR_WORKBENCH_CONF', 'CHR_CORPUS_DIR'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv('HOME', str(tmpdir.mkdir('home')))


def test_get_workbench_config_defaults(no_home):
    conf = get_workbench_config()
    assert conf == dict(depth=6, jobs=1, seed=0, corpus_dir=default_corpus_dir())
    assert os.path.isfile(os.path.join(conf['corpus_dir'], 'corpus.cfg'))


def test_get_workbench_config(no_home, monkeypatch, tmpdir):
    d = tmpdir.mkdir("chrsem")
    fh = d.join("workbench.conf")
    fh.write("""
[workbench]
depth: 3
seed  =  11

[corpus]
directory: /data/chr
""")
    monkeypatch.setenv('CHR_WORKBENCH_CONF', os.path.join(fh.dirname, fh.basename))
    conf = get_workbench_config()
    assert conf['depth'] == 3
    assert conf['jobs'] == 1
    assert conf['seed'] == 11
    assert conf['corpus_dir'] == '/data/chr'
    conf = get_workbench_config(depth=5, jobs=None)
    assert conf['depth'] == 5
    assert conf['jobs'] == 1
    monkeypatch.setenv('CHR_CORPUS_DIR', '/elsewhere')
    assert get_workbench_config()['corpus_dir'] == '/elsewhere'


def test_get_workbench_config_home(no_home):
    home = os.environ['HOME']
    os.makedirs(os.path.join(home, '.config', 'chrsem'))
    with open(os.path.join(home, '.config', 'chrsem', 'workbench.conf'), 'w') as f:
        f.write('[workbench]\njobs: 4\n')
    assert get_workbench_config()['jobs'] == 4


def test_get_workbench_config_missing_file(no_home, monkeypatch, capsys):
    monkeypatch.setenv('CHR_WORKBENCH_CONF', '/no/such/workbench.conf')
    conf = get_workbench_config()
    assert conf['depth'] == 6
    err = capsys.readouterr().err
    assert "CHR_WORKBENCH_CONF='/no/such/workbench.conf' is not a file, ignoring." in err


def square(x):
    return x * x


def fail_on_three(x):
    if x == 3:
        raise KeyError(f'no {x}')
    return x


def test_parallel_map_in_process():
    assert parallel_map(square, range(5)) == [0, 1, 4, 9, 16]
    assert parallel_map(square, []) == []
    with pytest.raises(KeyError, match='no 3'):
        parallel_map(fail_on_three, range(5))


@pytest.mark.slow
def test_parallel_map_workers():
    assert parallel_map(square, range(5), jobs=2) == [0, 1, 4, 9, 16]
    with pytest.raises(KeyError, match='no 3') as info:
        parallel_map(fail_on_three, range(5), jobs=2)
    names = []
    tb = info.value.__traceback__
    while tb is not None:
        names.append(tb.tb_frame.f_code.co_name)
        tb = tb.tb_next
    assert 'fail_on_three' in names
