import json

import pytest

from main import main


def _config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


MODEL_DISK = {
    'potential': {'kind': 'none'},
    'domain': {'kind': 'disk'},
    'kernel': {'q': 1, 'n': 20},
    'output': {'plots': False}
}

GAUSSIAN_BLOWUP = {
    'potential': {'kind': 'gaussian', 'alpha': 1.0},
    'kernel': {'n': 20},
    'study': {'source': 'gram', 'q': 2, 'm_list': [2.0, 4.0], 'grid_count': 3},
    'output': {'plots': False}
}


def test_model_disk_kernel_matches_closed_form(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(['--config', _config(tmp_path, MODEL_DISK), '--out', str(out), '--no-cache', 'kernel'])
    assert code == 0
    assert "sources=gram,closed" in capsys.readouterr().out
    summary = json.loads((out / "kernel.json").read_text(encoding="utf-8"))
    assert summary['max_rel']['rel_gram_closed'] < 1e-8
    assert (out / "kernel.csv").exists()
    assert (out / "resolved_config.json").exists()


def test_validation_failure_exit_code(tmp_path, capsys):
    code = main(['--config', _config(tmp_path, MODEL_DISK), '--out', str(tmp_path / "out"), '--no-cache', 'blowup'])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err['error']['code'] == 'CONFIG_INVALID'


def test_numerical_failure_exit_code(tmp_path, capsys):
    data = {
        'potential': {'kind': 'quartic', 'alpha': 1.0, 's': 0.1},
        'kernel': {'q': 1, 'n': 5},
        'quadrature': {'max_doublings': 0},
        'output': {'plots': False}
    }
    code = main(['--config', _config(tmp_path, data), '--out', str(tmp_path / "out"), '--no-cache', 'kernel'])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err['error']['code'] == 'QUADRATURE_UNCONVERGED'


def test_unknown_key_exit_code(tmp_path):
    path = _config(tmp_path, {'kernel': {'colour': 'red'}})
    assert main(['--config', path, '--out', str(tmp_path / "out"), 'kernel']) == 1


def test_parse_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"seed": ', encoding="utf-8")
    assert main(['--config', str(path), '--out', str(tmp_path / "out"), 'kernel']) == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err['error']['code'] == 'CONFIG_PARSE'
    assert err['error']['details']['line'] == 1


def test_symbolic_solve_q1(tmp_path, capsys):
    code = main(['--out', str(tmp_path), '--no-cache', 'symbolic', 'solve', '--q', '1', '--order', '1'])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "π·L^1_0 = 2*β"
    data = json.loads((tmp_path / "symbolic_solve.json").read_text(encoding="utf-8"))
    assert data['q'] == 1 and len(data['orders']) == 2


def test_symbolic_order_unavailable_exit_code(tmp_path):
    assert main(['--out', str(tmp_path), '--no-cache', 'symbolic', 'solve', '--q', '2', '--order', '5']) == 1


def test_symbolic_verify_q2(tmp_path, capsys):
    code = main(['--out', str(tmp_path), '--no-cache', 'symbolic', 'verify', '--q', '2', '--order', '0'])
    assert code == 0
    assert "residual_zero=True" in capsys.readouterr().out


def test_format_csv_skips_summaries(tmp_path):
    out = tmp_path / "out"
    code = main(['--config', _config(tmp_path, MODEL_DISK), '--out', str(out), '--format', 'csv',
                 '--no-cache', 'kernel'])
    assert code == 0
    assert (out / "kernel.csv").exists()
    assert not (out / "kernel.json").exists()
    assert (out / "resolved_config.json").exists()


def test_seed_flag_echoed(tmp_path):
    out = tmp_path / "out"
    code = main(['--out', str(out), '--seed', '42', '--no-cache', 'symbolic', 'identities'])
    assert code == 0
    resolved = json.loads((out / "resolved_config.json").read_text(encoding="utf-8"))
    assert resolved['seed'] == 42
    report = json.loads((out / "symbolic_identities.json").read_text(encoding="utf-8"))
    assert report['seed'] == 42 and report['all_passed']


@pytest.mark.slow
def test_blowup_is_deterministic_across_cache_states(tmp_path, monkeypatch):
    cache_dir = tmp_path / "cache"
    monkeypatch.setenv('BERGMAN_CACHE_DIR', str(cache_dir))
    path = _config(tmp_path, GAUSSIAN_BLOWUP)

    assert main(['--config', path, '--out', str(tmp_path / "cold"), 'blowup']) == 0
    assert list(cache_dir.glob("*.npz"))
    assert main(['--config', path, '--out', str(tmp_path / "warm"), 'blowup']) == 0
    assert main(['--config', path, '--out', str(tmp_path / "nocache"), '--no-cache', 'blowup']) == 0

    cold = (tmp_path / "cold" / "blowup.csv").read_bytes()
    assert cold == (tmp_path / "warm" / "blowup.csv").read_bytes()
    assert cold == (tmp_path / "nocache" / "blowup.csv").read_bytes()


def test_cache_inspect_and_clear(tmp_path, monkeypatch, capsys):
    cache_dir = tmp_path / "cache"
    cache_dir.mkdir()
    monkeypatch.setenv('BERGMAN_CACHE_DIR', str(cache_dir))
    assert main(['--out', str(tmp_path / "out"), 'cache', 'inspect']) == 0
    assert "0 entries" in capsys.readouterr().out
    assert main(['--out', str(tmp_path / "out"), 'cache', 'clear']) == 0
    assert "removed 0 entries" in capsys.readouterr().out
