import json

import pytest

from src.analysis.gram import QuadratureSpec
from src.config.kernel_config import FastConfig
from src.config.run_config import RunConfig
from src.models.errors import ConfigError, ErrorCode, KernelError, ValidationError


def _write(tmp_path, text):
    path = tmp_path / "run.json"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_defaults_follow_preset():
    run = RunConfig.defaults('fast')
    assert run.config_class is FastConfig
    assert run.section('kernel')['n'] == 20
    assert run.section('bounds')['trials'] == 100
    assert isinstance(run.quadrature(), QuadratureSpec)


def test_unknown_preset_rejected():
    with pytest.raises(ValidationError) as exc:
        RunConfig.defaults('turbo')
    assert exc.value.code is ErrorCode.CONFIG_INVALID


def test_partial_file_merges_with_defaults(tmp_path):
    path = _write(tmp_path, json.dumps({'potential': {'kind': 'gaussian', 'alpha': 2.0}, 'kernel': {'q': 1}}))
    run = RunConfig.load(path)
    assert run.source_path == path
    assert run.section('kernel')['q'] == 1
    assert run.section('kernel')['m'] == 8.0
    P = run.potential()
    assert P.is_radial


@pytest.mark.parametrize("data", [
    {'kernal': {}},
    {'kernel': {'qq': 2}},
    {'kernel': 3},
    {'kernel': {'source': 'magic'}},
    {'study': {'m_list': [4.0, -1.0]}},
    {'symbolic': {'origin': 'guessed'}},
    {'potential': {'kind': 'radial'}},
])
def test_invalid_values_are_config_invalid(data):
    with pytest.raises(KernelError) as exc:
        RunConfig.from_dict(data)
    assert exc.value.code is ErrorCode.CONFIG_INVALID
    assert exc.value.exit_code == 1


def test_parse_error_reports_position(tmp_path):
    path = _write(tmp_path, '{\n  "seed": 3,\n  "kernel": {"q": }\n}')
    with pytest.raises(ConfigError) as exc:
        RunConfig.load(path)
    assert exc.value.code is ErrorCode.CONFIG_PARSE
    assert exc.value.exit_code == 3
    assert exc.value.details['line'] == 3


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / "absent.json"))


def test_preset_argument_overrides_file(tmp_path):
    path = _write(tmp_path, json.dumps({'preset': 'default'}))
    assert RunConfig.load(path, preset='fast').values['preset'] == 'fast'


def test_overrides_recorded_in_resolved_echo():
    run = RunConfig.defaults().apply_overrides(seed=11, threads=None)
    assert run.seed == 11
    assert run.overrides == ['seed']
    resolved = run.resolved()
    resolved['seed'] = 0
    assert run.seed == 11


def test_model_disk_requires_disk_domain():
    run = RunConfig.from_dict({'potential': {'kind': 'none'}, 'domain': {'kind': 'disk'}})
    assert run.potential() is None
    assert run.domain(None).m is None
    with pytest.raises(ValidationError):
        RunConfig.from_dict({'potential': {'kind': 'none'}})


def test_points_parsing():
    run = RunConfig.from_dict({'metrics': {'z': [0.25, -0.5]}})
    assert run.point('metrics', 'z') == complex(0.25, -0.5)
    assert run.kernel_points()[1] == (complex(0.1, 0.05), complex(-0.05, 0.1))
    bad = RunConfig.from_dict({'kernel': {'points': [[0.0, 0.0, 0.1]]}})
    with pytest.raises(ValidationError):
        bad.kernel_points()


def test_check_returns_verdict():
    run = RunConfig.defaults()
    assert run.check() == (True, "OK")
    run.values['potential']['kind'] = 'cubic'
    ok, message = run.check()
    assert not ok and 'potential.kind' in message
