import json

import pytest

from src.config.kernel_config import ACTIVE_CONFIG
from src.config.run_config import RunConfig
from src.core.runner import ExperimentRunner

QUARTIC_STUDY = {
    'potential': {'kind': 'quartic', 'alpha': 1.0, 's': 0.1},
    'kernel': {'n': 30, 'target': 1e-6},
    'study': {'source': 'gram', 'q': 2, 'm_list': [20.0, 40.0, 80.0, 160.0], 'grid_radius': 2.0, 'grid_count': 9},
    'output': {'plots': False}
}


def _blowup(tmp_path, data):
    runner = ExperimentRunner(RunConfig.from_dict(data), out_dir=str(tmp_path), fmt='json')
    lines = runner.blowup()
    report = json.loads((tmp_path / "blowup.json").read_text(encoding="utf-8"))
    return lines, report


@pytest.mark.slow
@pytest.mark.parametrize("z0", [[0.0, 0.0], [0.3, 0.0]])
def test_quartic_blowup_with_refined_gram(tmp_path, z0):
    data = json.loads(json.dumps(QUARTIC_STUDY))
    data['study']['z0'] = z0
    _, report = _blowup(tmp_path, data)

    assert report['strictly_decreasing'], [r['sup_error'] for r in report['rows']]
    band = ACTIVE_CONFIG.get_config('STUDY_CONFIG')['slope_band']
    assert band[0] <= report['slope'] <= band[1]
    assert report['slope_in_band']
    assert 'truncation_dominated' not in report['flags']
    for row in report['rows']:
        assert row['n'] >= 30
        assert row['n_refinement_delta'] < 0.1 * row['sup_error']
        assert row['truncation_ok'] is True


@pytest.mark.slow
def test_gaussian_control_collapses_exactly(tmp_path):
    data = {
        'potential': {'kind': 'gaussian', 'alpha': 1.0},
        'study': {'source': 'closedform', 'q': 2, 'm_list': [20.0, 40.0, 80.0, 160.0], 'z0': [0.3, 0.0],
                  'grid_radius': 2.0, 'grid_count': 9},
        'output': {'plots': False}
    }
    lines, report = _blowup(tmp_path, data)
    assert max(r['sup_error'] for r in report['rows']) < 1e-10
    assert 'exact' in report['flags']
    assert report['slope'] is None
    assert "slope=omitted" in lines[0]


def test_kernel_report_carries_refinement_column(tmp_path):
    data = {
        'potential': {'kind': 'none'},
        'domain': {'kind': 'disk'},
        'kernel': {'q': 1, 'n': 20},
        'output': {'plots': False}
    }
    runner = ExperimentRunner(RunConfig.from_dict(data), out_dir=str(tmp_path), fmt='json')
    lines = runner.kernel()
    summary = json.loads((tmp_path / "kernel.json").read_text(encoding="utf-8"))
    assert summary['n'] == 20
    assert summary['n_refinement_delta'] < 1e-8
    assert all(row['n_refinement_delta'] == summary['n_refinement_delta'] for row in summary['rows'])
    assert summary['sources']['gram']['n_refinement_delta'] == summary['n_refinement_delta']
    assert lines[1].startswith("  n=20 n_refinement_delta=")


def test_bounds_report_separates_informational_check(tmp_path):
    run = RunConfig.from_dict({'bounds': {'trials': 20}, 'output': {'plots': False}})
    lines = ExperimentRunner(run, out_dir=str(tmp_path), fmt='json').bounds()
    assert "all_hold=True" in lines[0]
    assert any(line.startswith("  dbar_rescaled_display:") and line.endswith(" informational") for line in lines)
    report = json.loads((tmp_path / "bounds.json").read_text(encoding="utf-8"))
    assert report['checks']['dbar_rescaled']['violations'] == 0
