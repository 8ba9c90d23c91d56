import json
import os

import numpy as np
import pytest

from src.storage.gram_cache import GramCache, canonical_header, header_key
from src.storage.study_storage import StudyStorage

HEADER = {'q': 2, 'n': 10, 'm': 4.0, 'potential': None}


def test_header_key_ignores_key_order():
    shuffled = {'potential': None, 'm': 4.0, 'n': 10, 'q': 2}
    assert header_key(HEADER) == header_key(shuffled)
    assert canonical_header(HEADER) == canonical_header(shuffled)


def test_store_and_load(tmp_path):
    cache = GramCache(str(tmp_path))
    assert cache.store(HEADER, {'log_norms': np.arange(3.0)})
    payload = cache.load(HEADER)
    assert np.array_equal(payload['log_norms'], np.arange(3.0))
    entry = cache.inspect()[0]
    assert entry['valid'] and entry['q'] == 2 and entry['n'] == 10


def test_locked_entry_is_skipped(tmp_path):
    cache = GramCache(str(tmp_path))
    open(os.path.join(str(tmp_path), f"{header_key(HEADER)}.lock"), 'w').close()
    assert cache.store(HEADER, {'x': np.zeros(1)}) is False
    assert cache.load(HEADER) is None


def test_header_mismatch_discards_entry(tmp_path):
    cache = GramCache(str(tmp_path))
    cache.store(HEADER, {'x': np.zeros(1)})
    other = dict(HEADER, n=11)
    os.replace(os.path.join(str(tmp_path), f"{header_key(HEADER)}.npz"),
               os.path.join(str(tmp_path), f"{header_key(other)}.npz"))
    assert cache.load(other) is None
    assert cache.inspect() == []


def test_clear_counts_entries(tmp_path):
    cache = GramCache(str(tmp_path))
    cache.store(HEADER, {'x': np.zeros(1)})
    cache.store(dict(HEADER, q=1), {'x': np.zeros(1)})
    assert cache.clear() == 2
    assert cache.clear() == 0


def test_default_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv('BERGMAN_CACHE_DIR', str(tmp_path / 'c'))
    assert GramCache().directory == str(tmp_path / 'c')


def test_table_splits_complex_columns(tmp_path):
    storage = StudyStorage(str(tmp_path), 'csv')
    storage.write_table('kernel', [{'z': 0.5 + 1j, 'value': 1.0}, {'z': 0j, 'value': 2.0}])
    df = storage.read_table('kernel')
    assert list(df.columns) == ['z_re', 'z_im', 'value']
    assert df['z_im'].tolist() == [1.0, 0.0]
    assert storage.write_json('summary', {'a': 1}) is None


def test_json_summary_has_schema_version(tmp_path):
    storage = StudyStorage(str(tmp_path), 'json')
    path = storage.write_json('summary', {'value': 1 + 2j})
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    assert 'schema_version' in data
    assert data['value'] == {'re': 1.0, 'im': 2.0}
    assert storage.write_table('t', [{'a': 1}]) is None


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        StudyStorage(str(tmp_path), 'xml')


def test_json_summary_reads_back(tmp_path):
    storage = StudyStorage(str(tmp_path), 'both')
    storage.write_json('blowup', {'slope': -0.5, 'flags': []})
    data = storage.read_json('blowup')
    assert data['slope'] == -0.5
    assert storage.written == [os.path.join(str(tmp_path), 'blowup.json')]
