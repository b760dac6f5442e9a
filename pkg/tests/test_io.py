"""Serialization, builtin resolution and the pipeline configuration."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from defectchain.bimodule import vec_zp_bimodule
from defectchain.chain import defect_chain_hamiltonian
from defectchain.fusion import ising, vec_zp
from defectchain.io import (config_hash, dumps, format_float, provenance, read_json, read_matrix_market,
                            resolve_bimodule, resolve_category, write_json, write_matrix_market)
from defectchain.pipeline import ConfigError, PipelineConfig, thread_count


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    s = format_float(x)
    assert float(s) == x
    assert isinstance(json.loads(s), float)


def test_float_format_rejects_nonfinite():
    for x in (math.nan, math.inf):
        with pytest.raises(ValueError):
            format_float(x)


def test_dumps_layout():
    text = dumps({'a': [1, 2.0], 'b': {'c': None, 'd': [[1], []]}, 'e': np.float64(0.1), 'f': np.int64(3)})
    assert json.loads(text) == {'a': [1, 2.0], 'b': {'c': None, 'd': [[1], []]}, 'e': 0.1, 'f': 3}
    assert '"a": [1, 2.0]' in text
    assert text.endswith('\n')
    with pytest.raises(TypeError):
        dumps({'x': object()})


def test_dumps_uses_to_json():
    data = json.loads(dumps({'C': vec_zp(2)}))
    assert data['C'] == json.loads(json.dumps(vec_zp(2).to_json()))


def test_config_hash_ignores_key_order():
    assert config_hash({'a': 1, 'b': [1.5]}) == config_hash({'b': [1.5], 'a': 1})
    assert config_hash({'a': 1}) != config_hash({'a': 2})
    prov = provenance({'a': 1})
    assert set(prov) == {'tool', 'version', 'config_sha256'}


def test_write_json_puts_provenance_first(tmp_path):
    path = write_json(tmp_path / 'sub' / 'x.json', {'value': 1.0}, {'k': 1})
    data = read_json(path)
    assert list(data) == ['provenance', 'value']
    assert data['provenance']['config_sha256'] == config_hash({'k': 1})


def test_resolve_builtins(tmp_path):
    assert resolve_category('vecz3').same_data(vec_zp(3))
    assert resolve_category('ising-1').same_data(ising(-1))
    assert resolve_category('Ising').same_data(ising(1))
    path = tmp_path / 'cat.json'
    path.write_text(json.dumps(ising(-1).to_json()))
    assert resolve_category(str(path)).same_data(ising(-1))
    with pytest.raises(FileNotFoundError):
        resolve_category('nope')


def test_resolve_bimodules(tmp_path):
    M = resolve_bimodule('vecz3:X2')
    assert M.objects == vec_zp_bimodule(3, 'X2').objects
    assert resolve_bimodule('F1', vec_zp(2)).Cphase(1, '*', 1) == -1
    path = tmp_path / 'm.json'
    path.write_text(json.dumps(vec_zp_bimodule(2, 'F1').to_json()))
    assert resolve_bimodule(str(path)).Cphase(1, '*', 1) == -1
    with pytest.raises(ValueError):
        resolve_bimodule('F1')
    with pytest.raises(ValueError):
        resolve_bimodule('F1', ising(1))


def test_matrix_market_round_trip(tmp_path):
    H = defect_chain_hamiltonian(9, 'free')
    mtx, side = write_matrix_market(tmp_path / 'H.mtx', H, {'n': 9})
    m, meta = read_matrix_market(mtx)
    np.testing.assert_array_equal(m.toarray(), H.toarray().real)
    assert side.name == 'H.basis.json'
    assert meta['metadata']['n_edges'] == 9
    assert len(meta['basis']['states']) == H.dim
    assert 'real' in mtx.read_text().splitlines()[0]


# --------------------------------------------------------------------------- config

def test_config_defaults_and_overrides(tmp_path):
    cfg = PipelineConfig.from_file(None)
    assert cfg.sizes == list(range(1, 9)) and cfg.kappa == 1
    path = tmp_path / 'c.json'
    path.write_text(json.dumps({'kappa': -1, 'sizes': [1, 2]}))
    cfg = PipelineConfig.from_file(path, {'sizes': [3], 'kappa': None})
    assert cfg.kappa == -1 and cfg.sizes == [3]


@pytest.mark.parametrize('data', [{'colour': 'red'}, {'kappa': 2}, {'sizes': [0]}, {'sizes': [12]},
                                  {'sizes': 'all'}, {'boundary': 'free'}, {'compare_tol': 0}])
def test_config_rejects_bad_values(data):
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict(data)


def test_config_must_be_object(tmp_path):
    path = tmp_path / 'c.json'
    path.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(path)


def test_thread_count(monkeypatch):
    monkeypatch.setenv('DEFECTCHAIN_THREADS', '3')
    assert thread_count() == 3
    for bad in ('0', 'many'):
        monkeypatch.setenv('DEFECTCHAIN_THREADS', bad)
        with pytest.raises(ConfigError):
            thread_count()
    monkeypatch.delenv('DEFECTCHAIN_THREADS')
    assert thread_count() >= 1
