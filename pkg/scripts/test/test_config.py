import json
import os
import sys

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from noma_pairing.config import (ConfigError, PairingConfig, SweepSpec, load_preset,
                                 load_sweep_config, preset_names)

PRESETS = ['fig1a', 'fig1b', 'fig2', 'fig3a', 'fig3b', 'fig4', 'fig5', 'fig6a', 'fig6b']

def test_every_preset_loads():
    assert preset_names() == sorted(PRESETS)
    for name in PRESETS:
        spec = load_preset(name)
        assert spec.name == name
        assert len(spec.grid()) == 9
        for series in spec.series():
            for value in spec.grid():
                spec.pairing_config(**{spec.series_var: series, spec.sweep_var: value})

def test_fig4_preset():
    spec = load_preset('fig4')
    assert (spec.metric, spec.M, spec.n, spec.I, spec.rate_bpcu) == ('crnoma_outage', 5, 5, 5.0, 1.0)
    assert spec.series_var == 'm' and spec.series_values == [1, 2, 3]

def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_preset('fig9')

def test_pairing_config_validation():
    cfg = PairingConfig.from_db(10., M=5, m=1, n=2)
    assert abs(cfg.rho - 10.) <= 1e-12
    assert abs(cfg.rho_db - 10.) <= 1e-12
    assert abs(cfg.a_m_sq - 0.8) <= 1e-12

    for bad in (dict(M=1, m=1, n=2), dict(M=5, m=2, n=2), dict(M=5, m=1, n=6)):
        with pytest.raises(ConfigError):
            PairingConfig(rho=10., **bad)
    with pytest.raises(ConfigError):
        PairingConfig(M=5, m=1, n=2, rho=10., a_n_sq=0.7)
    with pytest.raises(ConfigError):
        PairingConfig(M=5, m=1, n=2, rho=0.)

def test_sweep_spec_grid():
    assert SweepSpec(metric='crnoma_outage').grid() == [0., 5., 10., 15., 20., 25., 30., 35., 40.]
    assert SweepSpec(metric='crnoma_outage', rho_start_db=7., rho_stop_db=7.).grid() == [7.]
    assert SweepSpec(metric='fnoma_gap_below', sweep_var='R_gap', sweep_values=[0.5, 1.]).grid() == [0.5, 1.]

def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(metric='nonsense')
    with pytest.raises(ConfigError):
        SweepSpec(metric='crnoma_outage', rho_start_db=10., rho_stop_db=0.)
    with pytest.raises(ConfigError):
        SweepSpec(metric='crnoma_outage', rho_step_db=0.)
    with pytest.raises(ConfigError):
        SweepSpec(metric='crnoma_outage', sweep_var='m')
    with pytest.raises(ConfigError):
        SweepSpec(metric='crnoma_outage', series_var='rho_db', series_values=[1.])

def test_load_sweep_config(tmp_path):
    path = tmp_path / 'sweep.json'
    path.write_text(json.dumps(dict(metric='fnoma_sum_worse', n=3, tool_version='0.1.0', timestamp='now', rng='torch')))
    spec = load_sweep_config(str(path))
    assert spec.n == 3 and spec.metric == 'fnoma_sum_worse'

def test_load_sweep_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_sweep_config(str(tmp_path / 'missing.json'))

    broken = tmp_path / 'broken.json'
    broken.write_text('{"metric": ')
    with pytest.raises(ConfigError):
        load_sweep_config(str(broken))

    nested = tmp_path / 'list.json'
    nested.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        load_sweep_config(str(nested))

    unknown = tmp_path / 'unknown.json'
    unknown.write_text(json.dumps(dict(metric='fnoma_sum_worse', colour='blue')))
    with pytest.raises(ConfigError):
        load_sweep_config(str(unknown))

def test_missing_preset_directory(tmp_path):
    with pytest.raises(ConfigError):
        preset_names(tmp_path / 'presets')
    with pytest.raises(ConfigError):
        load_preset('fig4', tmp_path / 'presets')

def test_presets_from_another_directory(tmp_path):
    (tmp_path / 'mine.json').write_text(json.dumps(dict(metric='crnoma_outage', n=5)))
    assert preset_names(tmp_path) == ['mine']
    assert load_preset('mine', tmp_path).n == 5

def test_version_read_from_repository():
    import noma_pairing
    version_file = os.path.join(os.path.dirname(__file__), '..', '..', 'VERSION')
    with open(version_file) as f:
        assert noma_pairing.__version__ == f.read().strip()
