import math
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from noma_pairing.config import ConfigError, PairingConfig
from noma_pairing.montecarlo import (EventSpec, ProbabilityEstimate, block_moments,
                                     combine_moments, estimate, estimate_parallel)

def config(rho_db=20., **kwargs):
    kwargs = {**dict(M=5, m=1, n=2), **kwargs}
    return PairingConfig.from_db(rho_db, **kwargs)

def test_sum_worse_at_equal_split_never_happens():
    result = estimate(EventSpec('FNomaSumWorse', config(a_n_sq=0.5)), trials=100_000, seed=0)
    assert result.value == 0.
    assert result.std_error == 1. / 100_000
    assert result.agrees_with(0.)

def test_user_m_gains_two_users():
    cfg = PairingConfig(M=2, m=1, n=2, rho=10.)
    result = estimate(EventSpec('UserMGains', cfg), trials=1_000_000, seed=1)
    assert abs(result.value - (1. - math.exp(-3.))) <= 0.0007 * 3
    assert abs(result.std_error - math.sqrt(result.value * (1. - result.value) / 1_000_000)) <= 1e-15

def test_outage_without_power():
    cfg = config(rho_db=-30., n=5)
    result = estimate(EventSpec('CrOutage', cfg), trials=10_000, seed=2)
    assert result.value == 1.

def test_estimates_are_reproducible():
    spec = EventSpec('FNomaSumWorse', config(rho_db=5.))
    a = estimate(spec, trials=150_000, seed=42)
    b = estimate(spec, trials=150_000, seed=42)
    c = estimate(spec, trials=150_000, seed=43)
    assert a == b
    assert a.value != c.value

@pytest.mark.parametrize('workers', [2, 3, 8])
def test_parallel_is_worker_invariant(workers):
    spec = EventSpec('CrErgodicRate', config(n=5))
    serial = estimate(spec, trials=300_000, seed=7)
    assert estimate_parallel(spec, trials=300_000, seed=7, workers=workers) == serial

def test_more_workers_than_blocks():
    spec = EventSpec('UserNGains', config())
    assert estimate_parallel(spec, trials=2_000, seed=3, workers=8) == estimate(spec, trials=2_000, seed=3)

def test_min_gain_coverage():
    p, hits, runs = 0.3, 0, 200
    cfg = config()
    for seed in range(runs):
        result = estimate(EventSpec('MinGainBelow', cfg, p=p), trials=10_000, seed=seed)
        hits += result.agrees_with(p)
    assert hits >= 0.99 * runs

def test_moment_combination_matches_direct():
    values = np.random.default_rng(0).normal(size=1000)
    def moments(x):
        return len(x), float(np.mean(x)), float(np.sum((x - np.mean(x)) ** 2))
    count, mean, m2 = combine_moments(moments(values[:300]), moments(values[300:]))
    assert count == 1000
    assert abs(mean - np.mean(values)) <= 1e-12
    assert abs(m2 - np.sum((values - np.mean(values)) ** 2)) <= 1e-9

def test_block_moments_respects_trial_budget():
    count, mean, _ = block_moments(EventSpec('UserMGains', config()), 0, 1_500, seed=0)
    assert count == 1_500
    assert 0. <= mean <= 1.

def test_invalid_requests():
    with pytest.raises(ConfigError):
        estimate(EventSpec('UserMGains', config()), trials=10, seed=0)
    with pytest.raises(ConfigError):
        estimate(EventSpec('UserMGains', config()), trials=10_000, seed=-1)
    with pytest.raises(ConfigError):
        estimate_parallel(EventSpec('UserMGains', config()), trials=10_000, seed=0, workers=0)
    with pytest.raises(ConfigError):
        EventSpec('MinGainBelow', config(), p=1.5)
    with pytest.raises(ConfigError):
        EventSpec('NotAnEvent', config())

def test_probability_estimate_invariants():
    with pytest.raises(AssertionError):
        ProbabilityEstimate(value=0.5, std_error=0.1, trials=0, seed=0)
