import math
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from noma_pairing.channel import ordered_marginal_cdf, sample_trials
from noma_pairing.config import ConfigError, PairingConfig
from noma_pairing.crnoma import (OutageQuery, diversity_slope, ergodic_gain_adjacent,
                                 ergodic_gain_mc, ergodic_gain_oracle, outage_exact,
                                 outage_region_oracle, power_coefficient, power_coefficients,
                                 sinr_weak_user, sum_gain, sum_gains, top_decade)
from noma_pairing.fnoma import OrderingError, noma_rates
from noma_pairing.montecarlo import EventSpec, estimate, estimate_parallel
from noma_pairing.utils import db_to_linear

def query(rho_db, M=5, m=1, n=5, I_sinr=5., R_target=1.):
    return OutageQuery(M=M, m=m, n=n, rho=db_to_linear(rho_db), I_sinr=I_sinr, R_target=R_target)

# power policy

def test_power_coefficient_examples():
    result = power_coefficient(2., 10., 5.)
    assert abs(result.a_n_sq - 0.125) <= 1e-12
    assert result.served

    blocked = power_coefficient(0.4, 10., 5.)
    assert blocked.a_n_sq == 0. and not blocked.served

    assert abs(power_coefficient(1e12, 10., 5.).a_n_sq - 1. / 6.) <= 1e-9

def test_weak_user_sinr_held_at_target():
    assert abs(sinr_weak_user(2., 0.125, 10.) - 5.) <= 1e-12
    assert abs(sinr_weak_user(0.3, 0., 10.) - 3.) <= 1e-12

    gains = sample_trials(5, 0, 100_000, seed=12)[:, 0]
    rho, I = 100., 5.
    served = gains > I / rho
    a_n_sq = power_coefficients(gains[served], rho, I)
    sinr = gains[served] * (1. - a_n_sq) / (gains[served] * a_n_sq + 1. / rho)
    assert np.max(np.abs(sinr - I)) <= 1e-12 * I

def test_sum_gain_examples():
    assert abs(sum_gain(1., 2., 10., 5.) - math.log2((1. + 20. / 12.) / (1. + 10. / 12.))) <= 1e-12
    assert abs(sum_gain(1., 2., 10., 5.) - 0.540568) <= 1e-6
    assert sum_gain(1., 1., 10., 5.) == 0.
    with pytest.raises(OrderingError):
        sum_gain(2., 1., 10., 5.)

def test_sum_gain_identity_on_draws():
    gains = sample_trials(5, 0, 100_000, seed=13)[:100_000]
    g_m, g_n = gains[:, 1], gains[:, 3]
    rho, I = 100., 5.
    a_n_sq = power_coefficients(g_m, rho, I)
    rate_weak, rate_strong = noma_rates(g_m, g_n, a_n_sq, rho)
    weak_alone = np.log2(1. + rho * g_m)

    gain = sum_gains(g_m, g_n, rho, I)
    assert np.all(gain >= 0.)
    assert np.max(np.abs(rate_weak + rate_strong - weak_alone - gain)) <= 1e-12

# outage

def test_outage_query_properties():
    q = query(10.)
    assert abs(q.b - 0.5) <= 1e-12 and q.a == 6. and abs(q.eps1 - 0.1) <= 1e-12
    assert q.closed_form_regime
    with pytest.raises(ConfigError):
        OutageQuery(M=5, m=3, n=2, rho=10., I_sinr=5., R_target=1.)

def test_outage_tends_to_one_without_power():
    assert outage_exact(query(-40.)) >= 1. - 1e-6

@pytest.mark.parametrize('m', [1, 2, 3])
@pytest.mark.parametrize('rho_db', [20., 30., 40.])
def test_outage_matches_region_oracle(m, rho_db):
    q = query(rho_db, m=m)
    assert abs(outage_exact(q) - outage_region_oracle(q)) <= 1e-6

def test_outage_cross_validation_grid():
    for m, n in [(1, 2), (2, 4), (1, 3)]:
        for rho_db in [0., 10., 25., 35.]:
            q = query(rho_db, m=m, n=n)
            assert abs(outage_exact(q) - outage_region_oracle(q)) <= 1e-6

@pytest.mark.parametrize('m, n, rho_db', [(1, 5, 0.), (1, 5, -5.), (1, 3, -5.), (2, 4, -5.), (3, 5, -5.)])
def test_outage_with_negligible_pieces(m, n, rho_db):
    # the strip is close to 1 and the strong-gain pieces are far below it
    q = query(rho_db, m=m, n=n)
    value = outage_exact(q)
    assert ordered_marginal_cdf(5, m, q.b) - 1e-12 <= value <= 1.
    assert abs(value - outage_region_oracle(q)) <= 1e-6

def test_outage_runs_on_the_whole_grid():
    for n in range(2, 6):
        for m in range(1, n):
            for rho_db in range(-10, 45, 5):
                value = outage_exact(query(float(rho_db), m=m, n=n))
                assert 0. <= value <= 1.

@pytest.mark.parametrize('m', [1, 3])
@pytest.mark.parametrize('rho_db', [50., 60.])
def test_region_oracle_at_very_high_snr(m, rho_db):
    q = query(rho_db, m=m)
    exact = outage_exact(q)
    assert abs(outage_region_oracle(q) - exact) <= 1e-5 * exact

def test_outage_strip_dominates():
    q = query(30., m=2)
    assert outage_exact(q) >= ordered_marginal_cdf(5, 2, q.b)

@pytest.mark.parametrize('m', [1, 2, 3])
@pytest.mark.parametrize('rho_db', [20., 30., 40.])
def test_outage_matches_monte_carlo(m, rho_db):
    q = query(rho_db, m=m)
    cfg = PairingConfig(M=5, m=m, n=5, rho=q.rho, I_sinr=5., R_target=1.)
    result = estimate_parallel(EventSpec('CrOutage', cfg), trials=10_000_000, seed=17, workers=8)
    assert result.agrees_with(outage_exact(q))

def test_oracle_covers_large_qos_gain():
    # b > a eps1 once the qos target dwarfs the rate target
    q = query(20., m=1, n=3, I_sinr=50., R_target=0.1)
    assert not q.closed_form_regime
    value = outage_exact(q)
    cfg = PairingConfig(M=5, m=1, n=3, rho=q.rho, I_sinr=50., R_target=0.1)
    result = estimate(EventSpec('CrOutage', cfg), trials=500_000, seed=19)
    assert result.agrees_with(value)

def test_outage_nonincreasing_in_snr():
    values = [outage_region_oracle(query(db, m=1, n=5)) for db in (0., 8., 16., 24., 32., 40.)]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))

# diversity

@pytest.mark.parametrize('m', [1, 2, 3])
def test_diversity_order_is_m(m):
    points = [(db_to_linear(db), outage_exact(query(db, m=m))) for db in (30., 32.5, 35., 37.5, 40.)]
    assert abs(diversity_slope(points) - m) <= 0.35

def test_larger_partner_barely_changes_diversity():
    slopes = []
    for n in (2, 5):
        points = [(db_to_linear(db), outage_exact(query(db, m=1, n=n))) for db in (30., 35., 40.)]
        slopes.append(diversity_slope(points))
    assert abs(slopes[0] - slopes[1]) <= 0.1

def test_diversity_slope_synthetic():
    rhos = [10., 30., 100., 300., 1000.]
    assert abs(diversity_slope([(rho, 3. / rho ** 2) for rho in rhos]) - 2.) <= 1e-9
    assert abs(diversity_slope([(rho, 0.2) for rho in rhos])) <= 1e-9

def test_diversity_slope_rejects_bad_points():
    with pytest.raises(ConfigError):
        diversity_slope([(10., 0.1), (100., 0.01)])
    with pytest.raises(ConfigError):
        diversity_slope([(10., 0.1), (30., 0.), (100., 0.01)])
    with pytest.raises(ConfigError):
        diversity_slope([(10., 0.1), (12., 0.08), (14., 0.06)])

def test_top_decade():
    points = [(db_to_linear(db), 1.) for db in range(0, 45, 5)]
    kept = top_decade(points)
    assert len(kept) == 3
    assert min(rho for rho, _ in kept) == pytest.approx(1e3)

# ergodic rate

@pytest.mark.parametrize('m', [1, 4])
@pytest.mark.parametrize('rho_db', [20., 30.])
def test_ergodic_adjacent_matches_monte_carlo(m, rho_db):
    rho = db_to_linear(rho_db)
    analytic = ergodic_gain_adjacent(5, m, rho, 5.)
    result = ergodic_gain_mc(5, m, m + 1, rho, 5., trials=1_000_000, seed=23)
    assert result.agrees_with(analytic)

def test_ergodic_adjacent_matches_oracle():
    rho = db_to_linear(25.)
    assert abs(ergodic_gain_adjacent(5, 2, rho, 5.) - ergodic_gain_oracle(5, 2, 3, rho, 5.)) <= 1e-7

def test_ergodic_adjacent_increases_with_snr():
    values = [ergodic_gain_adjacent(5, 4, db_to_linear(db), 5.) for db in (10., 17.5, 25., 32.5, 40.)]
    assert all(later > earlier for earlier, later in zip(values, values[1:]))

def test_ergodic_vanishes_for_huge_qos_target():
    assert ergodic_gain_adjacent(5, 1, 100., 1e6) <= 1e-6

def test_ergodic_pairing_claims():
    rho = db_to_linear(30.)
    far = ergodic_gain_oracle(5, 1, 5, rho, 5.)
    adjacent = ergodic_gain_adjacent(5, 1, rho, 5.)
    assert far - adjacent > 1.
    assert ergodic_gain_adjacent(5, 4, rho, 5.) > far

def test_ergodic_oracle_matches_monte_carlo():
    rho = db_to_linear(20.)
    result = ergodic_gain_mc(5, 1, 5, rho, 5., trials=300_000, seed=29)
    assert result.agrees_with(ergodic_gain_oracle(5, 1, 5, rho, 5.))

def test_ergodic_mc_needs_trials():
    with pytest.raises(ConfigError):
        ergodic_gain_mc(5, 1, 2, 100., 5., trials=10, seed=0)
