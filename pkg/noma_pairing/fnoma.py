"""
NOMA with a fixed power split between the paired users, compared against
orthogonal access (each user gets half of the resource)

rates are in bits per channel use throughout
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from beartype.typing import Literal, Tuple

from .channel import (joint_normalizer, marginal_normalizer, ordered_marginal_cdf,
                      ordered_marginal_sf, ratio_terms, validate_pair, validate_user)
from .config import ConfigError, PairingConfig
from .numerics import DEFAULT_ABS_TOL, QuadratureError, binomial_terms, integrate, scaled_abs_tol
from .utils import Real, beartype_jit

LN2 = math.log(2.)

# raw exact probabilities may stray this far outside [0, 1] before it is treated as a failure
CLAMP_GUARD = 1e-9

Mode = Literal['exact', 'highsnr']
Scheme = Literal['NOMA', 'OMA']


class OrderingError(ValueError):
    pass

# types

@dataclass(frozen=True)
class RatePair:
    rate_weak: float
    rate_strong: float
    scheme: Scheme = 'NOMA'

    def __post_init__(self):
        for rate in (self.rate_weak, self.rate_strong):
            assert rate >= 0 and math.isfinite(rate), f'rates must be finite and nonnegative, got {rate}'

    @property
    def sum_rate(self):
        return self.rate_weak + self.rate_strong

@dataclass(frozen=True)
class PairingConstants:
    """
    constants shared by the closed forms
        joint_norm          M! / ((m-1)! (n-1-m)! (M-n)!)
        sum_threshold       (1 - 2 a_n^2) / a_n^4, the rho-scaled sum rate crossover
        strong_norm         M! / ((n-1)! (M-n)!)
        sum_threshold_root  sqrt(1 + sum_threshold) - 1
        weak_norm           M! / ((m-1)! (M-m)!)
        outage_gain         (2^R - 1) / rho
        qos_gain            I / rho, below which the weak user takes all the power
        qos_scale           1 + I
    """
    joint_norm: float
    sum_threshold: float
    strong_norm: float
    sum_threshold_root: float
    weak_norm: float
    outage_gain: float
    qos_gain: float
    qos_scale: float

    def __post_init__(self):
        assert self.sum_threshold >= 0, 'threshold is nonnegative for a_n^2 <= 1/2'
        assert 0 <= self.sum_threshold_root <= self.sum_threshold, 'threshold root lies in [0, threshold]'
        assert self.outage_gain > 0 and self.qos_gain > 0 and self.qos_scale > 1

    @property
    def qos_regime(self):
        """True when qos_gain <= qos_scale * outage_gain, the case the closed outage form covers"""
        return self.qos_gain <= self.qos_scale * self.outage_gain

def sum_threshold(a_n_sq):
    return (1. - 2. * a_n_sq) / a_n_sq ** 2

@beartype_jit
def pairing_constants(cfg: PairingConfig) -> PairingConstants:
    M, m, n = cfg.M, cfg.m, cfg.n
    threshold = sum_threshold(cfg.a_n_sq)
    return PairingConstants(
        joint_norm=joint_normalizer(M, m, n),
        sum_threshold=threshold,
        strong_norm=marginal_normalizer(M, n),
        sum_threshold_root=math.sqrt(1. + threshold) - 1.,
        weak_norm=marginal_normalizer(M, m),
        outage_gain=(2. ** cfg.R_target - 1.) / cfg.rho,
        qos_gain=cfg.I_sinr / cfg.rho,
        qos_scale=1. + cfg.I_sinr,
    )

# rates

def noma_rates(g_m, g_n, a_n_sq, rho):
    """vectorised rates of the weak and strong user; a_n_sq may vary per draw"""
    g_m, g_n, a_n_sq = np.asarray(g_m, dtype=np.float64), np.asarray(g_n, dtype=np.float64), np.asarray(a_n_sq, dtype=np.float64)
    if np.any(g_m > g_n):
        raise OrderingError('the weak user gain exceeds the strong user gain, successive interference cancellation order violated')
    rate_weak = np.log1p(g_m * (1. - a_n_sq) / (g_m * a_n_sq + 1. / rho)) / LN2
    rate_strong = np.log1p(rho * a_n_sq * g_n) / LN2
    return rate_weak, rate_strong

def oma_rates(g, rho):
    return 0.5 * np.log1p(rho * np.asarray(g, dtype=np.float64)) / LN2

@beartype_jit
def noma_rate_pair(g_m: Real, g_n: Real, a_n_sq: Real, rho: Real) -> RatePair:
    if not (g_m > 0 and rho > 0):
        raise ConfigError(f'gains and rho must be positive, got g_m={g_m}, rho={rho}')
    if not 0 <= a_n_sq <= 0.5:
        raise ConfigError(f'need 0 <= a_n_sq <= 1/2, got {a_n_sq}')
    rate_weak, rate_strong = noma_rates(g_m, g_n, a_n_sq, rho)
    return RatePair(float(rate_weak), float(rate_strong), scheme='NOMA')

@beartype_jit
def oma_rate(g: Real, rho: Real) -> float:
    if not (g > 0 and rho > 0):
        raise ConfigError(f'gain and rho must be positive, got g={g}, rho={rho}')
    return float(oma_rates(g, rho))

@beartype_jit
def oma_rate_pair(g_m: Real, g_n: Real, rho: Real) -> RatePair:
    return RatePair(oma_rate(g_m, rho), oma_rate(g_n, rho), scheme='OMA')

# sum rate against orthogonal access
# the rho-scaled gains x = rho |h_m|^2, y = rho |h_n|^2 beat orthogonal access iff x + y + xy > threshold

def _scaled_pdf(t, rho):
    return math.exp(-t / rho) / rho

def _scaled_cdf(t, rho):
    return -math.expm1(-t / rho)

def _crossover(y, threshold):
    """weak gain on the sum rate crossover curve for a strong gain y"""
    return (threshold - y) / (1. + y)

def _check_sum_rate_cfg(cfg):
    validate_pair(cfg.M, cfg.m, cfg.n)

@beartype_jit
def sum_rate_terms(cfg: PairingConfig) -> Tuple[float, float]:
    """
    (Q1, Q2) with P(F-NOMA sum rate better) = Q1 + Q2
        Q2 = P(y > threshold), closed binomial sum
        Q1 = P(x + y + xy > threshold, x < y < threshold), one quadrature over y
    """
    _check_sum_rate_cfg(cfg)
    M, m, n, rho = cfg.M, cfg.m, cfg.n, cfg.rho
    c = pairing_constants(cfg)
    threshold, root = c.sum_threshold, c.sum_threshold_root

    q2 = sum(
        term.signed * c.strong_norm / (M - n + j + 1) * math.exp(-(M - n + j + 1) * threshold / rho)
        for term in binomial_terms(n - 1)
        for j in term.indices
    )

    if threshold == 0.:
        return 0., q2

    inner_terms = binomial_terms(n - 1 - m)

    def integrand(y):
        F_y, F_u = _scaled_cdf(y, rho), _scaled_cdf(_crossover(y, threshold), rho)
        total = 0.
        for term in inner_terms:
            i, = term.indices
            total += term.signed / (m + i) * F_y ** (n - 1 - m - i) * (F_y ** (m + i) - F_u ** (m + i))
        return c.joint_norm * _scaled_pdf(y, rho) * (1. - F_y) ** (M - n) * total

    try:
        q1 = integrate(integrand, root, threshold, abs_tol=scaled_abs_tol(1. - q2, DEFAULT_ABS_TOL)).value
    except QuadratureError as err:
        raise err.with_term('sum rate Q1') from err

    return q1, q2

@beartype_jit
def p_sum_worse_exact(cfg: PairingConfig) -> float:
    """
    P(R_m + R_n < R̄_m + R̄_n)

    evaluated as P(y < threshold_root) + P(threshold_root < y < threshold, x < crossover(y)),
    which equals 1 - Q1 - Q2 without its cancellation once the probability is tiny
    """
    _check_sum_rate_cfg(cfg)
    M, m, n, rho = cfg.M, cfg.m, cfg.n, cfg.rho
    c = pairing_constants(cfg)
    threshold, root = c.sum_threshold, c.sum_threshold_root

    if threshold == 0.:
        return 0.

    below_root = ordered_marginal_cdf(M, n, root / rho)
    inner_terms = binomial_terms(n - 1 - m)

    def integrand(y):
        F_y, F_u = _scaled_cdf(y, rho), _scaled_cdf(_crossover(y, threshold), rho)
        total = 0.
        for term in inner_terms:
            i, = term.indices
            total += term.signed / (m + i) * F_y ** (n - 1 - m - i) * F_u ** (m + i)
        return c.joint_norm * _scaled_pdf(y, rho) * (1. - F_y) ** (M - n) * total

    try:
        region = integrate(integrand, root, threshold, abs_tol=scaled_abs_tol(below_root, DEFAULT_ABS_TOL)).value
    except QuadratureError as err:
        raise err.with_term('sum rate worse region') from err

    worse = below_root + region

    q1, q2 = sum_rate_terms(cfg)
    raw = 1. - q1 - q2
    if not -CLAMP_GUARD <= raw <= 1. + CLAMP_GUARD or abs(raw - worse) > CLAMP_GUARD:
        raise QuadratureError(
            f'sum rate probability inconsistent: 1 - Q1 - Q2 = {raw:.12g}, direct region = {worse:.12g}',
            estimate=worse,
            term='sum rate complement',
        )

    return min(max(worse, 0.), 1.)

@beartype_jit
def p_sum_better_exact(cfg: PairingConfig) -> float:
    return 1. - p_sum_worse_exact(cfg)

@lru_cache(maxsize=None)
def sum_rate_constant(M: int, m: int, n: int, a_n_sq: float) -> float:
    """the snr-free integral constant of the high snr approximation"""
    validate_pair(M, m, n)
    threshold = sum_threshold(a_n_sq)
    root = math.sqrt(1. + threshold) - 1.
    if threshold == 0.:
        return 0.

    inner_terms = binomial_terms(n - 1 - m)

    def integrand(y):
        u = _crossover(y, threshold)
        total = 0.
        for term in inner_terms:
            i, = term.indices
            total += term.signed / (m + i) * y ** (n - 1 - m - i) * (y ** (m + i) - u ** (m + i))
        return total

    try:
        return integrate(integrand, root, threshold).value
    except QuadratureError as err:
        raise err.with_term('high snr sum rate constant') from err

@beartype_jit
def p_sum_worse_highsnr(cfg: PairingConfig) -> float:
    """asymptotic (unclamped) form, proportional to rho^-n; may exceed 1 at low snr"""
    _check_sum_rate_cfg(cfg)
    c = pairing_constants(cfg)
    n = cfg.n
    constant = sum_rate_constant(cfg.M, cfg.m, n, float(cfg.a_n_sq))
    return (c.strong_norm * c.sum_threshold ** n / n - c.joint_norm * constant) / cfg.rho ** n

# sum rate gap, high snr limit

def _gap_term(coef, tau1, tau2, shrink):
    if tau1 == 0:
        return coef * (1. - shrink) / tau2 ** 2
    return coef / tau1 * (1. / (tau2 + shrink * tau1) - 1. / (tau2 + tau1))

@beartype_jit
def p_gap_below_asymptotic(M: int, m: int, n: int, R_gap: Real) -> float:
    """rho -> infinity limit of P(R_m + R_n - R̄_m - R̄_n < R_gap), i.e. P(|h_m|^2 / |h_n|^2 > 2^(-2 R_gap))"""
    validate_pair(M, m, n)
    if R_gap < 0:
        raise ConfigError(f'R_gap must be nonnegative, got {R_gap}')
    if math.isinf(R_gap):
        return 1.

    shrink = 2. ** (-2. * R_gap)
    value = sum(_gap_term(coef, tau1, tau2, shrink) for coef, tau1, tau2 in ratio_terms(M, m, n))
    assert -CLAMP_GUARD <= value <= 1. + CLAMP_GUARD, f'gap probability {value} outside [0, 1]'
    return min(max(value, 0.), 1.)

# individual rates

def _check_power_share(a_n_sq):
    if not 0 < a_n_sq <= 0.5:
        raise ConfigError(f'need 0 < a_n_sq <= 1/2, got {a_n_sq}')

def individual_threshold(a_n_sq, rho):
    """unit-scale gain at which NOMA and orthogonal access give a user the same rate"""
    return sum_threshold(a_n_sq) / rho

@beartype_jit
def p_user_m_gains(M: int, m: int, a_n_sq: Real, rho: Real, mode: Mode = 'exact') -> float:
    """P(R_m > R̄_m) = P(|h_m|^2 < (1 - 2 a_n^2) / (rho a_n^4)), decaying as rho^-m"""
    validate_user(M, m)
    _check_power_share(a_n_sq)
    t = individual_threshold(a_n_sq, rho)
    if t == 0.:
        return 0.
    if mode == 'exact':
        return ordered_marginal_cdf(M, m, t)
    return marginal_normalizer(M, m) * (1. - 2. * a_n_sq) ** m / (m * rho ** m * a_n_sq ** (2 * m))

@beartype_jit
def p_user_n_loses(M: int, n: int, a_n_sq: Real, rho: Real, mode: Mode = 'exact') -> float:
    """P(R_n < R̄_n) = P(|h_n|^2 < (1 - 2 a_n^2) / (rho a_n^4))"""
    validate_user(M, n)
    _check_power_share(a_n_sq)
    t = individual_threshold(a_n_sq, rho)
    if t == 0.:
        return 0.
    if mode == 'exact':
        return ordered_marginal_cdf(M, n, t)
    return marginal_normalizer(M, n) * (1. - 2. * a_n_sq) ** n / (n * rho ** n * a_n_sq ** (2 * n))

@beartype_jit
def p_user_n_gains(M: int, n: int, a_n_sq: Real, rho: Real, mode: Mode = 'exact') -> float:
    """P(R_n > R̄_n), tends to 1 with snr"""
    validate_user(M, n)
    _check_power_share(a_n_sq)
    t = individual_threshold(a_n_sq, rho)
    if t == 0.:
        return 1.
    if mode == 'exact':
        return ordered_marginal_sf(M, n, t)
    return 1. - p_user_n_loses(M, n, a_n_sq, rho, mode='highsnr')
