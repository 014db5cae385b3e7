"""
cognitive radio inspired NOMA: the strong user is only given the power that keeps
the weak user's sinr at the target I
"""

import math
from dataclasses import dataclass

import numpy as np
from beartype.typing import List, Sequence, Tuple

from .channel import (OrderPairDensity, joint_normalizer, ordered_marginal_cdf, ordered_marginal_pdf,
                      unit_cdf, unit_pdf, validate_pair)
from .config import ConfigError, PairingConfig
from .fnoma import CLAMP_GUARD, LN2, OrderingError
from .numerics import (QuadratureError, binomial_terms, exp_integral_ei, integrate, scaled_abs_tol,
                       scaled_exp1)
from .utils import Real, beartype_jit

# beyond this Ei argument the exponential prefactor is folded into a scaled E1
EI_DIRECT_LIMIT = 500.

# an inner upper limit this far past its lower limit is treated as infinite minus a tail
TAIL_SPAN = 50.

# inner integrals of the region oracle, kept well below the outer tolerance
INNER_REL_TOL = 1e-11

# types

@dataclass(frozen=True)
class PowerPolicyResult:
    a_n_sq: float
    served: bool

    def __post_init__(self):
        assert self.a_n_sq >= 0, 'power share is nonnegative'
        assert self.served == (self.a_n_sq > 0), 'served exactly when the strong user gets power'

@beartype_jit
@dataclass(frozen=True)
class OutageQuery:
    M: int
    m: int
    n: int
    rho: Real
    I_sinr: Real
    R_target: Real

    def __post_init__(self):
        validate_pair(self.M, self.m, self.n)
        if not (self.rho > 0 and self.I_sinr > 0 and self.R_target > 0):
            raise ConfigError(f'rho, I and R must be positive, got rho={self.rho}, I={self.I_sinr}, R={self.R_target}')

    @classmethod
    def from_config(cls, cfg: PairingConfig):
        return cls(M=cfg.M, m=cfg.m, n=cfg.n, rho=cfg.rho, I_sinr=cfg.I_sinr, R_target=cfg.R_target)

    @property
    def b(self):
        return self.I_sinr / self.rho

    @property
    def a(self):
        return 1. + self.I_sinr

    @property
    def eps1(self):
        return (2. ** self.R_target - 1.) / self.rho

    @property
    def closed_form_regime(self):
        return self.b <= self.a * self.eps1

# power policy

def power_coefficients(g_m, rho, I):
    """vectorised power share of the strong user, zero when the weak user cannot reach I"""
    g_m = np.asarray(g_m, dtype=np.float64)
    return np.maximum(0., (g_m - I / rho) / (g_m * (1. + I)))

@beartype_jit
def power_coefficient(g_m: Real, rho: Real, I: Real) -> PowerPolicyResult:
    if not (g_m > 0 and rho > 0 and I > 0):
        raise ConfigError(f'g_m, rho and I must be positive, got g_m={g_m}, rho={rho}, I={I}')
    a_n_sq = float(power_coefficients(g_m, rho, I))
    return PowerPolicyResult(a_n_sq=a_n_sq, served=a_n_sq > 0)

@beartype_jit
def sinr_weak_user(g_m: Real, a_n_sq: Real, rho: Real) -> float:
    if not (g_m > 0 and rho > 0 and 0 <= a_n_sq < 1):
        raise ConfigError(f'need g_m > 0, rho > 0 and 0 <= a_n_sq < 1, got g_m={g_m}, rho={rho}, a_n_sq={a_n_sq}')
    return g_m * (1. - a_n_sq) / (g_m * a_n_sq + 1. / rho)

def strong_user_rates(g_m, g_n, rho, I):
    """vectorised rate of the strong user under the policy"""
    a_n_sq = power_coefficients(g_m, rho, I)
    return np.log1p(a_n_sq * rho * np.asarray(g_n, dtype=np.float64)) / LN2

def outage_indicator(g_m, g_n, rho, I, R):
    return strong_user_rates(g_m, g_n, rho, I) < R

def sum_gains(g_m, g_n, rho, I):
    g_m, g_n = np.asarray(g_m, dtype=np.float64), np.asarray(g_n, dtype=np.float64)
    if np.any(g_m > g_n):
        raise OrderingError('the weak user gain exceeds the strong user gain')
    a_n_sq = power_coefficients(g_m, rho, I)
    return (np.log1p(rho * a_n_sq * g_n) - np.log1p(rho * a_n_sq * g_m)) / LN2

@beartype_jit
def sum_gain(g_m: Real, g_n: Real, rho: Real, I: Real) -> float:
    """sum rate of the pair minus what the weak user gets alone, never negative"""
    if not (g_m > 0 and rho > 0 and I > 0):
        raise ConfigError(f'g_m, rho and I must be positive, got g_m={g_m}, rho={rho}, I={I}')
    return float(sum_gains(g_m, g_n, rho, I))

# outage of the strong user

def _clamp(value, label):
    if not -CLAMP_GUARD <= value <= 1. + CLAMP_GUARD:
        raise QuadratureError(f'{label} probability {value:.12g} outside [0, 1]', estimate=value, term=label)
    return min(max(value, 0.), 1.)

@beartype_jit
def outage_exact(q: OutageQuery) -> float:
    """
    P(log2(1 + a_n^2 rho |h_n|^2) < R)

    the weak-user strip P(|h_m|^2 < b) plus three integrals over the strong gain y:
        [b, a eps1]              every weak gain in (b, y) is an outage
        [a eps1, b + a eps1]     likewise
        [b + a eps1, inf)        weak gains in (b, b y / (y - a eps1))
    falls back to the region oracle when b > a eps1
    """
    if not q.closed_form_regime:
        return outage_region_oracle(q)

    M, m, n = q.M, q.m, q.n
    b, a_eps1 = q.b, q.a * q.eps1
    norm = joint_normalizer(M, m, n)
    G_b = unit_cdf(b)
    inner_terms = binomial_terms(n - 1 - m)

    def integrand(weak_upper):
        def inner(y):
            G_y, G_x = unit_cdf(y), unit_cdf(weak_upper(y))
            total = 0.
            for term in inner_terms:
                i, = term.indices
                total += term.signed * G_y ** (n - 1 - m - i) * (G_x ** (m + i) - G_b ** (m + i)) / (m + i)
            return norm * unit_pdf(y) * math.exp(-y * (M - n)) * total
        return inner

    whole_strip = integrand(lambda y: y)
    partial_strip = integrand(lambda y: b * y / (y - a_eps1))

    pieces = [
        ('outage strong gain below a*eps1', whole_strip, b, a_eps1),
        ('outage strong gain up to b + a*eps1', whole_strip, a_eps1, b + a_eps1),
        ('outage strong gain above b + a*eps1', partial_strip, b + a_eps1, math.inf),
    ]

    total = ordered_marginal_cdf(M, m, b)
    for label, f, lower, upper in pieces:
        if not lower < upper:
            continue
        try:
            total += integrate(f, lower, upper, abs_tol=scaled_abs_tol(total)).value
        except QuadratureError as err:
            raise err.with_term(label) from err

    return _clamp(total, 'outage')

def _strong_gain_limit(x, b, a_eps1):
    """largest strong gain still in outage for weak gain x > b"""
    return a_eps1 * x / (x - b)

def _inner_integral(f, lower, upper, scale):
    """integral of f over [lower, upper] to INNER_REL_TOL of `scale`, the value over [lower, inf)"""
    tol = dict(abs_tol=scaled_abs_tol(scale, INNER_REL_TOL), rel_tol=INNER_REL_TOL)
    if math.isinf(upper) or upper - lower > TAIL_SPAN:
        whole = integrate(f, lower, math.inf, **tol).value
        if math.isinf(upper):
            return whole
        return whole - integrate(f, upper, math.inf, **tol).value
    return integrate(f, lower, upper, **tol).value

@beartype_jit
def outage_region_oracle(q: OutageQuery) -> float:
    """iterated quadrature of the joint density over the outage region, valid for any b, a eps1"""
    M, m = q.M, q.m
    density = OrderPairDensity(M, m, q.n)
    b, a_eps1 = q.b, q.a * q.eps1

    def unserved(x):
        return _inner_integral(lambda y: density(x, y), x, math.inf, ordered_marginal_pdf(M, m, x))

    def served(x):
        upper = _strong_gain_limit(x, b, a_eps1)
        if not upper > x:
            return 0.
        return _inner_integral(lambda y: density(x, y), x, upper, ordered_marginal_pdf(M, m, x))

    try:
        strip = integrate(unserved, 0., b, abs_tol=scaled_abs_tol(ordered_marginal_cdf(M, m, b))).value
        region = integrate(served, b, b + a_eps1, abs_tol=scaled_abs_tol(strip)).value
    except QuadratureError as err:
        raise err.with_term('outage region oracle') from err

    return _clamp(strip + region, 'outage oracle')

# ergodic rate of the strong user

def _check_ergodic_args(rho, I):
    if not (rho > 0 and I > 0):
        raise ConfigError(f'rho and I must be positive, got rho={rho}, I={I}')

@beartype_jit
def ergodic_gain_adjacent(M: int, m: int, rho: Real, I: Real) -> float:
    """E{R_n} for n = m + 1 as a single quadrature over the weak gain, with the inner expectation in exponential integrals"""
    n = m + 1
    validate_pair(M, m, n)
    _check_ergodic_args(rho, I)

    k = M - n + 1
    norm = joint_normalizer(M, m, n)
    b, a = I / rho, 1. + I

    def integrand(x):
        if x <= b:
            return 0.
        offset = x * a / (rho * (x - b))
        z = k * (x + offset)
        log_term = math.log1p((x - b) * rho / a) / LN2 * math.exp(-k * x)
        if z <= EI_DIRECT_LIMIT:
            ei_term = -math.exp(k * offset) * exp_integral_ei(-z) / LN2
        else:
            ei_term = math.exp(-k * x) * scaled_exp1(z) / LN2
        return norm / k * unit_pdf(x) * unit_cdf(x) ** (m - 1) * (log_term + ei_term)

    try:
        return integrate(integrand, b, math.inf).value
    except QuadratureError as err:
        raise err.with_term('adjacent ergodic rate') from err

@beartype_jit
def ergodic_gain_oracle(M: int, m: int, n: int, rho: Real, I: Real) -> float:
    """E{R_n} for any n > m by iterated quadrature of the joint density"""
    validate_pair(M, m, n)
    _check_ergodic_args(rho, I)
    density = OrderPairDensity(M, m, n)
    b = I / rho

    def outer(x):
        a_n_sq = float(power_coefficients(x, rho, I))
        if a_n_sq == 0.:
            return 0.
        rate = lambda y: math.log1p(a_n_sq * rho * y) / LN2 * density(x, y)
        return integrate(rate, x, math.inf).value

    try:
        return integrate(outer, b, math.inf).value
    except QuadratureError as err:
        raise err.with_term('ergodic rate oracle') from err

@beartype_jit
def ergodic_gain_mc(M: int, m: int, n: int, rho: Real, I: Real, trials: int, seed: int, workers: int = 1):
    """Monte Carlo mean of R_n with its standard error"""
    from .montecarlo import EventSpec, estimate_parallel

    validate_pair(M, m, n)
    if trials < 1000:
        raise ConfigError(f'ergodic rate estimates need at least 1000 trials, got {trials}')
    cfg = PairingConfig(M=M, m=m, n=n, rho=float(rho), I_sinr=float(I))
    return estimate_parallel(EventSpec('CrErgodicRate', cfg), trials=trials, seed=seed, workers=workers)

# diversity order

@beartype_jit
def top_decade(points: Sequence[Tuple[Real, Real]]) -> List[Tuple[Real, Real]]:
    """the points within one decade of the largest snr"""
    assert len(points) > 0, 'no points given'
    rho_max = max(rho for rho, _ in points)
    return [(rho, p) for rho, p in points if rho >= rho_max / 10. * (1. - 1e-12)]

@beartype_jit
def diversity_slope(points: Sequence[Tuple[Real, Real]]) -> float:
    """negated least squares slope of log10 P against log10 rho"""
    if len(points) < 3:
        raise ConfigError(f'need at least 3 points to fit a slope, got {len(points)}')
    for index, (rho, p) in enumerate(points):
        if not p > 0:
            raise ConfigError(f'point {index} has nonpositive probability {p}')
        if not rho > 0:
            raise ConfigError(f'point {index} has nonpositive snr {rho}')

    rhos = np.array([rho for rho, _ in points], dtype=np.float64)
    probs = np.array([p for _, p in points], dtype=np.float64)
    if rhos.max() / rhos.min() < 10. * (1. - 1e-12):
        raise ConfigError('points must span at least 10 dB of snr')

    slope, _ = np.polyfit(np.log10(rhos), np.log10(probs), 1)
    return -float(slope)
