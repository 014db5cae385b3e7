"""
ordered Rayleigh fading: order statistics of M iid unit-mean exponential power gains

gains are kept at unit scale everywhere; the SNR enters the fnoma / crnoma formulas
through explicit rho factors
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import torch
from beartype.typing import Iterator, Tuple
from scipy import special

from .config import ConfigError
from .numerics import DomainError, MAX_EXACT_BINOMIAL_N, binomial_terms, log_factorial_ratio
from .utils import Real, beartype_jit, ceil_div

BLOCK_SIZE = 65536

RNG_DESCRIPTION = (
    f'torch.Generator(cpu, mt19937) per block of {BLOCK_SIZE} trials, '
    'block seed = numpy.random.SeedSequence(seed, spawn_key=(M, block)).generate_state(1, uint64)[0], '
    'gain = -log1p(-U) sorted ascending; trial t is row t % block_size of block t // block_size'
)

# validation

def validate_pair(M, m, n):
    if M < 2:
        raise ConfigError(f'need at least two users, got M={M}')
    if not 1 <= m < n <= M:
        raise ConfigError(f'need 1 <= m < n <= M, got M={M}, m={m}, n={n}')

def validate_user(M, k):
    if M < 1 or not 1 <= k <= M:
        raise ConfigError(f'need 1 <= k <= M, got M={M}, k={k}')

# unit-scale exponential law

def unit_pdf(t):
    return math.exp(-t)

def unit_cdf(t):
    return -math.expm1(-t)

# sampling

@dataclass(frozen=True)
class ChannelDraw:
    gains: np.ndarray
    seed_tag: int

    def __post_init__(self):
        assert self.gains.ndim == 1, 'a draw holds one gain per user'
        assert np.all(self.gains > 0), 'gains must be positive'
        assert np.all(np.diff(self.gains) >= 0), 'gains must be sorted ascending'

    @property
    def M(self):
        return self.gains.shape[0]

    def gain(self, k):
        """1-based ordered gain |h_k|^2"""
        return float(self.gains[k - 1])

def block_seed(seed, M, block):
    if seed < 0:
        raise ConfigError(f'seed must be a nonnegative 64-bit integer, got {seed}')
    sequence = np.random.SeedSequence(seed, spawn_key=(M, block))
    return int(sequence.generate_state(1, np.uint64)[0])

def sample_gain_block(M: int, block: int, seed: int) -> torch.Tensor:
    """all BLOCK_SIZE draws of one block, as a (BLOCK_SIZE, M) float64 tensor sorted along users"""
    if M < 2:
        raise ConfigError(f'need at least two users, got M={M}')
    gen = torch.Generator(device='cpu')
    gen.manual_seed(block_seed(seed, M, block))
    u = torch.rand((BLOCK_SIZE, M), generator=gen, dtype=torch.float64)
    gains = (-torch.log1p(-u)).clamp_min(torch.finfo(torch.float64).tiny)
    return gains.sort(dim=-1).values

def block_span(block, trials):
    """(start, stop) trial indices of a block, clipped to the trial budget"""
    start = block * BLOCK_SIZE
    return start, min(start + BLOCK_SIZE, trials)

def num_blocks(trials):
    return ceil_div(trials, BLOCK_SIZE)

def sample_trials(M: int, block: int, trials: int, seed: int) -> np.ndarray:
    start, stop = block_span(block, trials)
    assert start < stop, f'block {block} lies beyond {trials} trials'
    return sample_gain_block(M, block, seed)[:stop - start].numpy()

@beartype_jit
def sample_ordered_gains(M: int, trials: int, seed: int) -> Iterator[ChannelDraw]:
    """deterministic stream of ordered draws, a function of (seed, M) only"""
    if M < 2:
        raise ConfigError(f'need at least two users, got M={M}')
    if trials < 1:
        raise ConfigError(f'need at least one trial, got {trials}')

    for block in range(num_blocks(trials)):
        start, _ = block_span(block, trials)
        for offset, gains in enumerate(sample_trials(M, block, trials, seed)):
            yield ChannelDraw(gains=gains, seed_tag=start + offset)

# densities

@lru_cache(maxsize=None)
def joint_normalizer(M, m, n):
    return log_factorial_ratio(M, m - 1, n - 1 - m, M - n)

@lru_cache(maxsize=None)
def marginal_normalizer(M, k):
    return log_factorial_ratio(M, k - 1, M - k)

@dataclass(frozen=True)
class OrderPairDensity:
    M: int
    m: int
    n: int

    def __post_init__(self):
        validate_pair(self.M, self.m, self.n)

    @property
    def normalizer(self):
        return joint_normalizer(self.M, self.m, self.n)

    def __call__(self, x, y):
        if x < 0 or x > y:
            return 0.
        M, m, n = self.M, self.m, self.n
        spacing = math.exp(-x) * -math.expm1(x - y)
        return (
            self.normalizer
            * unit_pdf(x) * unit_pdf(y)
            * unit_cdf(x) ** (m - 1)
            * spacing ** (n - 1 - m)
            * math.exp(-y * (M - n))
        )

@beartype_jit
def ordered_joint_pdf(M: int, m: int, n: int, x: Real, y: Real) -> float:
    return OrderPairDensity(M, m, n)(x, y)

@beartype_jit
def ordered_marginal_pdf(M: int, k: int, y: Real) -> float:
    validate_user(M, k)
    if y < 0:
        return 0.
    return marginal_normalizer(M, k) * unit_pdf(y) * unit_cdf(y) ** (k - 1) * math.exp(-y * (M - k))

@beartype_jit
def ordered_marginal_cdf(M: int, k: int, x: Real) -> float:
    """P(|h_k|^2 <= x) as the regularized incomplete beta I_{G(x)}(k, M - k + 1)"""
    validate_user(M, k)
    if x <= 0:
        return 0.
    if math.isinf(x):
        return 1.
    return float(special.betainc(k, M - k + 1, unit_cdf(x)))

@beartype_jit
def ordered_marginal_sf(M: int, k: int, x: Real) -> float:
    """P(|h_k|^2 > x) without the cancellation of 1 - cdf"""
    validate_user(M, k)
    if x <= 0:
        return 1.
    if math.isinf(x):
        return 0.
    return float(special.betainc(M - k + 1, k, math.exp(-x)))

@beartype_jit
def marginal_cdf_binomial_sum(M: int, k: int, x: Real) -> float:
    """the same cdf through its closed binomial-sum expansion"""
    validate_user(M, k)
    if M > MAX_EXACT_BINOMIAL_N:
        raise DomainError(f'binomial-sum cdf refused for M={M} > {MAX_EXACT_BINOMIAL_N}')
    if x <= 0:
        return 0.
    total = 0.
    for term in binomial_terms(k - 1):
        i, = term.indices
        rate = M - k + i + 1
        total += term.signed / rate * -math.expm1(-rate * x)
    return marginal_normalizer(M, k) * total

# ratio of two order statistics

@lru_cache(maxsize=None)
def ratio_terms(M, m, n) -> Tuple[Tuple[float, int, int], ...]:
    """(signed coefficient, tau1, tau2) of the double sum for the density of |h_m|^2 / |h_n|^2"""
    validate_pair(M, m, n)
    normalizer = log_factorial_ratio(M, m - 1, n - m - 1, M - n)
    terms = []
    for outer in binomial_terms(m - 1):
        j1, = outer.indices
        for inner in binomial_terms(n - m - 1):
            j2, = inner.indices
            tau1 = j1 - j2 + n - m
            tau2 = M - n + 1 + j2
            terms.append((normalizer * outer.signed * inner.signed, tau1, tau2))
    return tuple(terms)

@beartype_jit
def ratio_pdf(M: int, m: int, n: int, z: Real) -> float:
    validate_pair(M, m, n)
    if z < 0 or z > 1:
        return 0.
    return sum(coef * (tau2 + tau1 * z) ** -2 for coef, tau1, tau2 in ratio_terms(M, m, n))
