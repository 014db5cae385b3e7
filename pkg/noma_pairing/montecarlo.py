"""
seeded Monte Carlo estimation of every pairing event, the validation oracle for fnoma / crnoma

trial t always uses row t % BLOCK_SIZE of block t // BLOCK_SIZE, so results depend on
(event, trials, seed) only and never on the worker count
"""

import math
from dataclasses import dataclass

import numpy as np
from beartype.typing import Literal, Optional, Tuple, get_args
from joblib import Parallel, delayed
from tqdm import tqdm

from .channel import num_blocks, sample_trials
from .config import ConfigError, PairingConfig
from .crnoma import outage_indicator, strong_user_rates
from .fnoma import noma_rates, oma_rates
from .utils import beartype_jit, exists

MIN_TRIALS = 1000

Variant = Literal[
    'FNomaSumWorse',
    'FNomaGapBelow',
    'UserMGains',
    'UserNGains',
    'UserNLoses',
    'CrOutage',
    'CrErgodicRate',
    'MinGainBelow',
]

# variants whose per-trial value is a real number rather than an indicator
MEAN_VARIANTS = ('CrErgodicRate',)

# types

@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    std_error: float
    trials: int
    seed: int

    def __post_init__(self):
        assert self.trials >= 1, 'an estimate needs at least one trial'
        assert self.std_error >= 0, 'standard error is nonnegative'

    def agrees_with(self, expected, sigmas=3., floor=0.):
        return abs(self.value - expected) <= max(sigmas * self.std_error, floor)

@dataclass(frozen=True)
class EventSpec:
    variant: Variant
    config: PairingConfig
    p: Optional[float] = None

    def __post_init__(self):
        if self.variant not in get_args(Variant):
            raise ConfigError(f'unknown event {self.variant!r}')
        if self.variant == 'MinGainBelow':
            if not (exists(self.p) and 0 < self.p < 1):
                raise ConfigError(f'MinGainBelow needs 0 < p < 1, got {self.p}')

    @property
    def is_mean(self):
        return self.variant in MEAN_VARIANTS

# per-trial evaluation

def evaluate_event(spec: EventSpec, gains: np.ndarray) -> np.ndarray:
    """per-trial indicator (bool) or value (float) for a (trials, M) array of sorted unit gains"""
    cfg = spec.config
    g_m, g_n = gains[:, cfg.m - 1], gains[:, cfg.n - 1]
    rho = cfg.rho

    if spec.variant in ('FNomaSumWorse', 'FNomaGapBelow', 'UserMGains', 'UserNGains', 'UserNLoses'):
        rate_weak, rate_strong = noma_rates(g_m, g_n, cfg.a_n_sq, rho)
        oma_weak, oma_strong = oma_rates(g_m, rho), oma_rates(g_n, rho)

        if spec.variant == 'FNomaSumWorse':
            return rate_weak + rate_strong < oma_weak + oma_strong
        if spec.variant == 'FNomaGapBelow':
            return (rate_weak + rate_strong) - (oma_weak + oma_strong) < cfg.R_gap
        if spec.variant == 'UserMGains':
            return rate_weak > oma_weak
        if spec.variant == 'UserNGains':
            return rate_strong > oma_strong
        return rate_strong < oma_strong

    if spec.variant == 'CrOutage':
        return outage_indicator(g_m, g_n, rho, cfg.I_sinr, cfg.R_target)

    if spec.variant == 'CrErgodicRate':
        return strong_user_rates(g_m, g_n, rho, cfg.I_sinr)

    # the minimum of M unit exponentials is exponential with rate M
    return gains[:, 0] < -math.log1p(-spec.p) / cfg.M

# aggregation

BlockMoments = Tuple[int, float, float]

def block_moments(spec: EventSpec, block: int, trials: int, seed: int) -> BlockMoments:
    """(count, mean, sum of squared deviations) of one block"""
    values = evaluate_event(spec, sample_trials(spec.config.M, block, trials, seed)).astype(np.float64)
    count = values.shape[0]
    mean = float(np.mean(values))
    return count, mean, float(np.sum((values - mean) ** 2))

def combine_moments(a: BlockMoments, b: BlockMoments) -> BlockMoments:
    """pairwise mean / M2 merge"""
    count_a, mean_a, m2_a = a
    count_b, mean_b, m2_b = b
    count = count_a + count_b
    delta = mean_b - mean_a
    mean = mean_a + delta * count_b / count
    m2 = m2_a + m2_b + delta * delta * count_a * count_b / count
    return count, mean, m2

def _finalize(spec, moments, seed) -> ProbabilityEstimate:
    count, mean, m2 = moments
    if spec.is_mean:
        std_error = math.sqrt(m2 / (count - 1) / count) if count > 1 else math.inf
    elif mean in (0., 1.):
        std_error = 1. / count
    else:
        std_error = math.sqrt(mean * (1. - mean) / count)
    return ProbabilityEstimate(value=mean, std_error=std_error, trials=count, seed=seed)

def _reduce(spec, per_block, seed):
    moments = per_block[0]
    for other in per_block[1:]:
        moments = combine_moments(moments, other)
    return _finalize(spec, moments, seed)

def _check(spec, trials, seed):
    if not isinstance(spec, EventSpec):
        raise ConfigError(f'expected an EventSpec, got {type(spec).__name__}')
    if trials < MIN_TRIALS:
        raise ConfigError(f'need at least {MIN_TRIALS} trials, got {trials}')
    if seed < 0:
        raise ConfigError(f'seed must be nonnegative, got {seed}')

# estimation

@beartype_jit
def estimate(spec: EventSpec, trials: int, seed: int, progress: bool = False) -> ProbabilityEstimate:
    _check(spec, trials, seed)
    blocks = range(num_blocks(trials))
    per_block = [
        block_moments(spec, block, trials, seed)
        for block in tqdm(blocks, desc=f'simulating {spec.variant}', disable=not progress)
    ]
    return _reduce(spec, per_block, seed)

@beartype_jit
def estimate_parallel(spec: EventSpec, trials: int, seed: int, workers: int = 1, progress: bool = False) -> ProbabilityEstimate:
    """same bits as estimate(spec, trials, seed) for any worker count"""
    _check(spec, trials, seed)
    if workers < 1:
        raise ConfigError(f'workers must be at least 1, got {workers}')
    if workers == 1:
        return estimate(spec, trials, seed, progress=progress)

    blocks = range(num_blocks(trials))
    per_block = Parallel(n_jobs=workers, prefer='threads')(
        delayed(block_moments)(spec, block, trials, seed)
        for block in tqdm(blocks, desc=f'simulating {spec.variant}', disable=not progress)
    )
    return _reduce(spec, list(per_block), seed)
