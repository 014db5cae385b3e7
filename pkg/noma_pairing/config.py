import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from beartype.typing import List, Literal, Optional

from .utils import Real, beartype_jit, db_grid, db_to_linear, exists, linear_to_db

PRESET_DIR = Path(__file__).resolve().parent.parent / 'configs' / 'presets'

METRICS = (
    'fnoma_sum_worse',
    'fnoma_gap_below',
    'fnoma_user_m_gains',
    'fnoma_user_n_gains',
    'fnoma_user_n_loses',
    'crnoma_outage',
    'crnoma_ergodic',
)

SweepVariable = Literal['rho_db', 'm', 'n', 'R_gap']
OutputFormat = Literal['csv', 'json']

# keys written into result metadata that are not part of a sweep config
PROVENANCE_KEYS = ('tool_version', 'timestamp', 'rng', 'diversity_slope')


class ConfigError(ValueError):
    pass


@dataclass
class PairingConfig:
    """
    scenario for one pair of ordered users m < n out of M
        rho: transmit snr, linear
        a_n_sq: fixed power share of the stronger user (F-NOMA)
        R_gap: targeted sum rate gain over orthogonal access, bits per channel use
        R_target: target rate of the strong user for outage (CR-NOMA)
        I_sinr: sinr the weak user is guaranteed under CR-NOMA, linear
    """
    M: int
    m: int
    n: int
    rho: float
    a_n_sq: float = 0.2
    R_gap: float = 1.0
    R_target: float = 1.0
    I_sinr: float = 5.0

    def __post_init__(self):
        if self.M < 2:
            raise ConfigError(f'need at least two users, got M={self.M}')
        if not 1 <= self.m < self.n <= self.M:
            raise ConfigError(f'need 1 <= m < n <= M, got M={self.M}, m={self.m}, n={self.n}')
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ConfigError(f'rho must be positive and finite, got {self.rho}')
        if not 0 < self.a_n_sq <= 0.5:
            raise ConfigError(f'the stronger user gets at most half the power: need 0 < a_n_sq <= 1/2, got {self.a_n_sq}')
        if self.R_gap < 0:
            raise ConfigError(f'R_gap must be nonnegative, got {self.R_gap}')
        if not self.R_target > 0:
            raise ConfigError(f'R_target must be positive, got {self.R_target}')
        if not self.I_sinr > 0:
            raise ConfigError(f'I_sinr must be positive, got {self.I_sinr}')

    @classmethod
    def from_db(cls, rho_db, **kwargs):
        return cls(rho=db_to_linear(rho_db), **kwargs)

    @property
    def rho_db(self):
        return linear_to_db(self.rho)

    @property
    def a_m_sq(self):
        return 1. - self.a_n_sq


@beartype_jit
@dataclass
class SweepSpec:
    metric: str
    M: int = 5
    m: int = 1
    n: int = 2
    an2: Real = 0.2
    I: Real = 5.0
    rate_bpcu: Real = 1.0
    R_gap: Real = 1.0
    rho_db: Real = 20.0
    sweep_var: SweepVariable = 'rho_db'
    rho_start_db: Real = 0.0
    rho_stop_db: Real = 40.0
    rho_step_db: Real = 5.0
    sweep_values: Optional[List[Real]] = None
    series_var: Optional[SweepVariable] = None
    series_values: Optional[List[Real]] = None
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    format: OutputFormat = 'csv'
    out: Optional[str] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ConfigError(f'unknown metric {self.metric!r}, choose one of {", ".join(METRICS)}')
        if self.sweep_var == 'rho_db':
            if not self.rho_step_db > 0:
                raise ConfigError(f'rho step must be positive, got {self.rho_step_db}')
            if self.rho_start_db > self.rho_stop_db:
                raise ConfigError(f'rho range start {self.rho_start_db} exceeds stop {self.rho_stop_db}')
        elif not self.sweep_values:
            raise ConfigError(f'sweeping {self.sweep_var} needs a nonempty sweep_values list')
        if exists(self.series_var):
            if self.series_var == self.sweep_var:
                raise ConfigError('the series variable must differ from the swept variable')
            if not self.series_values:
                raise ConfigError(f'series over {self.series_var} needs a nonempty series_values list')
        if self.trials < 0:
            raise ConfigError(f'trials must be nonnegative, got {self.trials}')
        if self.workers < 1:
            raise ConfigError(f'workers must be at least 1, got {self.workers}')
        if self.seed < 0:
            raise ConfigError(f'seed must be nonnegative, got {self.seed}')

    def grid(self):
        if self.sweep_var == 'rho_db':
            return db_grid(self.rho_start_db, self.rho_stop_db, self.rho_step_db)
        return list(self.sweep_values)

    def series(self):
        return list(self.series_values) if exists(self.series_var) else [None]

    def pairing_config(self, **overrides) -> PairingConfig:
        """the pairing scenario at one (series, grid) point; integer variables are cast back"""
        values = dict(M=self.M, m=self.m, n=self.n, rho_db=self.rho_db, R_gap=self.R_gap)
        for key, value in overrides.items():
            values[key] = int(value) if key in ('M', 'm', 'n') else float(value)
        return PairingConfig.from_db(
            values['rho_db'],
            M=values['M'],
            m=values['m'],
            n=values['n'],
            a_n_sq=self.an2,
            R_gap=values['R_gap'],
            R_target=self.rate_bpcu,
            I_sinr=self.I,
        )

    def to_dict(self):
        return asdict(self)

# loading

def _sweep_spec_from_dict(config: dict) -> SweepSpec:
    config = {key: value for key, value in config.items() if key not in PROVENANCE_KEYS}
    known = {field.name for field in fields(SweepSpec)}
    unknown = sorted(set(config) - known)
    if unknown:
        raise ConfigError(f'unknown sweep config keys: {", ".join(unknown)}')
    if 'metric' not in config:
        raise ConfigError('sweep config needs a metric')
    return SweepSpec(**config)

@beartype_jit
def load_sweep_config(config_path: str) -> SweepSpec:
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f'config file does not exist at {str(path)}')
    with open(path, 'r') as f:
        try:
            config = json.load(f)
        except json.JSONDecodeError as err:
            raise ConfigError(f'config file {str(path)} is not valid json: {err}') from err

    if not isinstance(config, dict):
        raise ConfigError(f'config file {str(path)} must hold a flat json object')
    return _sweep_spec_from_dict(config)

def _check_preset_dir(preset_dir):
    if not preset_dir.is_dir():
        raise ConfigError(f'preset directory {str(preset_dir)} not found, presets ship with the repository (install with pip install -e .)')

def preset_names(preset_dir: Path = PRESET_DIR):
    _check_preset_dir(preset_dir)
    return sorted(path.stem for path in preset_dir.glob('*.json'))

@beartype_jit
def load_preset(name: str, preset_dir: Path = PRESET_DIR) -> SweepSpec:
    path = preset_dir / f'{name}.json'
    if not path.exists():
        raise ConfigError(f'unknown preset {name!r}, available presets: {", ".join(preset_names(preset_dir))}')
    return load_sweep_config(str(path))
