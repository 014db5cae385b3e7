import csv
import io
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from beartype.typing import Callable, Dict, List, Optional
from tqdm import tqdm

from . import __version__
from .channel import RNG_DESCRIPTION
from .config import ConfigError, PairingConfig, SweepSpec
from .crnoma import (OutageQuery, diversity_slope, ergodic_gain_adjacent, ergodic_gain_oracle,
                     outage_exact, top_decade)
from .fnoma import (p_gap_below_asymptotic, p_sum_worse_exact, p_sum_worse_highsnr,
                    p_user_m_gains, p_user_n_gains, p_user_n_loses, pairing_constants)
from .montecarlo import EventSpec, estimate_parallel
from .numerics import DomainError, QuadratureError
from .utils import beartype_jit, db_to_linear, exists, print_diagnostic

VALUE_FORMAT = '.10g'


class SweepPointError(RuntimeError):
    """a grid point failed; carries the point and the underlying error"""
    def __init__(self, point, cause):
        self.point = point
        self.cause = cause
        where = ', '.join(f'{key}={value}' for key, value in point.items())
        super().__init__(f'sweep point {where} failed: {cause}')

# metric registry

@dataclass(frozen=True)
class Metric:
    name: str
    event: Optional[str] = None
    analytic: Optional[Callable[[PairingConfig], float]] = None
    highsnr: Optional[Callable[[PairingConfig], float]] = None

def _ergodic_rate(cfg: PairingConfig) -> float:
    if cfg.n == cfg.m + 1:
        return ergodic_gain_adjacent(cfg.M, cfg.m, cfg.rho, cfg.I_sinr)
    return ergodic_gain_oracle(cfg.M, cfg.m, cfg.n, cfg.rho, cfg.I_sinr)

METRIC_REGISTRY: Dict[str, Metric] = {
    metric.name: metric for metric in (
        Metric(
            'fnoma_sum_worse',
            event='FNomaSumWorse',
            analytic=p_sum_worse_exact,
            highsnr=p_sum_worse_highsnr,
        ),
        Metric(
            'fnoma_gap_below',
            event='FNomaGapBelow',
            highsnr=lambda cfg: p_gap_below_asymptotic(cfg.M, cfg.m, cfg.n, cfg.R_gap),
        ),
        Metric(
            'fnoma_user_m_gains',
            event='UserMGains',
            analytic=lambda cfg: p_user_m_gains(cfg.M, cfg.m, cfg.a_n_sq, cfg.rho),
            highsnr=lambda cfg: p_user_m_gains(cfg.M, cfg.m, cfg.a_n_sq, cfg.rho, mode='highsnr'),
        ),
        Metric(
            'fnoma_user_n_gains',
            event='UserNGains',
            analytic=lambda cfg: p_user_n_gains(cfg.M, cfg.n, cfg.a_n_sq, cfg.rho),
            highsnr=lambda cfg: p_user_n_gains(cfg.M, cfg.n, cfg.a_n_sq, cfg.rho, mode='highsnr'),
        ),
        Metric(
            'fnoma_user_n_loses',
            event='UserNLoses',
            analytic=lambda cfg: p_user_n_loses(cfg.M, cfg.n, cfg.a_n_sq, cfg.rho),
            highsnr=lambda cfg: p_user_n_loses(cfg.M, cfg.n, cfg.a_n_sq, cfg.rho, mode='highsnr'),
        ),
        Metric(
            'crnoma_outage',
            event='CrOutage',
            analytic=lambda cfg: outage_exact(OutageQuery.from_config(cfg)),
        ),
        Metric(
            'crnoma_ergodic',
            event='CrErgodicRate',
            analytic=_ergodic_rate,
        ),
    )
}

def get_metric(name) -> Metric:
    if name not in METRIC_REGISTRY:
        raise ConfigError(f'unknown metric {name!r}, choose one of {", ".join(METRIC_REGISTRY)}')
    return METRIC_REGISTRY[name]

# evaluation of one point

def evaluate_metric(metric: Metric, cfg: PairingConfig, trials=0, seed=0, workers=1, highsnr=True, progress=False):
    """the analytic, high snr and Monte Carlo values that apply, keyed by column name"""
    values = dict()
    if exists(metric.analytic):
        values['analytic'] = metric.analytic(cfg)
    if highsnr and exists(metric.highsnr):
        values['analytic_highsnr'] = metric.highsnr(cfg)
    if trials > 0 and exists(metric.event):
        result = estimate_parallel(EventSpec(metric.event, cfg), trials=trials, seed=seed, workers=workers, progress=progress)
        values['mc'] = result.value
        values['mc_stderr'] = result.std_error
    return values

def point_constants(cfg: PairingConfig):
    constants = asdict(pairing_constants(cfg))
    constants.update(
        varpi1=constants['joint_norm'],
        varpi2=constants['sum_threshold'],
        varpi3=constants['strong_norm'],
        varpi4=constants['sum_threshold_root'],
        varpi5=constants['weak_norm'],
        b=constants['qos_gain'],
        a=constants['qos_scale'],
        eps1=constants['outage_gain'],
        qos_regime=pairing_constants(cfg).qos_regime,
    )
    return constants

@beartype_jit
def run_point(metric_name: str, cfg: PairingConfig, trials: int = 0, seed: int = 0, workers: int = 1, highsnr: bool = False) -> dict:
    """single evaluation, with every intermediate constant echoed"""
    metric = get_metric(metric_name)
    values = evaluate_metric(metric, cfg, trials=trials, seed=seed, workers=workers, highsnr=highsnr)
    if not values:
        raise ConfigError(f'{metric_name} has no finite snr closed form, request the high snr value or Monte Carlo trials')

    headline = next(values[key] for key in ('analytic', 'analytic_highsnr', 'mc') if key in values)
    config = asdict(cfg)
    config['rho_db'] = cfg.rho_db
    return dict(
        metric=metric_name,
        value=headline,
        **values,
        config=config,
        constants=point_constants(cfg),
        trials=trials,
        seed=seed,
        tool_version=__version__,
    )

# sweeps

@dataclass
class SweepResult:
    columns: List[str]
    rows: List[dict]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            assert set(row) == set(self.columns), 'every row carries every column'

    def to_csv_string(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format(row[column], VALUE_FORMAT) for column in self.columns])
        return buffer.getvalue()

    def to_json_string(self):
        return json.dumps(dict(metadata=self.metadata, columns=self.columns, rows=self.rows), indent=2) + '\n'

    def write(self, path, format='csv'):
        path = Path(path)
        if format == 'csv':
            path.write_text(self.to_csv_string())
            Path(f'{path}.meta.json').write_text(json.dumps(self.metadata, indent=2) + '\n')
        elif format == 'json':
            path.write_text(self.to_json_string())
        else:
            raise ConfigError(f'unknown output format {format!r}')

def _fit_diversity(spec: SweepSpec, rows):
    """slope of the analytic outage over the top decade of the snr grid, per series"""
    slopes = []
    for series in spec.series():
        points = [
            (db_to_linear(row['rho_db']), row['analytic'])
            for row in rows
            if not exists(spec.series_var) or row[spec.series_var] == series
        ]
        try:
            slope = diversity_slope(top_decade(points))
        except ConfigError as err:
            print_diagnostic(f'no diversity slope for series {series}: {err}')
            continue
        slopes.append(dict(series=series, slope=slope))
        label = f'{spec.series_var}={series}' if exists(spec.series_var) else spec.metric
        print_diagnostic(f'diversity slope {label}: {slope:.4f}')
    return slopes

@beartype_jit
def run_sweep(spec: SweepSpec, progress: bool = True) -> SweepResult:
    """evaluate every (series, grid) point, in order, then emit the table once"""
    metric = get_metric(spec.metric)
    grid, series_values = spec.grid(), spec.series()

    rows = []
    points = [(series, value) for series in series_values for value in grid]

    for series, value in tqdm(points, desc=f'sweeping {spec.metric}', disable=not progress):
        point = {spec.sweep_var: value}
        if exists(spec.series_var):
            point = {spec.series_var: series, **point}

        try:
            cfg = spec.pairing_config(**point)
            values = evaluate_metric(metric, cfg, trials=spec.trials, seed=spec.seed, workers=spec.workers)
        except (ConfigError, DomainError, QuadratureError) as err:
            raise SweepPointError(point, err) from err

        rows.append({**point, **values})

    columns = list(rows[0].keys())

    metadata = dict(
        **spec.to_dict(),
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        rng=RNG_DESCRIPTION,
    )

    if spec.metric == 'crnoma_outage' and spec.sweep_var == 'rho_db':
        metadata['diversity_slope'] = _fit_diversity(spec, rows)

    result = SweepResult(columns=columns, rows=rows, metadata=metadata)

    if exists(spec.out):
        result.write(spec.out, spec.format)

    return result
