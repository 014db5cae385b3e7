'''
example usage:

noma-pairing fnoma-sum-prob --M 5 --m 1 --n 2 --an2 0.2 --rho-db 20 --trials 100000
noma-pairing crnoma-power --gm 2 --rho-db 10 --I 5
noma-pairing sweep --preset fig4 --out ./results/fig4.csv
'''

import argparse
import json
import sys

from . import __version__
from .config import ConfigError, PairingConfig, load_preset, load_sweep_config
from .crnoma import power_coefficient
from .experiment import SweepPointError, run_point, run_sweep
from .fnoma import OrderingError
from .numerics import DomainError, QuadratureError
from .utils import db_to_linear, exists, print_diagnostic

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_CONFIG = 2

# flags shared by the point subcommands

def _add_pair_args(parser, n_default=2):
    parser.add_argument('--M', type=int, default=5, help='number of users in the cell')
    parser.add_argument('--m', type=int, default=1, help='rank of the weak user, 1 is the weakest')
    parser.add_argument('--n', type=int, default=n_default, help='rank of the strong user')
    parser.add_argument('--rho-db', type=float, default=20., help='transmit snr in dB')

def _add_mc_args(parser):
    parser.add_argument('--trials', type=int, default=0, help='Monte Carlo trials, 0 skips the simulation')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--workers', type=int, default=1, help='threads for the Monte Carlo blocks')

def build_parser():
    parser = argparse.ArgumentParser(prog='noma-pairing', description='user pairing probabilities for NOMA downlinks')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    sum_prob = subparsers.add_parser('fnoma-sum-prob', help='probability that fixed power NOMA has a lower sum rate than orthogonal access')
    _add_pair_args(sum_prob)
    sum_prob.add_argument('--an2', type=float, default=0.2, help='power share of the strong user')
    sum_prob.add_argument('--highsnr', default=False, action='store_true', help='also report the high snr approximation')
    _add_mc_args(sum_prob)

    gap = subparsers.add_parser('fnoma-gap', help='probability that the sum rate gain stays below R_gap')
    _add_pair_args(gap)
    gap.add_argument('--an2', type=float, default=0.2, help='power share of the strong user')
    gap.add_argument('--R-gap', '--R', dest='R_gap', type=float, default=1., help='targeted sum rate gain in BPCU')
    gap.add_argument('--asymptotic', default=False, action='store_true', help='report the high snr error floor')
    _add_mc_args(gap)

    individual = subparsers.add_parser('fnoma-individual', help='probabilities that each user gains over orthogonal access')
    _add_pair_args(individual)
    individual.add_argument('--an2', type=float, default=0.2, help='power share of the strong user')
    individual.add_argument('--highsnr', default=False, action='store_true', help='also report the high snr approximations')
    _add_mc_args(individual)

    power = subparsers.add_parser('crnoma-power', help='power share of the strong user under the weak user qos constraint')
    power.add_argument('--gm', type=float, required=True, help='unit scale channel gain of the weak user')
    power.add_argument('--rho-db', type=float, default=20., help='transmit snr in dB')
    power.add_argument('--I', type=float, default=5., help='sinr guaranteed to the weak user')

    outage = subparsers.add_parser('crnoma-outage', help='outage probability of the strong user')
    _add_pair_args(outage, n_default=5)
    outage.add_argument('--I', type=float, default=5., help='sinr guaranteed to the weak user')
    outage.add_argument('--rate-bpcu', type=float, default=1., help='target rate of the strong user')
    _add_mc_args(outage)

    ergodic = subparsers.add_parser('crnoma-ergodic', help='ergodic rate of the strong user')
    _add_pair_args(ergodic)
    ergodic.add_argument('--I', type=float, default=5., help='sinr guaranteed to the weak user')
    _add_mc_args(ergodic)

    sweep = subparsers.add_parser('sweep', help='run a figure style sweep from a preset or a config file')
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', help='name of a preset in ./configs/presets, e.g. fig4')
    source.add_argument('--config', help='path to a flat json sweep config')
    for flag, kind in (
        ('--M', int), ('--m', int), ('--n', int), ('--an2', float), ('--I', float),
        ('--rate-bpcu', float), ('--R-gap', float), ('--rho-db', float),
        ('--rho-start-db', float), ('--rho-stop-db', float), ('--rho-step-db', float),
        ('--trials', int), ('--seed', int), ('--workers', int),
    ):
        sweep.add_argument(flag, type=kind, default=None)
    sweep.add_argument('--out', default=None, help='output path, stdout when omitted')
    sweep.add_argument('--format', choices=('csv', 'json'), default=None)
    sweep.add_argument('--quiet', default=False, action='store_true', help='disable progress bars')

    return parser

# subcommands

SWEEP_OVERRIDES = (
    'M', 'm', 'n', 'an2', 'I', 'rate_bpcu', 'R_gap', 'rho_db',
    'rho_start_db', 'rho_stop_db', 'rho_step_db', 'trials', 'seed', 'workers', 'out', 'format',
)

def _pairing_config(args, **kwargs):
    return PairingConfig.from_db(args.rho_db, M=args.M, m=args.m, n=args.n, **kwargs)

def _emit(document):
    print(json.dumps(document, indent=2))

def _point(metric, args, cfg, highsnr=False):
    return run_point(metric, cfg, trials=args.trials, seed=args.seed, workers=args.workers, highsnr=highsnr)

def cmd_fnoma_sum_prob(args):
    cfg = _pairing_config(args, a_n_sq=args.an2)
    _emit(_point('fnoma_sum_worse', args, cfg, highsnr=args.highsnr))

def cmd_fnoma_gap(args):
    cfg = _pairing_config(args, a_n_sq=args.an2, R_gap=args.R_gap)
    _emit(_point('fnoma_gap_below', args, cfg, highsnr=args.asymptotic))

def cmd_fnoma_individual(args):
    cfg = _pairing_config(args, a_n_sq=args.an2)
    _emit({
        metric: _point(metric, args, cfg, highsnr=args.highsnr)
        for metric in ('fnoma_user_m_gains', 'fnoma_user_n_gains', 'fnoma_user_n_loses')
    })

def cmd_crnoma_power(args):
    rho = db_to_linear(args.rho_db)
    result = power_coefficient(args.gm, rho, args.I)
    _emit(dict(a_n_sq=result.a_n_sq, served=result.served, g_m=args.gm, rho_db=args.rho_db, I=args.I, b=args.I / rho))

def cmd_crnoma_outage(args):
    cfg = _pairing_config(args, I_sinr=args.I, R_target=args.rate_bpcu)
    _emit(_point('crnoma_outage', args, cfg))

def cmd_crnoma_ergodic(args):
    cfg = _pairing_config(args, I_sinr=args.I)
    _emit(_point('crnoma_ergodic', args, cfg))

def cmd_sweep(args):
    spec = load_preset(args.preset) if exists(args.preset) else load_sweep_config(args.config)
    overrides = {key: getattr(args, key) for key in SWEEP_OVERRIDES if exists(getattr(args, key))}
    if overrides:
        spec = type(spec)(**{**spec.to_dict(), **overrides})

    result = run_sweep(spec, progress=not args.quiet)

    if exists(spec.out):
        print_diagnostic(f'wrote {len(result.rows)} rows to {spec.out}')
    elif spec.format == 'json':
        sys.stdout.write(result.to_json_string())
    else:
        sys.stdout.write(result.to_csv_string())

COMMANDS = {
    'fnoma-sum-prob': cmd_fnoma_sum_prob,
    'fnoma-gap': cmd_fnoma_gap,
    'fnoma-individual': cmd_fnoma_individual,
    'crnoma-power': cmd_crnoma_power,
    'crnoma-outage': cmd_crnoma_outage,
    'crnoma-ergodic': cmd_crnoma_ergodic,
    'sweep': cmd_sweep,
}

def main(argv=None):
    args = build_parser().parse_args(argv)

    try:
        COMMANDS[args.command](args)
    except SweepPointError as err:
        print_diagnostic(str(err), level='error')
        return EXIT_CONFIG if isinstance(err.cause, ConfigError) else EXIT_NUMERIC
    except (ConfigError, OrderingError, DomainError) as err:
        print_diagnostic(str(err), level='error')
        return EXIT_CONFIG
    except (QuadratureError, OSError) as err:
        print_diagnostic(str(err), level='error')
        return EXIT_NUMERIC

    return EXIT_OK

if __name__ == '__main__':
    sys.exit(main())
