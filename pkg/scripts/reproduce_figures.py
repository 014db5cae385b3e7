'''
example usage:

python3 scripts/reproduce_figures.py \
  --results_folder ./results/figures \
  --trials 1000000 \
  --workers 8
'''

import os
import sys
from pathlib import Path

import argparse

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from noma_pairing.config import load_preset, preset_names
from noma_pairing.experiment import run_sweep

if __name__ == '__main__':
    parser = argparse.ArgumentParser(description='run every figure preset into a results folder')

    parser.add_argument('--results_folder', default='./results/figures')
    parser.add_argument('--presets', nargs='*', default=None, help='subset of presets to run, all when omitted')
    parser.add_argument('--trials', type=int, default=None, help='override the Monte Carlo trials of every preset')
    parser.add_argument('--workers', type=int, default=1)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--format', choices=('csv', 'json'), default='csv')

    args = parser.parse_args()

    results_folder = Path(args.results_folder)
    results_folder.mkdir(parents=True, exist_ok=True)

    names = args.presets or preset_names()

    print(f'running {len(names)} presets into {results_folder}')

    for name in names:
        spec = load_preset(name)
        spec.out = str(results_folder / f'{name}.{args.format}')
        spec.format = args.format
        spec.workers = args.workers
        if args.trials is not None:
            spec.trials = args.trials
        if args.seed is not None:
            spec.seed = args.seed

        result = run_sweep(spec)
        print(f'{name}: {len(result.rows)} rows -> {spec.out}')

    print('\nok!')
