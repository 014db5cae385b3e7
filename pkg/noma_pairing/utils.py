import math
import os
import sys

import numpy as np
from beartype import beartype
from beartype.typing import Union

Real = Union[int, float, np.integer, np.floating]


def beartype_jit(func):
    """decorator to enable beartype only if USE_BEARTYPE is set to 1"""
    return beartype(func) if os.environ.get('USE_BEARTYPE', '0') == '1' else func

# helper functions

def exists(val):
    return val is not None

def default(val, d):
    return val if exists(val) else d

def db_to_linear(db):
    return 10. ** (db / 10.)

def linear_to_db(val):
    return 10. * math.log10(val)

def ceil_div(numer, denom):
    return (numer + denom - 1) // denom

def db_grid(start_db, stop_db, step_db):
    """inclusive grid start, start + step, ... <= stop; start == stop gives one point"""
    assert step_db > 0, 'step must be positive'
    assert start_db <= stop_db, 'start must not exceed stop'
    num_points = int(math.floor((stop_db - start_db) / step_db + 1e-9)) + 1
    return [round(start_db + i * step_db, 12) for i in range(num_points)]

# diagnostics

_COLORS = dict(error='\033[31m', note='\033[36m', warning='\033[33m')

def use_color(stream=sys.stderr):
    return 'NO_COLOR' not in os.environ and hasattr(stream, 'isatty') and stream.isatty()

def print_diagnostic(msg, level='note', stream=None):
    """print a one line diagnostic on stderr, coloured unless NO_COLOR is set"""
    stream = default(stream, sys.stderr)
    prefix = f'{level}:'
    if use_color(stream):
        prefix = f'{_COLORS.get(level, "")}{prefix}\033[0m'
    print(f'{prefix} {msg}', file=stream)
