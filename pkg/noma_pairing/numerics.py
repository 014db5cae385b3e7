import math
from dataclasses import dataclass
from math import comb

import numpy as np
from beartype.typing import Callable, Optional, Sequence, Tuple
from scipy import integrate as sp_integrate
from scipy import special

from .utils import Real, beartype_jit, exists

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
DEFAULT_SUBDIVISIONS = 200

# floor for absolute tolerances, for probabilities that are themselves far below DEFAULT_ABS_TOL
TINY_ABS_TOL = float(np.finfo(np.float64).tiny)

EI_UNDERFLOW = -700.
MAX_EXACT_BINOMIAL_N = 30

# errors

class DomainError(ValueError):
    pass

class QuadratureError(RuntimeError):
    def __init__(self, msg, estimate=math.nan, error_bound=math.inf, abscissa=None, term=None):
        self.estimate = estimate
        self.error_bound = error_bound
        self.abscissa = abscissa
        self.term = term
        super().__init__(msg)

    def with_term(self, term):
        """re-label the failure with the analytic term it came from"""
        return QuadratureError(
            f'{term}: {self.args[0]}',
            estimate=self.estimate,
            error_bound=self.error_bound,
            abscissa=self.abscissa,
            term=term,
        )

# types

@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_bound: float
    evaluations: int

    def __post_init__(self):
        assert self.error_bound >= 0, 'error bound must be nonnegative'
        assert self.evaluations >= 1, 'at least one integrand evaluation expected'

@dataclass(frozen=True)
class SummationTerm:
    indices: Tuple[int, ...]
    sign: int
    coefficient: float

    def __post_init__(self):
        assert self.sign in (-1, 1), 'sign must be +1 or -1'
        assert math.isfinite(self.coefficient), 'coefficient must be finite'

    @property
    def signed(self):
        return self.sign * self.coefficient

# quadrature

def scaled_abs_tol(scale, rel_tol=DEFAULT_REL_TOL):
    """absolute tolerance for one piece of a sum whose magnitude is about `scale`"""
    return max(TINY_ABS_TOL, rel_tol * abs(scale))

def _checked(f, to_original=None):
    def inner(t):
        value = f(t)
        if math.isnan(value):
            x = to_original(t) if exists(to_original) else t
            raise QuadratureError(f'integrand returned NaN at x={x!r}', abscissa=x)
        return value
    return inner

@beartype_jit
def integrate(
    f: Callable,
    lower: Real,
    upper: Real,
    abs_tol: Real = DEFAULT_ABS_TOL,
    rel_tol: Real = DEFAULT_REL_TOL,
    points: Optional[Sequence] = None,
    limit: int = DEFAULT_SUBDIVISIONS,
) -> QuadratureResult:
    """
    adaptive Gauss-Kronrod quadrature (QUADPACK) of f over [lower, upper]
    a semi-infinite upper limit is mapped onto [0, 1) with x = lower + t / (1 - t)
    """
    assert abs_tol > 0 and rel_tol > 0, 'tolerances must be positive'
    if not lower < upper:
        raise DomainError(f'integration bounds must satisfy lower < upper, got [{lower}, {upper}]')
    if math.isinf(lower):
        raise DomainError('lower limit must be finite')

    if math.isinf(upper):
        to_original = lambda t: lower + t / (1. - t)
        integrand = _checked(lambda t: f(to_original(t)) / (1. - t) ** 2, to_original)
        a, b = 0., 1.
        points = None
    else:
        integrand = _checked(f)
        a, b = lower, upper
        points = [p for p in points if lower < p < upper] if exists(points) else None

    out = sp_integrate.quad(
        integrand, a, b,
        epsabs=abs_tol,
        epsrel=rel_tol,
        limit=limit,
        points=points or None,
        full_output=1,
    )
    value, error_bound, info = out[:3]
    evaluations = max(int(info.get('neval', 1)), 1)

    if len(out) > 3 and error_bound > max(abs_tol, rel_tol * abs(value)):
        raise QuadratureError(
            f'quadrature did not converge on [{lower}, {upper}] (estimate {value:.6g} +- {error_bound:.2g}): {out[3]}',
            estimate=value,
            error_bound=error_bound,
        )

    return QuadratureResult(value=float(value), error_bound=float(error_bound), evaluations=evaluations)

# exponential integral

@beartype_jit
def exp_integral_ei(x: Real) -> float:
    """Ei(x) = -E1(-x) on the negative branch"""
    if not x < 0:
        raise DomainError(f'Ei is only provided for negative arguments, got {x}')
    if x < EI_UNDERFLOW:
        return 0.
    return -float(special.exp1(-x))

@beartype_jit
def scaled_exp1(z: Real, eps: float = 1e-15, max_iter: int = 500) -> float:
    """e^z E1(z) for z > 0, finite where e^z and E1(z) separately over/underflow"""
    if not z > 0:
        raise DomainError(f'scaled E1 needs a positive argument, got {z}')
    if z <= 50.:
        return math.exp(z) * float(special.exp1(z))

    # modified Lentz continued fraction
    tiny = 1e-300
    b = z + 1.
    c = 1. / tiny
    d = 1. / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * i
        b += 2.
        d = 1. / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.) < eps:
            return h
    raise QuadratureError(f'continued fraction for E1({z}) did not converge')

# binomial sums

@beartype_jit
def alternating_binomial_sum(n: int, l: int) -> int:
    """sum_{j=0}^{n-1} C(n-1, j) (-1)^j j^l, exact in integer arithmetic, 0^0 = 1"""
    if n < 1 or l < 0:
        raise DomainError(f'need n >= 1 and l >= 0, got n={n}, l={l}')
    if n > MAX_EXACT_BINOMIAL_N:
        raise DomainError(f'refusing alternating binomial sum for n={n} > {MAX_EXACT_BINOMIAL_N}')
    return sum(comb(n - 1, j) * (-1) ** j * j ** l for j in range(n))

@beartype_jit
def binomial_terms(n: int) -> list:
    """signed terms (-1)^j C(n, j), j = 0..n, of the expansion of (1 - t)^n"""
    assert n >= 0, 'binomial order must be nonnegative'
    return [SummationTerm(indices=(j,), sign=(-1) ** j, coefficient=float(comb(n, j))) for j in range(n + 1)]

def log_factorial_ratio(top, *bottoms):
    """top! / prod(bottom!) evaluated in log space"""
    assert top >= 0 and all(b >= 0 for b in bottoms), 'factorial arguments must be nonnegative'
    log_value = special.gammaln(top + 1) - sum(special.gammaln(b + 1) for b in bottoms)
    return float(np.exp(log_value))
