"""Exact effective dimension N(lambda) and its upper bounds.

For a spectrum t_1 >= t_2 >= ... the effective dimension is

    N(lambda) = sum_n t_n / (t_n + lambda).

For the polynomial decay t_n = beta * n**-b the sum is compared against

    corrected_bound = beta**(1/b) * (pi/b)/sin(pi/b) * lambda**(-1/b)
    claimed_bound   = (beta * b / (b - 1)) * lambda**(-1/b)

The first equals the integral of x |-> beta/(beta + lambda x**b) over
[0, inf) and genuinely dominates the sum (by at most 1, the size of the
dropped x = 0 term).  The second rests on the false inequality
int_0^inf dt/(beta + t**b) <= b/(b-1); it fails for every beta below a
computable threshold and is kept only as a reference curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .spectral import Spectrum, polynomial_spectrum, q_constant

__all__ = [
    "DEFAULT_TOL",
    "EffDimResult",
    "BoundComparisonRow",
    "effective_dimension_exact",
    "corrected_bound",
    "claimed_bound",
    "integral_value",
    "wrong_inequality_gap",
    "wrong_inequality_threshold",
    "find_wrong_inequality_threshold",
    "bound_comparison_table",
]

DEFAULT_TOL = 1e-9

# Hard cap on directly summed terms; reached only for extreme (b - 1, lambda)
# combinations far outside the documented parameter ranges.
_MAX_DIRECT_TERMS = 1 << 26

_SUM_CHUNK = 1 << 22


@dataclass(frozen=True)
class EffDimResult:
    """Effective-dimension value with a rigorous truncation interval.

    The true N(lambda) lies in [value, value + truncation_error_bound];
    terms_summed counts the directly summed leading terms.
    """

    value: float
    truncation_error_bound: float
    terms_summed: int

    def __post_init__(self) -> None:
        if self.truncation_error_bound < 0:
            raise ValueError("truncation_error_bound must be nonnegative")


@dataclass(frozen=True)
class BoundComparisonRow:
    lam: float
    exact: float
    corrected: float
    claimed: float


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def _check_finite_b(b: float) -> None:
    if not b > 1:
        raise ValueError(f"spectral decay exponent b must be > 1, got {b}")
    if not math.isfinite(b):
        raise ValueError("b must be finite here; the b = inf case reduces to beta itself")


def _check_decay_args(beta: float, b: float) -> None:
    _check_positive("beta", beta)
    _check_finite_b(b)


def _decay_fraction(beta: float, b: float, lam: float, n) -> np.ndarray:
    """f(n) = beta / (beta + lambda * n**b); overflow of n**b safely yields 0."""
    with np.errstate(over="ignore"):
        return beta / (beta + lam * np.power(np.asarray(n, dtype=float), b))


def _tail_integral(beta: float, b: float, lam: float, a: float) -> float:
    """int_a^inf beta/(beta + lambda x**b) dx via the regularized incomplete beta.

    Substituting t = beta/(beta + lambda x**b) turns the tail into an
    incomplete-beta integral with parameters (1 - 1/b, 1/b), whose complete
    value is pi/sin(pi/b).
    """
    z = b * math.log(a) + math.log(lam) - math.log(beta)
    t0 = math.exp(-z) if z > 700.0 else 1.0 / (1.0 + math.exp(z))
    full = (math.pi / b) / math.sin(math.pi / b) * beta ** (1.0 / b) * lam ** (-1.0 / b)
    return full * float(special.betainc(1.0 - 1.0 / b, 1.0 / b, t0))


def _sandwich(beta: float, b: float, lam: float, n: int) -> tuple[float, float]:
    """Lower tail estimate and rigorous width for sum_{m > n} f(m).

    Valid once f is convex on [n, inf), i.e. n >= ((b-1)/(b+1) * beta/lam)**(1/b):
    the trapezoid rule overestimates and the midpoint rule underestimates
    integrals of a convex function, giving

        int_{n+1}^inf f + f(n+1)/2  <=  tail  <=  int_{n+1/2}^inf f.
    """
    f_next = float(_decay_fraction(beta, b, lam, n + 1.0))
    lower = _tail_integral(beta, b, lam, n + 1.0) + 0.5 * f_next
    upper = _tail_integral(beta, b, lam, n + 0.5)
    return lower, max(upper - lower, 0.0)


def _partial_sum(beta: float, b: float, lam: float, n_terms: int) -> float:
    chunks = []
    start = 1
    while start <= n_terms:
        stop = min(start + _SUM_CHUNK - 1, n_terms)
        n = np.arange(start, stop + 1, dtype=float)
        chunks.append(float(np.sum(_decay_fraction(beta, b, lam, n))))
        start = stop + 1
    return math.fsum(chunks)


def effective_dimension_exact(
    spectrum: Spectrum, lam: float, tol: float = DEFAULT_TOL
) -> EffDimResult:
    """N(lambda) = sum_n t_n/(t_n + lambda) for the given spectrum.

    Without a decay model only the stored eigenvalues are summed and the
    truncation error is reported as 0.  With a decay model the infinite
    series is evaluated: leading terms are summed directly and the tail is
    pinned between integral bounds until the enclosure is narrower than
    ``tol``, so the true value lies in [value, value + tol].
    """
    _check_positive("lambda", lam)
    _check_positive("tol", tol)
    if spectrum.decay_model is None:
        t = spectrum.eigenvalues
        return EffDimResult(float(np.sum(t / (t + lam))), 0.0, int(t.size))

    beta, b = spectrum.decay_model
    # Convexity threshold of x |-> beta/(beta + lambda x**b); the tail
    # enclosure is only valid past it.
    inflection = ((b - 1.0) / (b + 1.0) * beta / lam) ** (1.0 / b)
    if inflection > _MAX_DIRECT_TERMS:
        raise RuntimeError(
            f"effective dimension for (beta={beta}, b={b}, lambda={lam}) "
            f"needs more than {_MAX_DIRECT_TERMS} direct terms"
        )
    n = max(16, math.ceil(inflection))
    while True:
        tail_lower, width = _sandwich(beta, b, lam, n)
        if width <= tol:
            break
        if n >= _MAX_DIRECT_TERMS:
            raise RuntimeError(
                f"effective dimension for (beta={beta}, b={b}, lambda={lam}) "
                f"needs more than {_MAX_DIRECT_TERMS} direct terms for tol={tol}"
            )
        n = min(2 * n, _MAX_DIRECT_TERMS)
    value = _partial_sum(beta, b, lam, n) + tail_lower
    return EffDimResult(value, width, n)


def corrected_bound(beta: float, b: float, lam: float) -> float:
    """Upper bound Q * lambda**(-1/b) on N(lambda) for polynomial decay.

    Equals the full integral of beta/(beta + lambda x**b) over [0, inf),
    hence exceeds the eigenvalue sum by at most 1.  Finite b only; for
    b = inf the coefficient degenerates to beta with no lambda dependence.
    """
    _check_finite_b(b)
    _check_positive("lambda", lam)
    return q_constant(beta, b) * lam ** (-1.0 / b)


def claimed_bound(beta: float, b: float, lam: float) -> float:
    """Reference bound (beta * b/(b-1)) * lambda**(-1/b).

    Not a valid upper bound on N(lambda): it drops below the exact sum for
    every beta under ``wrong_inequality_threshold(b)``.  Provided solely for
    comparison tables and plots.
    """
    _check_decay_args(beta, b)
    _check_positive("lambda", lam)
    return beta * b / (b - 1.0) * lam ** (-1.0 / b)


def integral_value(beta: float, b: float) -> float:
    """Closed form beta**((1-b)/b) * (pi/b)/sin(pi/b) of int_0^inf dt/(beta + t**b)."""
    _check_decay_args(beta, b)
    return beta ** ((1.0 - b) / b) * (math.pi / b) / math.sin(math.pi / b)


def wrong_inequality_gap(beta: float, b: float) -> float:
    """integral_value(beta, b) - b/(b-1); positive means b/(b-1) is not an upper bound."""
    _check_decay_args(beta, b)
    return integral_value(beta, b) - b / (b - 1.0)


def wrong_inequality_threshold(b: float) -> float:
    """The beta at which the gap changes sign, in closed form.

    Below ((b-1)/b * (pi/b)/sin(pi/b))**(b/(b-1)) the integral exceeds
    b/(b-1); the gap tends to +inf as beta -> 0.
    """
    _check_finite_b(b)
    base = (b - 1.0) / b * (math.pi / b) / math.sin(math.pi / b)
    return base ** (b / (b - 1.0))


def find_wrong_inequality_threshold(b: float) -> float:
    """Sign-change beta located by bisection on the gap, independent of the closed form."""
    _check_finite_b(b)
    lo, hi = 1e-8, 1e8
    if not (wrong_inequality_gap(lo, b) > 0 > wrong_inequality_gap(hi, b)):
        raise RuntimeError(f"bisection bracket failed for b={b}")
    return float(
        optimize.bisect(
            lambda beta: wrong_inequality_gap(beta, b),
            lo,
            hi,
            xtol=1e-14,
            rtol=8.9e-16,
            maxiter=200,
        )
    )


def bound_comparison_table(
    beta: float,
    b: float,
    lambda_grid,
    tol: float = DEFAULT_TOL,
) -> list[BoundComparisonRow]:
    """One (lambda, exact, corrected, claimed) row per grid value."""
    lams = [float(lam) for lam in lambda_grid]
    if not lams:
        raise ValueError("lambda_grid must be nonempty")
    # minimal stored prefix; the decay model drives the exact computation
    spectrum = polynomial_spectrum(beta, b, 1)
    rows = []
    for lam in lams:
        exact = effective_dimension_exact(spectrum, lam, tol).value
        rows.append(
            BoundComparisonRow(
                lam=lam,
                exact=exact,
                corrected=corrected_bound(beta, b, lam),
                claimed=claimed_bound(beta, b, lam),
            )
        )
    return rows
