"""Gauss hypergeometric function 2F1(a, b; c; x) on x <= 0.

Only used as an independent cross-check of the quadrature route for eta.
"""

import cmath

from scipy.special import gamma, rgamma

from .errors import SeriesDiverged

MAX_TERMS = 10_000
SERIES_TOL = 1e-15


def _is_nonpos_int(v):
    v = complex(v)
    return v.imag == 0 and v.real <= 0 and v.real == int(v.real)


def _series(a, b, c, x):
    total = term = 1.0 + 0j
    for n in range(MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if term == 0 or abs(term) <= SERIES_TOL * abs(total):
            return total
    raise SeriesDiverged(f"2F1 series at x={x} did not converge in {MAX_TERMS} terms")


def _inverse_argument(a, b, c, x):
    """Connection formula to 1/x, valid for x < -1 when a - b is not an integer."""
    mx = -x
    t1 = gamma(c) * gamma(b - a) * rgamma(b) * rgamma(c - a) * mx ** (-a) \
        * _series(a, 1 - c + a, 1 - b + a, 1.0 / x)
    t2 = gamma(c) * gamma(a - b) * rgamma(a) * rgamma(c - b) * mx ** (-b) \
        * _series(b, 1 - c + b, 1 - a + b, 1.0 / x)
    return t1 + t2


def gauss_2f1(a, b, c, x):
    """2F1(a, b; c; x) for real x <= 0.

    |x| < 0.9: direct series.  Otherwise the Pfaff transformation
    (1 - x)^-a 2F1(a, c - b; c; x / (x - 1)) when its argument is at most
    0.9, and the connection formula to 1/x beyond that.
    """
    a, b, c = complex(a), complex(b), complex(c)
    x = float(x)
    if _is_nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    if x > 0:
        raise ValueError("x must be <= 0")
    if abs(x) < 0.9 or _is_nonpos_int(a) or _is_nonpos_int(b):
        return _series(a, b, c, x)
    w = x / (x - 1.0)
    ab = a - b
    if w <= 0.9 or (ab.imag == 0 and ab.real == int(ab.real)):
        return (1.0 - x) ** (-a) * _series(a, c - b, c, w)
    return _inverse_argument(a, b, c, x)


def eta_inner_2f1(x, tau):
    """Inner integral of the eta representation in closed form.

    4 x^(1/2 - tau) * int_0^(pi/2) (1 + (x^2 - 1) sin^2 t)^(tau - 1/2) dt
    = 2 pi x^(1/2 - tau) 2F1(1/2 - tau, 1/2; 1; 1 - x^2).
    """
    return 2 * cmath.pi * x ** (0.5 - tau) * gauss_2f1(0.5 - tau, 0.5, 1.0, 1.0 - x * x)
