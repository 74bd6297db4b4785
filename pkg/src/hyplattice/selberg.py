"""Selberg transforms, the eta function, smooth bumps, kernel sums and main terms.

The transform of a point-pair profile k(u) is computed in three steps:

    q(p) = int_p^inf k(u) (u - p)^(-1/2) du = 2 int_0^inf k(p + s^2) ds
    g(r) = 2 q(sinh^2(r / 2))
    h(tau) = int_R e^(r tau) g(r) dr = 2 int_0^inf cosh(r tau) g(r) dr

eta(U, V; tau) is the transform of the indicator of [U, V); it is computed
from its one-dimensional representation

    eta = int_U^V J(u) du,
    J(u) = 8 x^(1/2 - tau) int_0^(pi/2) (1 + (x^2 - 1) sin^2 t)^(tau - 1/2) dt,
    x = 1 + 2u + 2 sqrt(u + u^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import InvalidBump, InvalidTau, QuadratureFail
from .orbit import sample_orbit

QUAD_TOL = 1e-9
QUAD_LIMIT = 400


def _quad(f, a, b, points=None, weight=None, wvar=None, epsabs=1e-11, epsrel=1e-11):
    """scipy quad with a hard failure when the 1e-9 target is missed."""
    if b <= a:
        return 0.0, 0.0
    kw = dict(epsabs=epsabs, epsrel=epsrel, limit=QUAD_LIMIT, full_output=1)
    if weight is not None:
        kw.update(weight=weight, wvar=wvar)
    elif points is not None:
        pts = sorted(p for p in set(points) if a < p < b)
        if pts:
            kw["points"] = pts
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, **kw)
    val, err = out[0], out[1]
    if err > QUAD_TOL * max(1.0, abs(val)):
        raise QuadratureFail(f"quadrature on [{a}, {b}] reached only {err:.2e}")
    return val, err


# ---------------------------------------------------------------------------
# profiles


def _smooth_step(s):
    """C^inf step: 0 for s <= 0, 1 for s >= 1, built from f(s) = exp(-1/s)."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f0 = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        r = 1.0 - s
        f1 = np.where(r > 0, np.exp(-1.0 / np.where(r > 0, r, 1.0)), 0.0)
        out = f0 / (f0 + f1)
    return out


class Profile:
    """A point-pair profile k(u) with compact support [lo, hi].

    ``knots`` lists the u-values where k fails to be analytic; quadratures
    split there.
    """

    def __init__(self, func, lo, hi, knots=()):
        self._func = func
        self.lo = float(lo)
        self.hi = float(hi)
        self.knots = tuple(sorted(set(float(k) for k in knots) | {self.lo, self.hi}))

    def __call__(self, u):
        scalar = np.ndim(u) == 0
        out = self._func(np.asarray(u, dtype=float))
        return float(out) if scalar else out


class Indicator(Profile):
    """Indicator of [U, V)."""

    def __init__(self, U, V):
        self.U, self.V = float(U), float(V)
        super().__init__(lambda u: ((u >= self.U) & (u < self.V)).astype(float), U, V)


@dataclass(frozen=True)
class BumpSpec:
    U: float
    V: float
    Y: float
    side: str = "outer"

    def validate(self):
        U, V, Y = self.U, self.V, self.Y
        if self.side not in ("inner", "outer"):
            raise InvalidBump(f"side must be inner or outer, got {self.side!r}")
        if not (U >= 0 and V > U and Y > 0):
            raise InvalidBump("need U >= 0, V > U, Y > 0")
        limit = (V - U) / 2 if U > 0 else V / 2
        if Y > limit:
            raise InvalidBump(f"Y={Y} exceeds {limit}")
        if self.side == "outer" and U > 0 and Y > U:
            raise InvalidBump("outer bump needs Y <= U so its support stays in u >= 0")


class Bump(Profile):
    """Smooth approximation of the indicator of [U, V].

    outer: 1 on [U, V], support [U - Y, V + Y].
    inner: 1 on [U + Y, V - Y], support [U, V].
    For U = 0 the left edge is dropped: k = 1 from u = 0.
    """

    def __init__(self, spec):
        spec.validate()
        self.spec = spec
        U, V, Y = spec.U, spec.V, spec.Y
        if spec.side == "outer":
            a, b = (U - Y, U) if U > 0 else (None, 0.0)
            c, e = V, V + Y
        else:
            a, b = (U, U + Y) if U > 0 else (None, 0.0)
            c, e = V - Y, V
        self.flat = (b, c)

        def k(u):
            out = np.ones_like(u)
            if a is not None:
                out = np.where(u < b, _smooth_step((u - a) / Y), out)
            out = np.where(u > c, _smooth_step((e - u) / Y), out)
            return np.where((u < (a if a is not None else 0.0)) | (u > e), 0.0, out)

        knots = [x for x in (a, b, c, e) if x is not None]
        super().__init__(k, a if a is not None else 0.0, e, knots)


def build_bump(spec):
    return Bump(spec)


# ---------------------------------------------------------------------------
# Selberg transform


@dataclass
class TransformResult:
    tau: complex
    h: complex
    error: float


class SelbergTransform:
    """Three-step transform of one profile; g(r) is memoised across tau."""

    def __init__(self, k):
        self.k = k
        self.hi = k.hi
        self.R = 2.0 * math.asinh(math.sqrt(k.hi))
        self.r_knots = [2.0 * math.asinh(math.sqrt(max(u, 0.0))) for u in k.knots]
        self._g = lru_cache(maxsize=None)(self._g_uncached)

    def q(self, p):
        if p >= self.hi:
            return 0.0
        k = self.k
        smax = math.sqrt(self.hi - p)
        pts = [math.sqrt(u - p) for u in k.knots if u > p]
        val, _ = _quad(lambda s: k(p + s * s), 0.0, smax, points=pts)
        return 2.0 * val

    def _g_uncached(self, r):
        return 2.0 * self.q(math.sinh(0.5 * r) ** 2)

    def g(self, r):
        return self._g(abs(float(r)))

    def __call__(self, tau):
        tau = complex(tau)
        if abs(tau.real) > 0.5 + 1e-12:
            raise InvalidTau(f"|Re tau| must be <= 1/2, got {tau}")
        g, R = self.g, self.R
        if tau.imag == 0:
            s = tau.real
            val, err = _quad(lambda r: math.cosh(r * s) * g(r), 0.0, R, points=self.r_knots)
            return TransformResult(tau, complex(2.0 * val), 2.0 * err)
        t = tau.imag
        s = tau.real
        # cosh(r(s + it)) = cosh(rs) cos(rt) + i sinh(rs) sin(rt)
        re, e1 = _quad(lambda r: math.cosh(r * s) * g(r), 0.0, R, weight="cos", wvar=t)
        im, e2 = (0.0, 0.0) if s == 0 else _quad(
            lambda r: math.sinh(r * s) * g(r), 0.0, R, weight="sin", wvar=t)
        return TransformResult(tau, complex(2.0 * re, 2.0 * im), 2.0 * (e1 + e2))


def selberg_transform(k, tau):
    return SelbergTransform(k)(tau)


def profile_integral(k):
    """int_0^inf k(u) du."""
    return _quad(k, k.lo, k.hi, points=k.knots)[0]


# ---------------------------------------------------------------------------
# eta


def _x_of_u(u):
    return 1.0 + 2.0 * u + 2.0 * math.sqrt(u + u * u)


def eta_inner(u, tau):
    """J(u; tau); eta(U, V; tau) = int_U^V J du."""
    tau = complex(tau)
    x = _x_of_u(u)
    a = x * x - 1.0
    e = tau - 0.5
    pts = [c / x for c in (1.0, 10.0, 100.0) if c / x < math.pi / 2]

    def f(t, part):
        v = (1.0 + a * math.sin(t) ** 2) ** e
        return v.real if part == 0 else v.imag

    re, _ = _quad(lambda t: f(t, 0), 0.0, math.pi / 2, points=pts)
    im = 0.0 if tau.imag == 0 else _quad(lambda t: f(t, 1), 0.0, math.pi / 2, points=pts)[0]
    return 8.0 * x ** (-e) * complex(re, im)


def eta_charfun(U, V, tau):
    """eta(U, V; tau), the transform of the indicator of [U, V)."""
    tau = complex(tau)
    if not 0 <= U < V:
        raise ValueError("need 0 <= U < V")
    if abs(tau.real) > 0.5 + 1e-12:
        raise InvalidTau(f"|Re tau| must be <= 1/2, got {tau}")
    # geometric breakpoints resolve the sqrt behaviour near u = 0 and the
    # power-law growth for large u
    pts = [U * (1 - f) + V * f for f in (1e-6, 1e-4, 1e-2, 0.1, 0.3)]
    pts += [float(p) for p in np.geomspace(max(U, 1e-6), V, 12)[1:-1]]
    re = _quad(lambda u: eta_inner(u, tau).real, U, V, points=pts)[0]
    im = 0.0 if tau.imag == 0 else _quad(lambda u: eta_inner(u, tau).imag, U, V, points=pts)[0]
    return complex(re, im)


def _eta_factor(tau):
    return math.sqrt(math.pi) * 2.0 ** (2 * tau + 1) * math.exp(math.lgamma(tau) - math.lgamma(1.5 + tau))


def eta_main_term(U, V, tau):
    """Leading behaviour of eta for 0 < tau <= 1/2."""
    if not 0 < tau <= 0.5:
        raise InvalidTau(f"tau must lie in (0, 1/2], got {tau}")
    return _eta_factor(tau) * (V ** (tau + 0.5) - U ** (tau + 0.5))


# ---------------------------------------------------------------------------
# kernel sums and main terms


def kernel_sum(z, profiles, spec, threads=1, sample=None):
    """K(z, z) = sum over gamma of prod_j k_j(u_j(gamma))."""
    if len(profiles) != spec.degree:
        raise ValueError(f"need {spec.degree} profiles")
    if sample is None:
        sample = sample_orbit(z, [p.hi for p in profiles], spec, threads)
    elif any(p.hi > v for p, v in zip(profiles, sample.V)):
        raise ValueError("sample does not cover the profile supports")
    prod = np.ones(len(sample.u))
    for j, k in enumerate(profiles):
        prod *= k(sample.u[:, j])
    return math.fsum(prod)


def main_term_box(box, vol, d):
    if vol <= 0:
        raise ValueError("vol must be positive")
    return (4 * math.pi) ** d / vol * math.prod(v - u for u, v in zip(box.U, box.V))


def main_term_hypercube(T, vol, d):
    if vol <= 0:
        raise ValueError("vol must be positive")
    return math.pi ** d / vol * math.exp(d * T)


def main_term_strip(strip, vol, d):
    if vol <= 0:
        raise ValueError("vol must be positive")
    strip.validate(d)
    e = len(strip.E)
    q = d - e
    return (math.pi ** d * 2 ** e / vol * math.exp(q * strip.T)
            * math.prod(math.cosh(b) - math.cosh(a) for a, b in zip(strip.A, strip.B)))


def exceptional_term(weights, box):
    """sum_l w_l prod_j eta_main_term(U_j, V_j, tau_lj) over (w_l, tau_l) pairs."""
    total = 0.0
    for w, taus in weights:
        if len(taus) != len(box.V):
            raise ValueError("tau vector length must match the box")
        for t in taus:
            if not 0 < t <= 0.5:
                raise InvalidTau(f"tau must lie in (0, 1/2], got {t}")
        total += w * math.prod(eta_main_term(u, v, t) for u, v, t in zip(box.U, box.V, taus))
    return total
