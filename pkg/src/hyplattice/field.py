"""Exact arithmetic in Z and in rings of integers of real quadratic fields.

An element of O_F is stored as a coefficient pair ``(p, q)`` meaning
``p + q*omega`` in the integral basis ``{1, omega}``, where

* ``omega = sqrt(m)``          when m = 2, 3 (mod 4),
* ``omega = (1 + sqrt(m))/2``  when m = 1 (mod 4).

In both cases ``omega**2 = t*omega + n0`` with integers t, n0, which is all
the multiplication needs.  For Z (degree 1) the second coefficient is always
zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import DivisionStuck, UnsupportedField

# m with a Euclidean algorithm for the absolute norm (rounding + offsets).
EUCLIDEAN_M = (2, 3, 5, 13)

_UNIT_SEARCH_CAP = 10**6


class RingElement(NamedTuple):
    p: int
    q: int = 0


ZERO = RingElement(0, 0)
ONE = RingElement(1, 0)


def _is_squarefree(m):
    if m < 2:
        return False
    k = 2
    while k * k <= m:
        if m % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Ring of integers of Q (degree 1) or of Q(sqrt(m)) (degree 2).

    Construct with :meth:`rational` or :meth:`quadratic`.
    """

    degree: int
    m: int | None = None
    t: int = field(default=0, repr=False)
    n0: int = field(default=0, repr=False)
    den: int = field(default=1, repr=False)
    omega: tuple = field(default=(0.0,), repr=False, compare=False)
    unit: RingElement = field(default=ONE, repr=False)

    @classmethod
    def rational(cls):
        return cls(degree=1, m=None, omega=(0.0,), unit=RingElement(-1, 0))

    @classmethod
    def quadratic(cls, m):
        m = int(m)
        if not _is_squarefree(m):
            raise UnsupportedField(f"m={m} is not a squarefree integer > 1")
        r = math.sqrt(m)
        if m % 4 == 1:
            t, n0, den = 1, (m - 1) // 4, 2
            omega = ((1 + r) / 2, (1 - r) / 2)
        else:
            t, n0, den = 0, m, 1
            omega = (r, -r)
        spec = cls(degree=2, m=m, t=t, n0=n0, den=den, omega=omega)
        object.__setattr__(spec, "unit", _fundamental_unit(spec))
        return spec

    @property
    def is_euclidean(self):
        return self.degree == 1 or self.m in EUCLIDEAN_M

    @property
    def sqrt_m(self):
        return math.sqrt(self.m) if self.degree == 2 else 0.0

    @property
    def omega_gap(self):
        """sigma_1(omega) - sigma_2(omega): sqrt(m) or 2 sqrt(m)."""
        return self.omega[0] - self.omega[1] if self.degree == 2 else 0.0

    # -- ring operations ------------------------------------------------

    def add(self, x, y):
        return RingElement(x[0] + y[0], x[1] + y[1])

    def sub(self, x, y):
        return RingElement(x[0] - y[0], x[1] - y[1])

    def neg(self, x):
        return RingElement(-x[0], -x[1])

    def mul(self, x, y):
        p1, q1 = x
        p2, q2 = y
        qq = q1 * q2
        return RingElement(p1 * p2 + qq * self.n0, p1 * q2 + q1 * p2 + qq * self.t)

    def conj(self, x):
        return RingElement(x[0] + x[1] * self.t, -x[1])

    def norm(self, x):
        p, q = x
        if self.degree == 1:
            return p
        return p * p + self.t * p * q - self.n0 * q * q

    def is_unit(self, x):
        return abs(self.norm(x)) == 1

    def unit_inverse(self, x):
        n = self.norm(x)
        if abs(n) != 1:
            raise ValueError(f"{x} is not a unit")
        if self.degree == 1:
            return RingElement(x[0], 0)
        c = self.conj(x)
        return RingElement(n * c[0], n * c[1])

    def power(self, x, k):
        if k < 0:
            x, k = self.unit_inverse(x), -k
        result = ONE
        for _ in range(k):
            result = self.mul(result, x)
        return result

    def exact_div(self, x, y):
        """x / y if y divides x in the ring, else None."""
        if self.degree == 1:
            if y[0] == 0:
                return None
            qt, r = divmod(x[0], y[0])
            return RingElement(qt, 0) if r == 0 else None
        n = self.norm(y)
        if n == 0:
            return None
        num = self.mul(x, self.conj(y))
        qp, rp = divmod(num[0], n)
        qq, rq = divmod(num[1], n)
        if rp or rq:
            return None
        return RingElement(qp, qq)

    def embed(self, x):
        if self.degree == 1:
            return (float(x[0]),)
        w1, w2 = self.omega
        return (x[0] + x[1] * w1, x[0] + x[1] * w2)

    def element(self, p, q=0):
        if self.degree == 1 and q:
            raise ValueError("elements of Z have q = 0")
        return RingElement(int(p), int(q))

    # -- exact comparisons ----------------------------------------------

    def embedding_in(self, x, j, lo, hi):
        """Exact test lo <= sigma_j(x) <= hi for rational (or float) lo, hi."""
        lo, hi = Fraction(lo), Fraction(hi)
        if self.degree == 1:
            return lo <= x[0] <= hi
        # sigma_j(x) = (X + s*q*sqrt(m)) / den
        X = self.den * x[0] + self.t * x[1]
        Y = x[1] if j == 0 else -x[1]
        return (_lin_sqrt_le(X, Y, self.m, self.den * hi)
                and _lin_sqrt_ge(X, Y, self.m, self.den * lo))


def _lin_sqrt_le(X, Y, m, C):
    """Exact X + Y*sqrt(m) <= C."""
    W = C - X
    if Y == 0:
        return W >= 0
    if Y > 0:
        return W >= 0 and Y * Y * m <= W * W
    return W >= 0 or Y * Y * m >= W * W


def _lin_sqrt_ge(X, Y, m, C):
    return _lin_sqrt_le(-X, -Y, m, -C)


def _fundamental_unit(spec):
    w2 = spec.omega[1]
    for q in range(1, _UNIT_SEARCH_CAP):
        p0 = round(-q * w2)
        for p in (p0 - 1, p0, p0 + 1):
            x = RingElement(p, q)
            if abs(spec.norm(x)) == 1 and spec.embed(x)[0] > 1:
                return x
    raise UnsupportedField(f"fundamental unit of Q(sqrt({spec.m})) not found")


# ---------------------------------------------------------------------------
# public operations


def embed(x, spec):
    """Real embeddings (sigma_1(x), ..., sigma_d(x)) as floats."""
    return spec.embed(x)


def _round_div(a, n):
    if n < 0:
        a, n = -a, -n
    return (2 * a + n) // (2 * n)


_OFFSETS = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1),
            (1, 1), (1, -1), (-1, 1), (-1, -1))


def euclid_divmod(x, y, spec):
    """Norm-Euclidean division: (quotient, remainder) with |N(rem)| < |N(y)|."""
    if spec.degree == 1:
        qt, r = divmod(x[0], y[0])
        return RingElement(qt, 0), RingElement(r, 0)
    n = spec.norm(y)
    num = spec.mul(x, spec.conj(y))
    qp, qq = _round_div(num[0], n), _round_div(num[1], n)
    an = abs(n)
    for dp, dq in _OFFSETS:
        cand = RingElement(qp + dp, qq + dq)
        rem = spec.sub(x, spec.mul(cand, y))
        if abs(spec.norm(rem)) < an:
            return cand, rem
    raise DivisionStuck(f"no quotient for {x} / {y} in Q(sqrt({spec.m}))")


def bezout(c, d0, spec):
    """Return (a, b) with a*d0 - b*c = 1, or None when (c, d0) is not the unit ideal."""
    if not spec.is_euclidean:
        raise UnsupportedField(f"m={spec.m} is not in the supported list {EUCLIDEAN_M}")
    c, d0 = RingElement(*c), RingElement(*d0)
    if c == ZERO and d0 == ZERO:
        raise ValueError("bezout needs (c, d0) != (0, 0)")
    if spec.degree == 1:
        ci, di = c[0], d0[0]
        g = math.gcd(ci, di)
        if g != 1:
            return None
        if ci == 0:
            return RingElement(di, 0), ZERO
        a = pow(di, -1, abs(ci)) if abs(ci) > 1 else 0
        b, r = divmod(a * di - 1, ci)
        assert r == 0
        return RingElement(a, 0), RingElement(b, 0)

    # invariant: r_i = s_i*d0 + t_i*c
    r0, r1 = d0, c
    s0, s1 = ONE, ZERO
    t0, t1 = ZERO, ONE
    while r1 != ZERO:
        qt, rem = euclid_divmod(r0, r1, spec)
        r0, r1 = r1, rem
        s0, s1 = s1, spec.sub(s0, spec.mul(qt, s1))
        t0, t1 = t1, spec.sub(t0, spec.mul(qt, t1))
    if not spec.is_unit(r0):
        return None
    ginv = spec.unit_inverse(r0)
    a = spec.mul(s0, ginv)
    b = spec.neg(spec.mul(t0, ginv))
    return a, b


def _coeff_ranges(lo, hi, spec, slack=0.0):
    """Yield (q, p_min, p_max) covering every p + q*omega with lo_j <= sigma_j <= hi_j.

    Float arithmetic widened by ``slack`` (absolute) plus one unit of
    rounding room; callers filter exactly or by a downstream test.
    """
    if spec.degree == 1:
        pmin = math.ceil(lo[0] - slack)
        pmax = math.floor(hi[0] + slack)
        if pmin <= pmax:
            yield 0, pmin, pmax
        return
    w1, w2 = spec.omega
    s = spec.omega_gap
    lo1, lo2 = lo[0] - slack, lo[1] - slack
    hi1, hi2 = hi[0] + slack, hi[1] + slack
    if lo1 > hi1 or lo2 > hi2:
        return
    qmin = math.ceil((lo1 - hi2) / s)
    qmax = math.floor((hi1 - lo2) / s)
    for q in range(qmin, qmax + 1):
        pmin = math.ceil(max(lo1 - q * w1, lo2 - q * w2))
        pmax = math.floor(min(hi1 - q * w1, hi2 - q * w2))
        if pmin <= pmax:
            yield q, pmin, pmax


def enumerate_ring_box(bounds, spec, center=None):
    """Yield every x in O_F with |sigma_j(x) - center_j| <= bounds_j, each once.

    Ties are inclusive and decided exactly: float bounds/centers are taken
    at their exact binary value and compared with integer arithmetic.
    """
    d = spec.degree
    if len(bounds) != d:
        raise ValueError(f"expected {d} bounds")
    if any(not math.isfinite(b) for b in bounds):
        raise ValueError("bounds must be finite")
    if center is None:
        center = (0.0,) * d
    lo = [Fraction(c) - Fraction(b) for c, b in zip(center, bounds)]
    hi = [Fraction(c) + Fraction(b) for c, b in zip(center, bounds)]
    flo = [float(v) for v in lo]
    fhi = [float(v) for v in hi]
    for q, pmin, pmax in _coeff_ranges(flo, fhi, spec, slack=1.0):
        for p in range(pmin, pmax + 1):
            x = RingElement(p, q)
            if all(spec.embedding_in(x, j, lo[j], hi[j]) for j in range(d)):
                yield x


def units_in_box(bounds, spec):
    """All units +-eps**k with |sigma_j| <= bounds_j for every j."""
    if spec.degree == 1:
        return [ONE, RingElement(-1, 0)]
    b = [Fraction(v) for v in bounds]

    def inside(x):
        return all(spec.embedding_in(x, j, -b[j], b[j]) for j in range(2))

    found = []
    eps, eps_inv = spec.unit, spec.unit_inverse(spec.unit)
    # k >= 0: |sigma_1| increases with k; k < 0: |sigma_2| increases.
    x = ONE
    while spec.embedding_in(x, 0, -b[0], b[0]):
        if inside(x):
            found.append(x)
        x = spec.mul(x, eps)
    x = eps_inv
    while spec.embedding_in(x, 1, -b[1], b[1]):
        if inside(x):
            found.append(x)
        x = spec.mul(x, eps_inv)
    return found + [spec.neg(u) for u in found]


def brute_force_box(bounds, spec, coeff_bound, center=None):
    """Reference scan over |p|, |q| <= coeff_bound (tests and oracles only)."""
    if center is None:
        center = (0.0,) * spec.degree
    qs = range(-coeff_bound, coeff_bound + 1) if spec.degree == 2 else (0,)
    out = []
    for q in qs:
        for p in range(-coeff_bound, coeff_bound + 1):
            x = RingElement(p, q)
            if all(spec.embedding_in(x, j, Fraction(center[j]) - Fraction(bounds[j]),
                                     Fraction(center[j]) + Fraction(bounds[j]))
                   for j in range(spec.degree)):
                out.append(x)
    return out


def coeff_bound_for(bounds, spec):
    """Smallest integer K with |p|, |q| <= K for every x with |sigma_j(x)| <= bounds_j."""
    if spec.degree == 1:
        return math.floor(bounds[0])
    w1, w2 = spec.omega
    s = spec.omega_gap
    qb = (bounds[0] + bounds[1]) / s
    pb = (bounds[0] * abs(w2) + bounds[1] * abs(w1)) / s
    return math.floor(max(qb, pb) + 1e-9)
