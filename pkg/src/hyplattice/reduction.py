"""Reduction to a fundamental domain and the cusp heights y_j(z), n(z), n(T, z)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IterationCap
from .field import ZERO, FieldSpec, RingElement, _coeff_ranges, bezout
from .geometry import GroupElement, mobius_apply

SL2Z_MAX_STEPS = 10_000
HILBERT_MAX_STEPS = 100
# below this value of prod y_j the point is treated as lying in the compact part
COMPACT_PRODUCT = 2.0


def reduce_sl2z(z):
    """Return (z*, g) with z* = g z in {|x| <= 1/2, |z| >= 1}."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(SL2Z_MAX_STEPS):
        n = math.floor(z.real + 0.5)
        if n:
            z -= n
            a, b = a - n * c, b - n * d
        if abs(z) >= 1.0 or abs(z) ** 2 >= 1.0 - 1e-15:
            break
        z = -1.0 / z
        a, b, c, d = -c, -d, a, b
    else:
        raise IterationCap("reduce_sl2z did not terminate")
    g = GroupElement.make(RingElement(a), RingElement(b), RingElement(c), RingElement(d),
                          FieldSpec.rational())
    return z, g


@dataclass
class HeightReport:
    reduced: tuple
    heights: tuple
    n: float
    converged: bool = True


def _nearest_translation(xs, spec):
    w1, w2 = spec.omega
    q0 = round((xs[0] - xs[1]) / spec.omega_gap)
    best = None
    for q in (q0 - 1, q0, q0 + 1):
        p0 = round(0.5 * ((xs[0] - q * w1) + (xs[1] - q * w2)))
        for p in (p0 - 1, p0, p0 + 1):
            err = max(abs(xs[0] - p - q * w1), abs(xs[1] - p - q * w2))
            if best is None or err < best[0]:
                best = (err, RingElement(p, q))
    return best[1]


def _best_row(z, spec, reach=3.0):
    """Coprime bottom row (c, d) with c != 0 minimising prod_j |c_j z_j + d_j|^2."""
    best = None
    ys = [w.imag for w in z]
    cb = [reach / y for y in ys]
    for q, pmin, pmax in _coeff_ranges([-b for b in cb], cb, spec):
        for p in range(pmin, pmax + 1):
            c = RingElement(p, q)
            if c == ZERO or spec.embed(c)[0] < 0:
                continue
            cs = spec.embed(c)
            centre = [-cj * w.real for cj, w in zip(cs, z)]
            for dq, dpmin, dpmax in _coeff_ranges([m - reach for m in centre],
                                                  [m + reach for m in centre], spec):
                for dp in range(dpmin, dpmax + 1):
                    d0 = RingElement(dp, dq)
                    ds = spec.embed(d0)
                    nrm = math.prod(abs(cj * w + dj) ** 2 for cj, dj, w in zip(cs, ds, z))
                    if best is None or nrm < best[0]:
                        ab = bezout(c, d0, spec)
                        if ab is not None:
                            best = (nrm, GroupElement(ab[0], ab[1], c, d0))
    return best


def _reduce_hilbert(z, spec):
    eps2 = spec.mul(spec.unit, spec.unit)
    e1, e2 = spec.embed(eps2)
    if e1 < 0:
        eps2 = spec.neg(eps2)
        e1, e2 = -e1, -e2
    L = math.log(e1 / e2)
    for _ in range(HILBERT_MAX_STEPS):
        t = _nearest_translation([w.real for w in z], spec)
        ts = spec.embed(t)
        z = tuple(w - tj for w, tj in zip(z, ts))
        # z -> eps^(2k) z keeps prod y_j and shifts log(y1 / y2) by k L
        k = round(-math.log(z[0].imag / z[1].imag) / L)
        if k:
            s = spec.embed(spec.power(eps2, k))
            z = tuple(w * sj for w, sj in zip(z, s))
            continue
        row = _best_row(z, spec)
        if row is not None and row[0] < 1.0 - 1e-12:
            z = mobius_apply(row[1], z, spec)
            continue
        return z, True
    return z, False


def height_components(z, spec):
    """Reduced point, heights y_j and n(z) = prod_j max(1, y_j)."""
    z = tuple(complex(w) for w in z)
    if len(z) != spec.degree:
        raise ValueError(f"need {spec.degree} coordinates")
    if spec.degree == 1:
        zr, _ = reduce_sl2z(z[0])
        h = (max(1.0, zr.imag),)
        return HeightReport((zr,), h, h[0], True)
    zr, ok = _reduce_hilbert(z, spec)
    if math.prod(w.imag for w in zr) < COMPACT_PRODUCT:
        h = (1.0,) * spec.degree
    else:
        h = tuple(max(1.0, w.imag) for w in zr)
    return HeightReport(zr, h, math.prod(h), ok)


def n_of_T(T, z, spec):
    """n(T, z) = prod_j max(1, y_j(z) / T_j); T is a scalar or one value per factor."""
    if isinstance(T, (int, float)):
        T = (float(T),) * spec.degree
    rep = height_components(z, spec)
    return math.prod(max(1.0, h / t) for h, t in zip(rep.heights, T))
