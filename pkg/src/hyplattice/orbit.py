"""Enumeration of lattice points gamma with componentwise u((gamma z)_j, z_j) <= V_j.

Engine
------
Every class in PSL_2(O) is written with canonical sign, so either c = 0 and
sigma_1(d) > 0, or sigma_1(c) > 0.

* c = 0: d is a unit, a = d^-1, and b runs over O.
* c != 0: |c_j z_j + d_j|^2 <= (sqrt(V_j) + sqrt(V_j + 1))^2 bounds both c and
  d; for coprime (c, d) a Bezout pair (a0, b0) gives every completion as
  a = a0 + t c, b = b0 + t d with t in O.

In both cases 2 sqrt(u_j) y_j = |w0_j + sigma_j(t) zeta_j| with
zeta_j = c_j z_j + d_j and w0_j = -c_j z_j^2 + (a0_j - d_j) z_j + b0_j, which
confines sigma_j(t) to an interval per embedding.  Each candidate is accepted
by its floating u-values.

Bounds are widened by a guard band so that u-values just above V are returned
too; the counting layer uses them for the near-boundary audit.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CostGuard, InvalidBox, InvalidStrip, OverflowGuard
from .field import ONE, ZERO, RingElement, _coeff_ranges, bezout, units_in_box
from .geometry import GroupElement, admissible_radius, t_interval, u_from_dist

GUARD = 4e-9
BOUNDARY_TOL = 1e-9
DEFAULT_CAP = 1e9
ORACLE_MAX_BOUND = 12
ORACLE_MAX_CANDIDATES = 10**9


@dataclass(frozen=True)
class BoxSpec:
    """Half-open box prod_j [U_j, V_j) in u-coordinates."""

    U: tuple
    V: tuple

    def __post_init__(self):
        U, V = tuple(float(x) for x in self.U), tuple(float(x) for x in self.V)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if len(U) != len(V):
            raise InvalidBox("U and V differ in length")
        for lo, hi in zip(U, V):
            if not 0 <= lo < hi:
                raise InvalidBox(f"need 0 <= U_j < V_j, got [{lo}, {hi})")


@dataclass(frozen=True)
class StripSpec:
    """Distance strip: dist_j in [A_j, B_j) for j in E, dist_j <= T elsewhere.

    ``E`` holds 1-based coordinate indices; ``A`` and ``B`` align with ``E``.
    """

    E: tuple
    A: tuple
    B: tuple
    T: float

    def __post_init__(self):
        for name in ("E", "A", "B"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "E", tuple(int(j) for j in self.E))
        if not self.E:
            raise InvalidStrip("E must be nonempty")
        if len(set(self.E)) != len(self.E):
            raise InvalidStrip("E has repeated indices")
        if not len(self.A) == len(self.B) == len(self.E):
            raise InvalidStrip("A, B must align with E")
        for a, b in zip(self.A, self.B):
            # A_j = B_j is allowed and describes an empty interval
            if not 0 <= a <= b:
                raise InvalidStrip(f"need 0 <= A_j <= B_j, got [{a}, {b})")
        if self.T < 0:
            raise InvalidStrip("T must be >= 0")

    def validate(self, d):
        if any(not 1 <= j <= d for j in self.E):
            raise InvalidStrip(f"E must be a subset of 1..{d}")
        if len(self.E) >= d:
            raise InvalidStrip("the complement Q of E must be nonempty")

    def Q(self, d):
        return tuple(j for j in range(1, d + 1) if j not in self.E)


@dataclass
class CountResult:
    count: int
    candidates: int
    near_boundary: int
    wall_s: float


def _guarded(V):
    return V * (1.0 + GUARD) + GUARD


# ---------------------------------------------------------------------------
# scanners (module level so worker processes can run them)


def _c_values(spec, z, Vg, cap):
    bounds = []
    for zj, Vj in zip(z, Vg):
        b = admissible_radius(Vj) / zj.imag
        if b > cap:
            raise OverflowGuard(f"bound on c is {b:.3g} > {cap:.3g}")
        bounds.append(b * (1 + 1e-9) + 1e-9)
    out = []
    lo = [-b for b in bounds]
    for q, pmin, pmax in _coeff_ranges(lo, bounds, spec):
        for p in range(pmin, pmax + 1):
            if p == 0 and q == 0:
                continue
            if spec.embed((p, q))[0] > 0:
                out.append((p, q))
    return out


def _scan_rational(spec, z, V, cs, include_c0, want, cap):
    zc = z[0]
    y = zc.imag
    Vg = _guarded(V[0])
    R = admissible_radius(Vg) * (1 + 1e-12)
    R2 = R * R
    rad = 2.0 * math.sqrt(Vg) * y
    inv4y2 = 1.0 / (4.0 * y * y)
    z2 = zc * zc
    gcd = math.gcd
    us, mats = [], []
    cand = 0

    def run_t(a0, b0, c, d0, w0, zeta):
        nonlocal cand
        iv = t_interval(w0, zeta, rad)
        if iv is None:
            return
        slack = 1e-9 * (1.0 + abs(iv[0]) + abs(iv[1]))
        if iv[1] - iv[0] > cap:
            raise OverflowGuard("translation range exceeds cap")
        for t in range(math.ceil(iv[0] - slack), math.floor(iv[1] + slack) + 1):
            cand += 1
            w = w0 + t * zeta
            u = (w.real * w.real + w.imag * w.imag) * inv4y2
            if u <= Vg:
                us.append(u)
                if want:
                    mats.append(((a0 + t * c, 0), (b0 + t * d0, 0), (c, 0), (d0, 0)))

    if include_c0:
        run_t(1, 0, 0, 1, 0j, 1 + 0j)
    for (c, _) in cs:
        cy = c * y
        rem = R2 - cy * cy
        if rem < 0:
            continue
        h = math.sqrt(rem)
        cx = c * zc.real
        for d0 in range(math.ceil(-cx - h), math.floor(-cx + h) + 1):
            if gcd(c, d0) != 1:
                continue
            a0 = pow(d0, -1, c) if c > 1 else 0
            b0 = (a0 * d0 - 1) // c
            zeta = complex(cx + d0, cy)
            w0 = -c * z2 + (a0 - d0) * zc + b0
            run_t(a0, b0, c, d0, w0, zeta)
    return us, mats, cand


def _scan_quadratic(spec, z, V, cs, include_c0, want, cap):
    w1, w2 = spec.omega
    gap = spec.omega_gap
    mul, add = spec.mul, spec.add
    Vg = [_guarded(v) for v in V]
    R = [admissible_radius(v) * (1 + 1e-12) for v in Vg]
    rad = [2.0 * math.sqrt(v) * zj.imag for v, zj in zip(Vg, z)]
    inv4y2 = [1.0 / (4.0 * zj.imag * zj.imag) for zj in z]
    za, zb = z
    za2, zb2 = za * za, zb * zb
    Va, Vb = Vg
    ia, ib = inv4y2
    us_a, us_b, mats = [], [], []
    cand = 0

    def run_t(a0, b0, c, d0):
        nonlocal cand
        ca, cb = spec.embed(c)
        da, db = spec.embed(d0)
        zeta_a = ca * za + da
        zeta_b = cb * zb + db
        # recentre (a0, b0) so the translation parameter stays small
        wa = -ca * za2 + (a0[0] + a0[1] * w1 - da) * za + (b0[0] + b0[1] * w1)
        wb = -cb * zb2 + (a0[0] + a0[1] * w2 - db) * zb + (b0[0] + b0[1] * w2)
        ta = -(wa.real * zeta_a.real + wa.imag * zeta_a.imag) / abs(zeta_a) ** 2
        tb = -(wb.real * zeta_b.real + wb.imag * zeta_b.imag) / abs(zeta_b) ** 2
        q0 = round((ta - tb) / gap)
        p0 = round(ta - q0 * w1)
        if p0 or q0:
            t0 = RingElement(p0, q0)
            a0 = add(a0, mul(t0, c))
            b0 = add(b0, mul(t0, d0))
            wa = -ca * za2 + (a0[0] + a0[1] * w1 - da) * za + (b0[0] + b0[1] * w1)
            wb = -cb * zb2 + (a0[0] + a0[1] * w2 - db) * zb + (b0[0] + b0[1] * w2)
        iva = t_interval(wa, zeta_a, rad[0])
        if iva is None:
            return
        ivb = t_interval(wb, zeta_b, rad[1])
        if ivb is None:
            return
        if max(iva[1] - iva[0], ivb[1] - ivb[0]) > cap:
            raise OverflowGuard("translation range exceeds cap")
        slack = 1e-9 * (1.0 + max(abs(iva[0]), abs(iva[1]), abs(ivb[0]), abs(ivb[1])))
        for q, pmin, pmax in _coeff_ranges((iva[0], ivb[0]), (iva[1], ivb[1]), spec, slack):
            qa, qb = q * w1, q * w2
            for p in range(pmin, pmax + 1):
                cand += 1
                s = p + qa
                w = wa + s * zeta_a
                u1 = (w.real * w.real + w.imag * w.imag) * ia
                if u1 > Va:
                    continue
                s = p + qb
                w = wb + s * zeta_b
                u2 = (w.real * w.real + w.imag * w.imag) * ib
                if u2 > Vb:
                    continue
                us_a.append(u1)
                us_b.append(u2)
                if want:
                    t = RingElement(p, q)
                    mats.append((add(a0, mul(t, c)), add(b0, mul(t, d0)), c, d0))

    if include_c0:
        for d0 in units_in_box([r * (1 + 1e-9) for r in R], spec):
            if spec.embed(d0)[0] > 0:
                run_t(spec.unit_inverse(d0), ZERO, ZERO, d0)
    for c in cs:
        c = RingElement(*c)
        ca, cb = spec.embed(c)
        rem_a = R[0] ** 2 - (ca * za.imag) ** 2
        rem_b = R[1] ** 2 - (cb * zb.imag) ** 2
        if rem_a < 0 or rem_b < 0:
            continue
        ha, hb = math.sqrt(rem_a), math.sqrt(rem_b)
        ma, mb = -ca * za.real, -cb * zb.real
        slack = 1e-9 * (1.0 + abs(ma) + abs(mb) + ha + hb)
        for q, pmin, pmax in _coeff_ranges((ma - ha, mb - hb), (ma + ha, mb + hb), spec, slack):
            for p in range(pmin, pmax + 1):
                d0 = RingElement(p, q)
                ab = bezout(c, d0, spec)
                if ab is None:
                    continue
                run_t(ab[0], ab[1], c, d0)
    return (us_a, us_b), mats, cand


def _scan(args):
    spec, z, V, cs, include_c0, want, cap = args
    if spec.degree == 1:
        us, mats, cand = _scan_rational(spec, z, V, cs, include_c0, want, cap)
        arr = np.asarray(us, dtype=float).reshape(-1, 1)
    else:
        (ua, ub), mats, cand = _scan_quadratic(spec, z, V, cs, include_c0, want, cap)
        arr = np.column_stack([np.asarray(ua, dtype=float), np.asarray(ub, dtype=float)])
    return arr, mats, cand


def _check_inputs(z, V, spec):
    if len(z) != spec.degree or len(V) != spec.degree:
        raise ValueError(f"need {spec.degree} coordinates")
    if any(not v > 0 for v in V):
        raise ValueError("V_j must be positive")
    if not spec.is_euclidean:
        from .errors import UnsupportedField
        raise UnsupportedField(f"m={spec.m} not supported by the enumeration engine")


def _run_engine(z, V, spec, threads=1, want=False, cap=DEFAULT_CAP):
    _check_inputs(z, V, spec)
    z = tuple(complex(w) for w in z)
    V = tuple(float(v) for v in V)
    Vg = [_guarded(v) for v in V]
    cs = _c_values(spec, z, Vg, cap)
    threads = max(1, int(threads))
    if threads == 1:
        chunks = [cs]
    else:
        n = threads * 4
        chunks = [cs[i::n] for i in range(n)]
    jobs = [(spec, z, V, chunk, i == 0, want, cap) for i, chunk in enumerate(chunks)]
    if threads == 1:
        results = [_scan(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_scan, jobs))
    arr = np.concatenate([r[0] for r in results], axis=0)
    mats = [m for r in results for m in r[1]]
    cand = sum(r[2] for r in results)
    return arr, mats, cand


# ---------------------------------------------------------------------------
# public API


class OrbitSample:
    """All enumerated u-vectors with u_j <= V_j (plus a thin guard band).

    One sample answers every count whose region lies inside [0, V].
    """

    def __init__(self, u, candidates, V, wall_s):
        self.u = u
        self.candidates = candidates
        self.V = tuple(V)
        self.wall_s = wall_s

    def count(self, lower, upper, closed):
        """Count rows with lower_j <= u_j < upper_j (<= where closed_j)."""
        t0 = time.perf_counter()
        u = self.u
        d = u.shape[1]
        if any(up > v * (1 + 1e-12) for up, v in zip(upper, self.V)):
            raise ValueError("region exceeds the sampled box")
        inside = np.ones(len(u), dtype=bool)
        near = np.zeros(len(u), dtype=bool)
        widened = np.ones(len(u), dtype=bool)
        for j in range(d):
            col = u[:, j]
            tol = BOUNDARY_TOL * (1.0 + col)
            lo, hi = lower[j], upper[j]
            ok = col >= lo
            ok &= (col <= hi) if closed[j] else (col < hi)
            inside &= ok
            widened &= (col >= lo - tol) & (col <= hi + tol)
            nj = np.abs(col - hi) <= tol
            if lo > 0:
                nj |= np.abs(col - lo) <= tol
            near |= nj
        return CountResult(
            count=int(inside.sum()),
            candidates=self.candidates,
            near_boundary=int((near & widened).sum()),
            wall_s=self.wall_s + time.perf_counter() - t0,
        )

    def count_box(self, box):
        return self.count(box.U, box.V, (False,) * len(box.V))

    def count_hypercube(self, T):
        v = u_from_dist(T)
        d = self.u.shape[1]
        return self.count((0.0,) * d, (v,) * d, (True,) * d)

    def count_strip(self, strip):
        lower, upper, closed = _strip_region(strip, self.u.shape[1])
        return self.count(lower, upper, closed)


def _strip_region(strip, d):
    strip.validate(d)
    lower, upper, closed = [0.0] * d, [u_from_dist(strip.T)] * d, [True] * d
    for j, a, b in zip(strip.E, strip.A, strip.B):
        lower[j - 1] = u_from_dist(a)
        upper[j - 1] = u_from_dist(b)
        closed[j - 1] = False
    return lower, upper, closed


def sample_orbit(z, V, spec, threads=1, cap=DEFAULT_CAP):
    t0 = time.perf_counter()
    arr, _, cand = _run_engine(z, V, spec, threads=threads, cap=cap)
    return OrbitSample(arr, cand, V, time.perf_counter() - t0)


def enumerate_box_orbit(z, V, spec, cap=DEFAULT_CAP):
    """Yield (GroupElement, u-vector) for every class with u_j <= V_j, once each."""
    arr, mats, _ = _run_engine(z, V, spec, want=True, cap=cap)
    for row, (a, b, c, d) in zip(arr, mats):
        if all(x <= v for x, v in zip(row, V)):
            yield GroupElement(RingElement(*a), RingElement(*b),
                               RingElement(*c), RingElement(*d)), tuple(float(x) for x in row)


def count_box(z, box, spec, threads=1):
    """cnt(U, V; z): classes with U_j <= u_j < V_j for all j."""
    return sample_orbit(z, box.V, spec, threads).count_box(box)


def count_hypercube(z, T, spec, threads=1):
    """N(z; T): classes with dist((gamma z)_j, z_j) <= T for all j."""
    if T < 0:
        raise ValueError("T must be >= 0")
    v = u_from_dist(T)
    # V must be positive for the engine; T = 0 still samples the stabiliser.
    sample = sample_orbit(z, (max(v, 1e-12),) * spec.degree, spec, threads)
    return sample.count_hypercube(T)


def count_strip(z, strip, spec, threads=1):
    """N_E(z; T) for the strip region."""
    lower, upper, closed = _strip_region(strip, spec.degree)
    sample = sample_orbit(z, [max(v, 1e-12) for v in upper], spec, threads)
    return sample.count(lower, upper, closed)


# ---------------------------------------------------------------------------
# independent ground truth


def implied_entry_bound(z, V, spec):
    """Coefficient bound K such that every gamma with u_j <= V_j has entries with |p|, |q| <= K.

    With h_j mapping i to z_j, |(h^-1 g h)|_F^2 = 4u + 2, so every entry of
    g_j is bounded by cond(h_j) * sqrt(4 V_j + 2).
    """
    bounds = []
    for zj, Vj in zip(z, V):
        x, y = zj.real, zj.imag
        tr = y + (x * x + 1.0) / y
        lam = 0.5 * (tr + math.sqrt(max(tr * tr - 4.0, 0.0)))
        bounds.append(lam * math.sqrt(4.0 * Vj + 2.0))
    from .field import coeff_bound_for
    return coeff_bound_for(bounds, spec)


def naive_oracle(z, V, entry_bound, spec):
    """Exhaustive scan over matrices with coefficients bounded by entry_bound.

    Loops over (a, c, d) and solves b = (a d - 1) / c exactly (or scans b when
    c = 0), canonicalises the sign and keeps u_j <= V_j computed through the
    Moebius action.  Returns {GroupElement: u-vector}.
    """
    if entry_bound > ORACLE_MAX_BOUND:
        raise CostGuard(f"entry_bound {entry_bound} > {ORACLE_MAX_BOUND}")
    B = int(entry_bound)
    coeffs = range(-B, B + 1)
    if spec.degree == 1:
        elems = [RingElement(p, 0) for p in coeffs]
    else:
        elems = [RingElement(p, q) for p, q in product(coeffs, coeffs)]
    if len(elems) ** 3 > ORACLE_MAX_CANDIDATES:
        raise CostGuard("oracle scan exceeds 1e9 candidates")
    z = tuple(complex(w) for w in z)
    in_range = set(elems)
    out = {}

    def keep(a, b, c, d):
        g = GroupElement.make(a, b, c, d, spec)
        if g in out:
            return
        u = tuple(
            abs(-cj * zj * zj + (aj - dj) * zj + bj) ** 2 / (4.0 * zj.imag ** 2)
            for (aj, bj, cj, dj), zj in zip(g.embedded(spec), z))
        if all(x <= v for x, v in zip(u, V)):
            out[g] = u

    for c in elems:
        for d in elems:
            if c == ZERO and d == ZERO:
                continue
            for a in elems:
                ad1 = spec.sub(spec.mul(a, d), ONE)
                if c == ZERO:
                    if ad1 == ZERO:
                        for b in elems:
                            keep(a, b, c, d)
                    continue
                b = spec.exact_div(ad1, c)
                if b is not None and b in in_range:
                    keep(a, b, c, d)
    return out
