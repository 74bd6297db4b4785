"""Upper half-plane geometry: Moebius action, the u-invariant, distance.

Points of H are Python complex numbers with positive imaginary part; a
point of H^d is a tuple of d of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateDirection
from .field import ONE, ZERO, RingElement

ADMISSIBLE_GUARD = 1e-9


def multipoint(*coords):
    """Build a point of H^d from complex numbers or (x, y) pairs."""
    out = []
    for c in coords:
        z = complex(*c) if isinstance(c, (tuple, list)) else complex(c)
        if not z.imag > 0:
            raise ValueError(f"{z} is not in the upper half-plane")
        out.append(z)
    return tuple(out)


@dataclass(frozen=True)
class GroupElement:
    """Class of (a b; c d) in PSL_2, stored in canonical sign.

    The first nonzero entry among (c, d, a) has positive first embedding,
    so each class {g, -g} has exactly one representative.
    """

    a: RingElement
    b: RingElement
    c: RingElement
    d: RingElement

    @classmethod
    def make(cls, a, b, c, d, spec):
        a, b, c, d = (RingElement(*x) for x in (a, b, c, d))
        det = spec.sub(spec.mul(a, d), spec.mul(b, c))
        if det != ONE:
            raise ValueError(f"determinant {det} != 1")
        lead = next(x for x in (c, d, a) if x != ZERO)
        if spec.embed(lead)[0] < 0:
            a, b, c, d = (spec.neg(x) for x in (a, b, c, d))
        return cls(a, b, c, d)

    @classmethod
    def identity(cls):
        return cls(ONE, ZERO, ZERO, ONE)

    def compose(self, other, spec):
        """self * other."""
        m = spec.mul
        return GroupElement.make(
            spec.add(m(self.a, other.a), m(self.b, other.c)),
            spec.add(m(self.a, other.b), m(self.b, other.d)),
            spec.add(m(self.c, other.a), m(self.d, other.c)),
            spec.add(m(self.c, other.b), m(self.d, other.d)),
            spec,
        )

    def inverse(self, spec):
        return GroupElement.make(self.d, spec.neg(self.b), spec.neg(self.c), self.a, spec)

    def embedded(self, spec):
        """Per-embedding real matrices as tuples (a_j, b_j, c_j, d_j)."""
        cols = [spec.embed(x) for x in (self.a, self.b, self.c, self.d)]
        return [tuple(col[j] for col in cols) for j in range(spec.degree)]


def mobius_apply(g, z, spec):
    out = []
    for (a, b, c, d), zj in zip(g.embedded(spec), z):
        out.append((a * zj + b) / (c * zj + d))
    return tuple(out)


def u_invariant(z, w):
    """|z - w|^2 / (4 Im z Im w)."""
    dz = z - w
    return (dz.real * dz.real + dz.imag * dz.imag) / (4.0 * z.imag * w.imag)


def dist_from_u(u):
    """Hyperbolic distance 2 log(sqrt(u) + sqrt(u + 1)) = 2 asinh(sqrt(u))."""
    return 2.0 * math.asinh(math.sqrt(u))


def u_from_dist(t):
    s = math.sinh(0.5 * t)
    return s * s


def admissible_radius(V):
    """sqrt(V) + sqrt(V + 1): e^(dist/2) at u = V."""
    return math.sqrt(V) + math.sqrt(V + 1.0)


def cd_admissible(c, d0, z, V, spec):
    """Necessary condition on a bottom row (c, d0) for some g with u_j <= V_j.

    Im(gz)_j / Im z_j = |c_j z_j + d_j|^-2 lies in [e^-dist, e^dist], so
    |c_j z_j + d_j|^2 <= (sqrt(V_j) + sqrt(V_j + 1))^2.  Over-approximates by
    a relative guard band.
    """
    cs, ds = spec.embed(c), spec.embed(d0)
    for cj, dj, zj, Vj in zip(cs, ds, z, V):
        w = cj * zj + dj
        bound = admissible_radius(Vj) ** 2
        if w.real * w.real + w.imag * w.imag > bound * (1.0 + ADMISSIBLE_GUARD):
            return False
    return True


def t_interval(w0, zeta, R):
    """{t real : |w0 + t*zeta| <= R} as (lo, hi), or None when empty."""
    if abs(zeta) < 1e-300:
        raise DegenerateDirection(f"|zeta| = {abs(zeta)!r}")
    A = zeta.real * zeta.real + zeta.imag * zeta.imag
    cross = w0.imag * zeta.real - w0.real * zeta.imag   # Im(w0 * conj(zeta))
    perp2 = cross * cross / A
    if perp2 > R * R:
        return None
    center = -(w0.real * zeta.real + w0.imag * zeta.imag) / A
    half = math.sqrt(R * R - perp2) / math.sqrt(A)
    return center - half, center + half


def u_vector(g, z, spec):
    """Componentwise u((g z)_j, z_j)."""
    return tuple(u_invariant(w, zj) for w, zj in zip(mobius_apply(g, z, spec), z))
