import math
import random

import pytest
from hypothesis import given, strategies as st

from hyplattice.errors import DegenerateDirection
from hyplattice.field import RingElement
from hyplattice.geometry import (GroupElement, cd_admissible, dist_from_u, mobius_apply,
                                 multipoint, t_interval, u_from_dist, u_invariant, u_vector)


def R(p, q=0):
    return RingElement(p, q)


def test_mobius_examples(Z):
    i = multipoint(1j)
    assert mobius_apply(GroupElement.identity(), multipoint(0.3 + 2j), Z) == (0.3 + 2j,)
    S = GroupElement.make(R(0), R(-1), R(1), R(0), Z)
    assert mobius_apply(S, i, Z)[0] == pytest.approx(1j)
    T = GroupElement.make(R(1), R(1), R(0), R(1), Z)
    assert mobius_apply(T, i, Z)[0] == pytest.approx(1 + 1j)


def test_group_element_canonical_sign(Z, F5):
    g = GroupElement.make(R(0), R(1), R(-1), R(0), Z)
    assert g == GroupElement.make(R(0), R(-1), R(1), R(0), Z)
    assert g.c == R(1)
    h = GroupElement.make(R(-1), R(0), R(0), R(-1), F5)
    assert h == GroupElement.identity()
    with pytest.raises(ValueError):
        GroupElement.make(R(2), R(0), R(0), R(1), Z)


def test_u_invariant_examples():
    assert u_invariant(1j, 1j) == 0
    assert u_invariant(2j, 1j) == pytest.approx(1 / 8)
    assert u_invariant(1 + 1j, 1j) == pytest.approx(1 / 4)


def test_dist_examples():
    assert dist_from_u(0) == 0
    assert u_from_dist(dist_from_u(5)) == pytest.approx(5, rel=1e-12)
    assert dist_from_u(0.25) == pytest.approx(2 * math.log((1 + math.sqrt(5)) / 2), rel=1e-12)


@given(st.floats(0.0, 30.0))
def test_dist_roundtrip(t):
    assert dist_from_u(u_from_dist(t)) == pytest.approx(t, rel=1e-12, abs=1e-12)


@given(st.floats(0.0, 1e12))
def test_u_roundtrip(u):
    assert u_from_dist(dist_from_u(u)) == pytest.approx(u, rel=1e-12, abs=1e-300)


def _random_sl2r(rng):
    a, b, c = (rng.uniform(-3, 3) for _ in range(3))
    if abs(a) < 0.1:
        a = 0.1
    return a, b, c, (1 + b * c) / a


def _act(m, z):
    a, b, c, d = m
    return (a * z + b) / (c * z + d)


def test_u_is_point_pair_invariant():
    rng = random.Random(1)
    for _ in range(1000):
        m = _random_sl2r(rng)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        w = complex(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        assert u_invariant(_act(m, z), _act(m, w)) == pytest.approx(u_invariant(z, w), rel=1e-9,
                                                                    abs=1e-12)


def test_trace_form_identity_at_i(Z):
    rng = random.Random(2)
    done = 0
    while done < 1000:
        c, d = rng.randint(-50, 50), rng.randint(-50, 50)
        if math.gcd(c, d) != 1:
            continue
        if c == 0:
            a, b = d, rng.randint(-50, 50)
        else:
            a = pow(d, -1, abs(c)) if abs(c) > 1 else 0
            b = (a * d - 1) // c
            t = rng.randint(-5, 5)
            a, b = a + t * c, b + t * d
        g = GroupElement.make(R(a), R(b), R(c), R(d), Z)
        u = u_vector(g, (1j,), Z)[0]
        assert 4 * u + 2 == pytest.approx(a * a + b * b + c * c + d * d, rel=1e-9)
        done += 1


def test_cd_admissible_examples(Z, F5):
    assert cd_admissible(R(0), R(1), (1j,), (0.01,), Z)
    assert cd_admissible(R(0), R(1), (0.3 + 5j, 2j), (1e-3, 1e-3), F5)
    assert not cd_admissible(R(10), R(0), (1j,), (1.0,), Z)
    assert cd_admissible(R(1), R(1), (1j,), (1.0,), Z)


def test_t_interval_examples():
    lo, hi = t_interval(0j, 1 + 0j, 2.0)
    assert (lo, hi) == pytest.approx((-2, 2))
    assert t_interval(5j, 1 + 0j, 2.0) is None
    assert t_interval(3 + 0j, 1 + 0j, 4.0) == pytest.approx((-7, 1))
    with pytest.raises(DegenerateDirection):
        t_interval(1j, 0j, 1.0)


@given(st.complex_numbers(max_magnitude=100), st.complex_numbers(min_magnitude=0.01,
                                                                 max_magnitude=100),
       st.floats(0, 100))
def test_t_interval_endpoints_lie_on_circle(w0, zeta, R):
    iv = t_interval(w0, zeta, R)
    if iv is None:
        # perpendicular distance exceeds R
        t0 = -(w0 * zeta.conjugate()).real / abs(zeta) ** 2
        assert abs(w0 + t0 * zeta) > R * (1 - 1e-9)
        return
    for t in iv:
        assert abs(w0 + t * zeta) == pytest.approx(R, rel=1e-6, abs=1e-6)
