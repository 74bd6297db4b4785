"""Acceptance gate: one recorded PASS/FAIL line per criterion."""

import math
import random
import statistics
import time
import warnings

import numpy as np
import pytest

from hyplattice.field import FieldSpec
from hyplattice.lab import ExperimentConfig, fit_error_exponent, run_count_experiment, \
    run_transform_suite
from hyplattice.orbit import (BoxSpec, count_box, enumerate_box_orbit, implied_entry_bound,
                              naive_oracle, sample_orbit)
from hyplattice.selberg import BumpSpec, build_bump, eta_charfun, eta_main_term, kernel_sum

RESULTS = []
OFF = 1e-4 * math.pi


def record(n, title, passed, detail, soft=False):
    status = "PASS" if passed else ("WARN" if soft else "FAIL")
    line = f"criterion {n}: {status}  {title}  ({detail})"
    RESULTS.append(line)
    print(line)
    if soft:
        if not passed:
            warnings.warn(line)
    else:
        assert passed, line


def test_criterion_1_oracle_equivalence():
    Z, F = FieldSpec.rational(), FieldSpec.quadratic(5)
    t0 = time.perf_counter()
    cases = []
    grid = [0.02, 0.1, 0.2, 0.35, 0.6, 0.9, 1.3, 1.7, 2.4, 3.5, 5.0, 7.0, 8.4]
    for z in (1j, 2j, 0.5 + 1j):
        for v in grid:
            V = (v + OFF,)
            if implied_entry_bound((z,), V, Z) <= 5:
                cases.append((Z, (z,), V))
    for v1, v2 in [(0.1, 0.1), (0.7, 1.9), (2.5, 0.4), (3.3, 3.3), (8.0, 0.3), (5.9, 5.9)]:
        V = (v1 + OFF, v2 + OFF)
        if implied_entry_bound((1j, 1j), V, F) <= 5:
            cases.append((F, (1j, 1j), V))
    bad = []
    bounds = []
    for spec, z, V in cases:
        K = implied_entry_bound(z, V, spec)
        bounds.append(K)
        fast = list(enumerate_box_orbit(z, V, spec))
        keys = [g for g, _ in fast]
        oracle = naive_oracle(z, V, K, spec)
        if len(keys) != len(set(keys)) or set(keys) != set(oracle):
            bad.append((spec.m, z, V))
            continue
        # half-open sub-boxes [U, V) agree as well
        lo = tuple(v / 3 for v in V)
        box = BoxSpec(lo, V)
        expect = sum(1 for u in oracle.values() if all(a <= x < b for a, x, b in zip(lo, u, V)))
        if count_box(z, box, spec).count != expect:
            bad.append((spec.m, z, V, "box"))
    wall = time.perf_counter() - t0
    n1 = sum(1 for c in cases if c[0].degree == 1)
    record(1, "fast enumeration equals naive oracle",
           not bad and wall < 60 and max(bounds) == 5 and n1 >= 20,
           f"{len(cases)} boxes ({n1} d=1, {len(cases) - n1} d=2), max entry bound "
           f"{max(bounds)}, mismatches {bad}, {wall:.1f}s < 60s")


def test_criterion_2_circle_problem():
    t0 = time.perf_counter()
    reps = run_count_experiment(ExperimentConfig(kind="hypercube", grid=(8.0, 13.0, 0.5)))
    wall = time.perf_counter() - t0
    by_T = {r.T: r for r in reps}
    late = [abs(by_T[T].ratio - 1) for T in (12.0, 12.5, 13.0)]
    early = [abs(by_T[T].ratio - 1) for T in (8.0, 8.5, 9.0)]
    ok = (all(e <= 0.05 for e in late) and statistics.median(late) < statistics.median(early)
          and all(r.near_boundary == 0 for r in reps) and wall < 120)
    record(2, "N(i;T) ~ 3e^T on T in {12, 12.5, 13}", ok,
           f"|ratio-1| late {[round(x, 5) for x in late]}, early {[round(x, 5) for x in early]}, "
           f"median {statistics.median(late):.2e} < {statistics.median(early):.2e}, "
           f"{wall:.1f}s < 120s")


def test_criterion_3_hilbert_hypercube():
    t0 = time.perf_counter()
    reps = run_count_experiment(ExperimentConfig(group_kind="hilbert", m=5, z=((0, 1), (0, 1)),
                                                 kind="hypercube", grid=(6.0, 6.0, 1.0)))
    wall = time.perf_counter() - t0
    r = reps[0]
    expect = 15 / 4 * math.exp(12.0)
    ok = (abs(r.ratio - 1) <= 0.10 and r.near_boundary == 0 and wall < 600
          and r.main_term == pytest.approx(expect, rel=1e-12))
    record(3, "N((i,i);6) ~ (15/4)e^12 for m=5", ok,
           f"count {r.count}, main {r.main_term:.1f}, ratio {r.ratio:.5f}, {wall:.1f}s < 600s")


def test_criterion_4_strip():
    t0 = time.perf_counter()
    reps = run_count_experiment(ExperimentConfig(
        group_kind="hilbert", m=5, z=((0, 1), (0, 1)), kind="strip", grid=(8.0, 11.0, 3.0),
        strip_E=(2,), strip_A=(0.0,), strip_B=(1.0,)))
    wall = time.perf_counter() - t0
    r8, r11 = reps
    expect = 7.5 * (math.cosh(1) - 1) * math.exp(11.0)
    ok = (abs(r11.ratio - 1) <= 0.15 and abs(r11.ratio - 1) < abs(r8.ratio - 1)
          and r11.main_term == pytest.approx(expect, rel=1e-12)
          and r8.near_boundary == r11.near_boundary == 0 and wall < 600)
    record(4, "N_E((i,i);T) ~ 7.5(cosh 1 - 1)e^T, E={2}, [0,1)", ok,
           f"ratio T=8 {r8.ratio:.5f}, T=11 {r11.ratio:.5f}, {wall:.1f}s < 600s")


def test_criterion_5_eta():
    errs = [abs(eta_charfun(0, V, 0.5).real / (4 * math.pi * V) - 1) for V in (0.5, 1, 5, 20)]
    spreads = {}
    for tau in (0.2, 0.35, 0.49):
        r = [abs(eta_charfun(0, V, tau).real - eta_main_term(0, V, tau)) * V ** (tau - 0.5)
             for V in (1e2, 1e3, 1e4)]
        spreads[tau] = max(r) / min(r)
    ok = max(errs) <= 1e-8 and all(s <= 3 for s in spreads.values())
    record(5, "eta(0,V;1/2) = 4 pi V and eta main-term error scaling", ok,
           f"max rel err {max(errs):.1e}, r(V) spread {({k: round(v, 3) for k, v in spreads.items()})}")


def test_criterion_6_transform_suite():
    checks = run_transform_suite()
    record(6, "Selberg transform property suite", all(c.passed for c in checks),
           "; ".join(f"{c.name}: {'ok' if c.passed else 'FAILED'} [{c.detail}]" for c in checks))


def test_criterion_7_sandwich():
    Z = FieldSpec.rational()
    rng = random.Random(20240607)
    z = (1j,)
    s = sample_orbit(z, (200.0,), Z)
    bad = []
    for _ in range(20):
        U = rng.uniform(0.5, 60.0)
        V = U + rng.uniform(0.5, 60.0)
        Y = 1e-3 * (V - U)
        res = s.count_box(BoxSpec((U,), (V,)))
        lo = kernel_sum(z, [build_bump(BumpSpec(U, V, Y, "inner"))], Z, sample=s)
        hi = kernel_sum(z, [build_bump(BumpSpec(U, V, Y, "outer"))], Z, sample=s)
        if not (lo <= res.count <= hi) or res.near_boundary:
            bad.append((U, V, lo, res.count, hi))
    record(7, "K- <= cnt <= K+ on 20 random boxes", not bad, f"violations {bad}")


def test_criterion_8_lattice_point_bound():
    Z = FieldSpec.rational()
    s = sample_orbit((1j,), (1000.0 + OFF,), Z)

    def ratios(Vs):
        out = []
        for V in Vs:
            for lo in (0.0, V / 2, V / 4):
                res = s.count_box(BoxSpec((lo,), (V,)))
                out.append(res.count / (V - lo + 1))
        return out

    C = max(ratios(np.geomspace(0.05, 50.0, 1500) + OFF))
    worst = max(ratios(np.geomspace(50.0, 1000.0, 1500) + OFF))
    record(8, "cnt(U,V;i) <= C (V-U+1), C fitted on V <= 50, checked to V = 1000",
           worst / C <= 1, f"C = {C:.4f}, worst ratio {worst:.4f}, margin {worst / C:.4f}")


def test_criterion_9_error_exponent():
    reps = run_count_experiment(ExperimentConfig(kind="hypercube", grid=(9.0, 13.0, 0.25)))
    fit = fit_error_exponent(reps)
    record(9, "fitted d=1 error exponent on T in [9, 13] <= 0.85 (informational)",
           fit.slope <= 0.85,
           f"slope {fit.slope:.3f}, r2 {fit.r2:.3f}, sign changes {fit.sign_changes}", soft=True)
