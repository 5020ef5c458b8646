"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from bergman_lab.kernels import punctured_kernel
from bergman_lab.muckenhoupt import (
    BOUNDED,
    DIVERGENT,
    DiskFamily,
    ap_plus_scan,
    check_E_properties,
    cayley_power_condition,
    cayley_power_pair,
    random_step_function,
    tiles_in_rectangle,
)
from bergman_lab.projection_lab import (
    ModeFunction,
    blowup_experiment,
    blowup_ratio_oracle,
    doubling_differences,
    partial_sums_A,
    project_modes,
    schur_feasible,
)
from bergman_lab.quadrature import weighted_moment_quadrature
from bergman_lab.ranges import INF, PRange, range_disk_star, range_grid, range_hartogs, range_two_weight

# smallest ratio(300)/ratio(10) accepted at s'=1, p=3/2; the closed-form oracle gives 2.936
BLOWUP_GROWTH_THRESHOLD = 2.9
# ceiling on the same statistic at p=2
BLOWUP_P2_CEILING = 1.2
# lower bound on A_{10^6,1} - A_{10^3,1}
A1_INCREMENT_THRESHOLD = 0.2


class _Clock:
    def __init__(self, budget: float):
        self.budget = budget
        self.t0 = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    @property
    def ok(self) -> bool:
        return self.elapsed < self.budget

    def __str__(self):
        return f"{self.elapsed:.2f}s/<{self.budget:g}s"


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_criterion_01_moments(report):
    clock = _Clock(5)
    worst = 0.0
    count = 0
    for m in range(5):
        for sp in (-1.5, 0.0, 1.0, 2.5):
            if 2 * m + 2 + sp <= 0:
                continue
            q = weighted_moment_quadrature(m, sp)
            worst = max(worst, _rel(q, 2.0 / (2 * m + 2 + sp)))
            count += 1
    ok = worst <= 1e-8 and clock.ok
    report(1, ok, f"{count} moments, worst rel err {worst:.2e} (tol 1e-8), {clock}")
    assert worst <= 1e-8
    assert clock.ok


def _random_punctured(rng, n):
    r = rng.uniform(0.05, 0.95, n)
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def test_criterion_02_kernel_identities(report):
    clock = _Clock(5)
    rng = np.random.default_rng(20240601)
    z, zeta = _random_punctured(rng, 1000), _random_punctured(rng, 1000)
    w = z * np.conj(zeta)
    worst_h = worst_p = 0.0
    for sp in (-5, -3.5, 0, 1, 2, 4):
        closed = punctured_kernel(sp, z, zeta, "closed")
        homot = punctured_kernel(sp, z, zeta, "homotopy")
        worst_h = max(worst_h, float(np.max(np.abs(closed - homot) / np.abs(closed))))
        shifted = punctured_kernel(sp + 2, z, zeta, "closed")
        worst_p = max(worst_p, float(np.max(np.abs(shifted - closed / w) / np.abs(shifted))))
    ok = worst_h <= 1e-12 and worst_p <= 1e-12 and clock.ok
    report(2, ok, f"closed vs homotopy {worst_h:.1e}, period shift {worst_p:.1e} (tol 1e-12), {clock}")
    assert worst_h <= 1e-12 and worst_p <= 1e-12
    assert clock.ok


def _selector(sp: Fraction) -> PRange:
    # five-case table for the Hartogs triangle, written out independently
    k = math.ceil(sp / 2) - 1
    s = sp - 2 * k
    if sp > -2:
        hi = INF if k + 2 == 0 else (s + 2 * k + 4) / (k + 2)
        return PRange((s + 2 * k + 4) / (s + k + 2), hi)
    if -5 <= sp <= -2 or sp == -6:
        return PRange(Fraction(1), INF)
    if -6 < sp < -5:
        return PRange(2 - s, (2 - s) / (1 - s))
    return PRange((s + 2 * k + 4) / (k + 2), (s + 2 * k + 4) / (s + k + 2))


def test_criterion_03_range_tables(report):
    clock = _Clock(10)
    checks = []
    checks.append(range_hartogs(0) == PRange(Fraction(4, 3), Fraction(4)))
    checks.append(all(range_hartogs(sp).is_full for sp in (-2, -3, -5, -6)))
    D = 10**6
    # full grid: vectorized formulas, Hartogs against disk shifted by 2
    inflation = True
    for a in range(-8 * D, 8 * D + 1, D):
        N = np.arange(a, min(a + D, 8 * D + 1), dtype=np.int64)
        inflation &= bool(range_grid(N, D, "hartogs").same_as(range_grid(N + 2 * D, D, "disk")).all())
    # case selector against the exact scalar code and the vectorized code
    rng = np.random.default_rng(7)
    sample = set(rng.integers(-8 * D, 8 * D + 1, 4000).tolist())
    for b in range(-8, 9):
        sample.update(b * D + d for d in (-2, -1, 0, 1, 2) if -8 * D <= b * D + d <= 8 * D)
    sample = sorted(sample)
    grid = range_grid(np.array(sample, dtype=np.int64), D, "hartogs")
    mism = 0
    for i, n in enumerate(sample):
        sp = Fraction(n, D)
        want = _selector(sp)
        got = range_hartogs(sp)
        if got != want or range_disk_star(sp + 2) != want:
            mism += 1
            continue
        lo = Fraction(int(grid.lo_num[i]), int(grid.lo_den[i]))
        hi = INF if grid.hi_inf[i] else Fraction(int(grid.hi_num[i]), int(grid.hi_den[i]))
        if lo != want.lo or hi != want.hi:
            mism += 1
    ok = all(checks) and inflation and mism == 0 and clock.ok
    report(
        3,
        ok,
        f"anchors {all(checks)}, inflation on {16 * D + 1} grid points {inflation}, "
        f"selector mismatches {mism}/{len(sample)}, {clock}",
    )
    assert all(checks) and inflation and mism == 0
    assert clock.ok


def test_criterion_04_sum_dichotomy(report):
    clock = _Clock(30)
    a_small, a_big = partial_sums_A([10**3, 10**6], 1.0)
    inc = a_big - a_small
    # oracle: the same increment summed from the raw definition j(a_j^{1/j} - a_{j+1}^{1/j})
    j = np.arange(10**3 + 1, 10**6 + 1, dtype=float)
    raw = j * (1.0 / j - np.exp(-(j + 1) * np.log(j + 1) / j))
    oracle = math.fsum(raw)
    part1 = inc >= A1_INCREMENT_THRESHOLD and _rel(inc, oracle) < 1e-9
    ns = [10, 100, 1000, 10**4, 10**5]
    part2 = True
    finals = {}
    for p in (1.1, 1.5, 2.0):
        d = doubling_differences(ns, p)
        finals[p] = d[-1]
        monotone = all(b < a for a, b in zip(d, d[1:]))
        part2 &= monotone and d[-1] < 1e-6
    ok = part1 and part2 and clock.ok
    report(
        4,
        ok,
        f"A_1e6,1 - A_1e3,1 = {inc:.4f} (>= {A1_INCREMENT_THRESHOLD}, oracle {oracle:.4f}); "
        f"|A_2n,p - A_n,p| at n=1e5: "
        + ", ".join(f"p={p:g}: {v:.2e}" for p, v in finals.items())
        + f" (need monotone and < 1e-6), {clock}",
    )
    assert part1, "A_{n,1} divergence trend"
    assert part2, "doubling differences must decrease monotonically below 1e-6 by n=1e5"
    assert clock.ok


def test_criterion_05_endpoint_blowup(report):
    clock = _Clock(60)
    ns = [10, 30, 100, 300]
    series = blowup_experiment(1, 1.5, ns)
    growth = series.growth()
    oracle_growth = math.exp(blowup_ratio_oracle(1, 1.5, 300) - blowup_ratio_oracle(1, 1.5, 10))
    p2 = blowup_experiment(1, 2.0, ns)
    p2_stat = p2.growth()
    residual = max(series.endpoint_residuals)
    ok = (
        series.strictly_increasing()
        and growth > BLOWUP_GROWTH_THRESHOLD
        and _rel(growth, oracle_growth) < 1e-8
        and p2_stat < BLOWUP_P2_CEILING
        and residual <= 1e-8
        and clock.ok
    )
    report(
        5,
        ok,
        f"p=3/2 ratios {[round(r, 4) for r in series.ratios]}, growth {growth:.4f} "
        f"(> {BLOWUP_GROWTH_THRESHOLD}, oracle {oracle_growth:.4f}); p=2 growth exp({p2.log_ratios[-1] - p2.log_ratios[0]:.1f}) (< {BLOWUP_P2_CEILING}); "
        f"endpoint identity residual {residual:.1e}, {clock}",
    )
    assert series.strictly_increasing()
    assert growth > BLOWUP_GROWTH_THRESHOLD
    assert _rel(growth, oracle_growth) < 1e-8
    assert p2_stat < BLOWUP_P2_CEILING
    assert residual <= 1e-8
    assert clock.ok


def test_criterion_06_reproducing(report):
    clock = _Clock(10)
    pairs = [(m, sp) for sp in (-5, -3.5, -1, 0, 1.5, 3) for m in range(-2, 4) if 2 * m + 2 + sp > 0][:20]
    assert len(pairs) == 20
    worst = 0.0
    for m, sp in pairs:
        c = project_modes(sp, ModeFunction.monomial(m)).coefficient(m)
        worst = max(worst, abs(c - 1))
    zero = 0.0
    for j in (1, 2, 3, 5):
        zero = max(zero, max((abs(c) for c in project_modes(0, ModeFunction.conj_monomial(j)).coefficients.values()), default=0.0))
    # for s'=4, conj(z)^j lands on z^-j with coefficient (3 - j)/3
    mode_err = 0.0
    for j in (1, 2):
        exp = project_modes(4, ModeFunction.conj_monomial(j))
        mode_err = max(mode_err, abs(exp.coefficient(-j) - (3 - j) / 3))
        mode_err = max(mode_err, max((abs(c) for m, c in exp.coefficients.items() if m != -j), default=0.0))
    ok = worst <= 1e-10 and zero <= 1e-10 and mode_err <= 1e-10 and clock.ok
    report(
        6,
        ok,
        f"20 pairs worst |c-1| {worst:.1e}; conj annihilation {zero:.1e}; s'=4 z^-j modes err {mode_err:.1e}, {clock}",
    )
    assert worst <= 1e-10 and zero <= 1e-10 and mode_err <= 1e-10
    assert clock.ok


def test_criterion_07_schur(report):
    clock = _Clock(10)
    mism = []
    total = 0
    for i in range(25):
        sp = Fraction(-12 + i, 2)
        rng = range_disk_star(sp)
        for j in range(100):
            p = Fraction(105 + 5 * j, 100)
            total += 1
            if (schur_feasible(sp, p) is not None) != rng.contains(p):
                mism.append((sp, p))
    ok = not mism and clock.ok
    report(7, ok, f"{total} (s', p) points, {len(mism)} mismatches with range_disk_star, {clock}")
    assert not mism, mism[:5]
    assert clock.ok


def test_criterion_08_cayley_power(report):
    clock = _Clock(120)
    details, ok = [], True
    at_i = DiskFamily(centers=(0.0,), radii=tuple(2.0**-m for m in range(1, 9)))
    for s, k, p in ((1, 0, 2), (0.5, -2, 2), (1, 1, 2.2)):
        assert cayley_power_condition(s, k, p)
        mu1, mu2 = cayley_power_pair(s, k, p)
        special = ap_plus_scan(mu1, mu2, p, mode="special")
        general = ap_plus_scan(mu1, mu2, p, at_i, mode="general")
        target = (s - 2) * p
        slope = general.log_slope_at_i
        slope_ok = slope is not None and abs(slope - target) <= 0.1 * abs(target)
        this = special.verdict == BOUNDED and general.verdict == DIVERGENT and slope_ok
        ok &= this
        details.append(f"({s},{k},{p}): {special.verdict}/{general.verdict}, slope {slope:.3f} vs {target:.3f}")
    ok &= clock.ok
    report(8, ok, "; ".join(details) + f", {clock}")
    assert ok


def test_criterion_09_E_operator(report):
    clock = _Clock(10)
    rng = np.random.default_rng(99)
    tiles = tiles_in_rectangle(-2, 2, 4, -2)
    fails = 0
    worst = 0.0
    n = 0
    for p in (1.5, 2.0, 3.0):
        for _ in range(1000):
            subset = [tiles[i] for i in rng.choice(len(tiles), size=8, replace=False)]
            f = random_step_function(rng, subset)
            g = random_step_function(rng, subset)
            r = check_E_properties(f, g, p, rtol=1e-12)
            n += 1
            fails += not all(r)
            worst = max(worst, r.a_gap, r.b_gap, r.c_gap)
    ok = fails == 0 and clock.ok
    report(9, ok, f"{n} random step pairs, {fails} failures, worst gap {worst:.1e} (tol 1e-12), {clock}")
    assert fails == 0
    assert clock.ok


def test_criterion_10_two_weight(report):
    clock = _Clock(1)
    c1 = range_two_weight(0, 0).range == range_hartogs(0)
    c2 = range_two_weight(0, 2).range == PRange(Fraction(4, 3), Fraction(6))
    table_ok = True
    n = 0
    for sp in (Fraction(-3, 2), Fraction(-1, 2), Fraction(0), Fraction(1), Fraction(5, 2)):
        s = sp - 2 * (math.ceil(sp / 2) - 1)
        for t in (Fraction(-3), Fraction(0), Fraction(1, 2), Fraction(2), Fraction(7)):
            v = range_two_weight(sp, t)
            for p in (Fraction(11, 10), Fraction(3, 2), Fraction(2), Fraction(4), Fraction(9)):
                n += 1
                table_ok &= v.is_sharp_at(p) == (t - sp <= (2 - s) * p)
    ok = c1 and c2 and table_ok and clock.ok
    report(10, ok, f"(0,0) {c1}, (0,2) = (4/3, 6) {c2}, truth table {n} points {table_ok}, {clock}")
    assert c1 and c2 and table_ok
    assert clock.ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
