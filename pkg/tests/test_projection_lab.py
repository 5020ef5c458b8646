import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.errors import DivergentIntegral, InvalidArgument
from bergman_lab.projection_lab import (
    HolomorphicModeExpansion,
    ModeFunction,
    SchurParameters,
    blowup_endpoint,
    blowup_experiment,
    blowup_function,
    blowup_ratio_oracle,
    doubling_differences,
    partial_sum_A,
    partial_sums_A,
    project_modes,
    schur_box,
    schur_feasible,
    schur_numeric_check,
    schur_ratio,
    sequence_a,
)
from bergman_lab.quadrature import QuadratureSpec
from bergman_lab.ranges import decompose_exponent, range_disk_star


def test_sequence_a():
    assert sequence_a(1) == 1
    assert sequence_a(2) == 0.25
    assert sequence_a(3) == pytest.approx(1 / 27, rel=1e-15)
    # log path past the direct limit keeps the sequence strictly decreasing until underflow
    vals = [sequence_a(j) for j in range(25, 140)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(InvalidArgument):
        sequence_a(0)


def test_partial_sum_examples():
    assert partial_sum_A(1, 1) == pytest.approx(0.75, rel=1e-15)
    for p in (1.0, 1.5, 2.0, 3.0):
        assert partial_sum_A(1, p) == pytest.approx(1 - 0.5 ** (2 * p), rel=1e-14)
    assert partial_sum_A(1, 2) == pytest.approx(15 / 16, rel=1e-15)


def test_partial_sum_against_direct_definition():
    n = 40
    for p in (1.0, 1.3, 2.0):
        direct = math.fsum(j * (sequence_a(j) ** (p / j) - sequence_a(j + 1) ** (p / j)) for j in range(1, n + 1))
        assert partial_sum_A(n, p) == pytest.approx(direct, rel=1e-13)


def test_A1_grows_past_three():
    ns = [2**i for i in range(21)]
    vals = partial_sums_A(ns, 1.0)
    assert all(b > a for a, b in zip(vals, vals[1:]))
    first = next(n for n, v in zip(ns, vals) if v > 3)
    assert first <= 10**6
    # each doubling adds a positive increment that does not shrink to zero
    incs = np.diff(vals)
    assert incs[-1] > 0.5


def test_convergent_sums_are_cauchy_for_p2():
    d = doubling_differences([10**i for i in range(1, 6)], 2.0)
    assert all(b < a for a, b in zip(d, d[1:]))


@pytest.mark.parametrize("sp", [-5, -3.5, -1, 0, 0.5, 2, 4.5])
def test_reproducing(sp):
    for m in range(-4, 6):
        f = ModeFunction.monomial(m, 2.5)
        if 2 * m + 2 + sp > 0:
            assert project_modes(sp, f).coefficient(m) == pytest.approx(2.5, rel=1e-10)
        else:
            assert m not in project_modes(sp, f).coefficients


def test_annihilation_and_shift():
    assert project_modes(0, ModeFunction.conj_monomial(1)).coefficients == {}
    exp = project_modes(4, ModeFunction.conj_monomial(1))
    assert set(exp.coefficients) == {-1}
    assert exp.coefficient(-1) == pytest.approx(2 / 3, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.integers(-3, 5), st.floats(-3, 3), min_size=1, max_size=5), st.sampled_from([-3, -1, 0, 1.5]))
def test_idempotent(coeffs, sp):
    coeffs = {m: c for m, c in coeffs.items() if c != 0}
    from bergman_lab.quadrature import RadialProfile

    f = ModeFunction({m: RadialProfile.monomial(abs(m) + 0.5, c) for m, c in coeffs.items()})
    once = project_modes(sp, f)
    twice = project_modes(sp, once.as_mode_function())
    for m, c in once.coefficients.items():
        assert twice.coefficient(m) == pytest.approx(c, rel=1e-10, abs=1e-14)
    cut = -(1 + sp / 2)
    assert all(m > cut for m in once.coefficients)


def test_expansion_rejects_non_basis():
    with pytest.raises(InvalidArgument):
        HolomorphicModeExpansion({-1: 1.0}, 0.0)


@pytest.mark.parametrize("sp, n", [(1, 5), (1, 40), (3, 12), (-5, 20), (Fraction(-7, 2), 8)])
def test_blowup_projection_coefficient(sp, n):
    dec = decompose_exponent(sp)
    exp = project_modes(sp, blowup_function(sp, n))
    assert list(exp.coefficients) == [-(dec.k + 1)]
    want = float(dec.s) * partial_sum_A(n, 1.0)
    assert exp.coefficient(-(dec.k + 1)) == pytest.approx(want, rel=1e-10)


def test_blowup_matches_oracle_and_identity():
    series = blowup_experiment(1, 1.5, [10, 30, 100, 300])
    assert series.endpoint_p == 1.5
    assert len(series.ratios) == len(series.norms_f) == len(series.norms_Bf) == 4
    for n, lr in zip(series.n_values, series.log_ratios):
        assert lr == pytest.approx(blowup_ratio_oracle(1, 1.5, n), rel=1e-10)
    assert max(series.endpoint_residuals) < 1e-8


@pytest.mark.parametrize("sp", [1, 3, -5])
def test_blowup_dichotomy(sp):
    ns = [10, 30, 100, 300]
    endpoint = blowup_endpoint(sp)
    rng = range_disk_star(sp)
    assert endpoint in (rng.lo, rng.hi)
    at = blowup_experiment(sp, float(endpoint), ns)
    assert at.strictly_increasing()
    assert at.growth() > 2.5
    mid = float((rng.lo + rng.hi) / 2)
    inside = blowup_experiment(sp, mid, ns)
    assert inside.image_in_Lp
    assert max(inside.ratios) / inside.ratios[0] < 1.2


def test_blowup_outside_image_flag():
    # nu <= 0 for s'=1 once p >= 3
    series = blowup_experiment(1, 3.5, [10, 20])
    assert not series.image_in_Lp
    assert math.isnan(series.growth())


def test_blowup_input_validation():
    with pytest.raises(InvalidArgument):
        blowup_experiment(1, 1.0, [10])
    with pytest.raises(InvalidArgument):
        blowup_experiment(1, 1.5, [30, 10])


def test_schur_examples():
    params = schur_feasible(1, 2)
    assert (params.delta, params.sigma) == (-0.25, -0.75)
    assert schur_feasible(1, 1.5) is None
    assert schur_feasible(-2, 10) is not None
    with pytest.raises(InvalidArgument):
        schur_box(1, 1)


@settings(max_examples=200)
@given(
    st.fractions(min_value=-7, max_value=7, max_denominator=8),
    st.fractions(min_value=Fraction(21, 20), max_value=8, max_denominator=20),
)
def test_schur_matches_range(sp, p):
    assert (schur_feasible(sp, p) is not None) == range_disk_star(sp).contains(p)


def test_schur_numeric_bounded_and_stable():
    params = schur_feasible(1, 2)
    pts = [0.5, 0.9, 0.99, 0.999, 1e-1, 1e-3]
    sup = schur_numeric_check(1, params, pts)
    tighter = schur_numeric_check(1, params, pts, QuadratureSpec(rel_tol=1e-12))
    assert math.isfinite(sup)
    assert tighter == pytest.approx(sup, rel=1e-8)
    near = schur_numeric_check(1, params, [0.9999, 1e-5])
    assert near < 2 * sup


def test_schur_bad_sigma_blows_up_at_zero():
    # sigma q > -(k+1) breaks the small-|z| balance
    bad = SchurParameters(-0.25, -0.3, 2.0)
    vals = [schur_ratio(1, bad, r, 2.0) for r in (1e-1, 1e-2, 1e-3)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 5 * vals[0]


def test_schur_delta_zero_blows_up_at_boundary():
    bad = SchurParameters(0.0, -0.75, 2.0)
    vals = [schur_ratio(1, bad, r, 2.0) for r in (0.9, 0.99, 0.999)]
    assert vals[0] < vals[1] < vals[2]


def test_schur_divergent_inner_integral():
    with pytest.raises(DivergentIntegral):
        schur_ratio(1, SchurParameters(-0.25, -1.5, 2.0), 0.5, 2.0)
