import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subordkit import apps, domains, fncat, means, thresholds
from subordkit.errors import NotConvexError, ParameterError

one = fncat.constant(1.0)
z = fncat.identity()


def test_constant_theta_margins_equal_min_re_phi():
    pair = means.ThetaPhiPair(one, fncat.constant(2.5 + 1j))
    assert apps.condition_check("hypo2", pair).min_margin == pytest.approx(2.5)
    assert apps.condition_check("z1", pair).min_margin == pytest.approx(2.5)


def test_hypo3_with_unit_bound():
    r = apps.condition_check("hypo3", means.ThetaPhiPair(one, fncat.constant(13.0)), {"M": 1})
    assert r.holds and r.min_margin == pytest.approx(1)
    r = apps.condition_check("hypo3", means.ThetaPhiPair(one, fncat.constant(11.0)), {"M": 1})
    assert not r.holds


def test_hypo2_detects_failure():
    pair = means.ThetaPhiPair(fncat.affine(1.0, 1.0), fncat.constant(3.0))
    # at z → 1: 5|z| - Re z = 4 > 3
    assert not apps.condition_check("hypo2", pair).holds


def test_power_case_precondition():
    pair = means.ThetaPhiPair(fncat.affine(1.0, 0.25), one)
    r = apps.condition_check("power", pair, {"gamma": 0.5})
    assert r.extra["precondition"] and r.extra["theta_prime_0"] == [0.25, 0.0]
    assert math.isfinite(r.min_margin)
    bad = means.ThetaPhiPair(fncat.affine(1.0, -0.25), one)
    assert not apps.condition_check("power", bad, {"gamma": 0.5}).extra["precondition"]


def test_marx_strohhacker_halfplane_exact():
    r = apps.marx_strohhacker_check(domains.make_domain("halfplane"))
    assert r.convex_deviation == pytest.approx(1, abs=1e-12)
    assert r.holds


@pytest.mark.parametrize("name", ["exp", "sqrt", "sigmoid", "power"])
def test_marx_strohhacker_convex_targets(name):
    r = apps.marx_strohhacker_check(domains.make_domain(name))
    assert r.convex_deviation <= 1 + 1e-9
    assert r.min_abs_derivative >= 0.25 - 1e-9
    assert r.ratio_deviation <= 5 + 1e-9


def test_marx_strohhacker_janowski():
    assert apps.marx_strohhacker_check(domains.make_domain("janowski", A=0.5, B=-0.5)).holds


def test_marx_strohhacker_refuses_nonconvex():
    with pytest.raises(NotConvexError):
        apps.marx_strohhacker_check(domains.make_domain("cardioid"))


def test_cardioid_critical_point_is_excluded():
    d = domains.make_domain("cardioid")
    assert abs(fncat.evaluate(d.map, -1.0 + 0j)[1]) < 1e-12
    r = apps.marx_strohhacker_check(d, 4096, allow_nonconvex=True)
    assert any(abs(t - math.pi) < 1e-12 for t in r.excluded)
    assert r.min_abs_derivative > 0


def test_close_to_convex_trivial():
    r = apps.close_to_convex_check(z, z)
    assert r["premise_holds"] and r["conclusion_min"] == pytest.approx(1)
    assert r["verdict"] == "close-to-convex"


def test_close_to_convex_small_perturbation():
    r = apps.close_to_convex_check(fncat.polynomial([0, 1, 0.1]), z)
    assert r["conclusion_min"] == pytest.approx(1 - 0.2 * 0.999, abs=1e-6)
    assert r["conclusion_holds"]


def test_close_to_convex_premise_fails_when_derivative_vanishes():
    r = apps.close_to_convex_check(fncat.polynomial([0, 1, -1]), z)
    assert not r["premise_holds"] and not r["implication_violated"]


def test_close_to_convex_reports_denominator_zero():
    # g = z: denominator = z (2f' + z f''); f = z - 0.6 z² gives 2 - 3.6 z, zero at 5/9
    g = fncat.DiskGrid((5 / 9,), 8)
    r = apps.close_to_convex_check(fncat.polynomial([0, 1, -0.6]), z, g)
    assert r["verdict"] == "undefined"
    assert r["denominator_zeros"][0] == pytest.approx([5 / 9, 0.0])


@pytest.mark.parametrize("which", ["starlike36", "univalent38", "fz39"])
def test_identity_map_passes_every_corollary(which):
    r = apps.corollary_check(which, z, thresholds.ThresholdParams(0.25, 0.5))
    assert r["premise_min"] == pytest.approx(1)
    assert r["verdict"] == "conclusion-holds"


def test_starlike_koebe_like_example():
    f = fncat.moebius(0, -1) * z  # z/(1 - z)
    p = thresholds.ThresholdParams(0.4, 0.8, gamma=1, delta=1)
    r = apps.corollary_check("starlike36", f, p)
    assert r["premise_min"] == pytest.approx(1 / 1.999, abs=1e-6)
    assert r["beta"] == pytest.approx(0.4)
    assert r["verdict"] == "conclusion-holds"


def test_univalent_example():
    f = fncat.polynomial([0, 1, 0.5])
    p = thresholds.ThresholdParams(0.0, 0.0, gamma=1, delta=1)
    r = apps.corollary_check("univalent38", f, p)
    assert r["premise_min"] == pytest.approx(0.001, abs=1e-9)
    assert r["conclusion_min_re_p"] > 0


def test_normalisation_checked():
    with pytest.raises(ParameterError):
        apps.corollary_check("fz39", fncat.polynomial([0, 2]), thresholds.ThresholdParams(0, 0))


def test_starlike_undefined_when_f_vanishes():
    f = fncat.polynomial([0, 1, 2])  # zero at z = -1/2
    g = fncat.DiskGrid((0.5,), 4)
    r = apps.corollary_check("starlike36", f, thresholds.ThresholdParams(0, 0, gamma=1), g)
    assert r["verdict"] == "undefined"


valid_params = st.tuples(st.floats(0, 0.95), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
                         st.floats(1, 2)).filter(lambda t: t[0] > 0.5 or t[1] >= t[0] * (1 + 2 * t[0]))


@settings(max_examples=60, deadline=None)
@given(valid_params)
def test_identity_regression_over_params(t):
    try:
        p = thresholds.ThresholdParams(*t[:2], gamma=t[2], mu=t[3], delta=t[4])
        r = apps.corollary_check("starlike36", z, p, fncat.DiskGrid((0.5, 0.99), 32))
    except thresholds.DegenerateParameters:
        return
    assert not r["implication_violated"]
    if r["beta"] < 1:
        assert r["verdict"] == "conclusion-holds"


@settings(max_examples=40, deadline=None)
@given(st.complex_numbers(max_magnitude=0.6), st.complex_numbers(max_magnitude=0.3),
       st.sampled_from([(0.25, 0.5), (0.1, 0.2), (0.4, 0.8), (0.0, 0.5)]))
def test_starlike_grid_implication(a2, a3, ar):
    f = fncat.polynomial([0, 1, a2, a3])
    p = thresholds.ThresholdParams(*ar, gamma=0.3, delta=1.2, mu=0.5)
    try:
        r = apps.corollary_check("starlike36", f, p, fncat.DiskGrid((0.3, 0.6, 0.9, 0.99), 128))
    except Exception as exc:  # f may vanish exactly on a grid point
        pytest.skip(str(exc))
    assert not r.get("implication_violated", False)
