import numpy as np
import pytest

from subordkit import domains, fncat, means, subord
from subordkit.errors import ConfigError


@pytest.mark.parametrize("name", ["halfplane", "exp", "sqrt", "sigmoid", "cardioid"])
def test_map_is_subordinate_to_itself_and_to_schwarz_composition(name):
    d = domains.make_domain(name)
    assert subord.is_subordinate(d.map, d)
    assert subord.is_subordinate(fncat.scale(d.map, 0.5), d)


def test_halfplane_map_not_subordinate_to_sqrt():
    d = domains.make_domain("sqrt")
    res = subord.is_subordinate(fncat.moebius(1, -1), d)
    assert not res
    assert res.witness is not None
    w = res.witness
    # the witness value really is outside: Re exceeds sup Re of the lemniscate domain
    assert w.value.real > d.re_sup
    # and at r = 0.99 near angle 0 the image is far outside, as direct evaluation shows
    p99 = complex(fncat.evaluate(fncat.moebius(1, -1), 0.99 * np.exp(0.01j))[0])
    assert domains.contains(d, p99) == domains.Verdict.OUTSIDE


def test_origin_mismatch():
    d = domains.make_domain("exp")
    res = subord.is_subordinate(fncat.constant(2.0), d)
    assert not res and res.origin_gap == pytest.approx(1)


def test_small_angular_count_rejected():
    with pytest.raises(ValueError):
        subord.is_subordinate(fncat.exp(), domains.make_domain("exp"), n=128)


def test_hypo_check_constant_theta():
    d = domains.make_domain("halfplane")
    g = fncat.DiskGrid((0.5, 0.9), 64)
    rep = subord.hypo_check(means.ThetaPhiPair.unit(), d, g, 256)
    assert rep.minimum == pytest.approx(1)
    rep = subord.hypo_check(means.ThetaPhiPair(fncat.constant(1.0), fncat.constant(0.3 + 2j)),
                            domains.make_domain("sigmoid"), g, 256)
    assert rep.minimum == pytest.approx(0.3)


def test_hypo_check_exp_configuration():
    pair = means.ThetaPhiPair(fncat.affine(1.0, 0.5), fncat.constant(5.0))
    g = fncat.DiskGrid((0.5, 0.9, 0.99, 0.999), 1024)
    rep = subord.hypo_check(pair, domains.make_domain("exp"), g, 1024)
    assert rep.holds and rep.minimum > 0


def test_t_zero_has_no_counterexamples():
    d = domains.make_domain("sqrt")
    rep = subord.falsify_lemma(means.ThetaPhiPair.unit(), 0.0, d, budget=100)
    assert rep.complete and not rep.violations


def test_falsification_is_deterministic():
    d = domains.make_domain("halfplane")
    a = subord.falsify_lemma(means.ThetaPhiPair.unit(), 0.5, d, budget=40)
    b = subord.falsify_lemma(means.ThetaPhiPair.unit(), 0.5, d, budget=40)
    assert a.to_json() == b.to_json()
    assert a.complete and not a.violations
    assert 0 < a.premise_rate <= 1


def test_threaded_matches_serial():
    d = domains.make_domain("janowski", A=0.5, B=-0.5)
    a = subord.falsify_lemma(means.ThetaPhiPair.unit(), 1.0, d, budget=30, threads=1)
    b = subord.falsify_lemma(means.ThetaPhiPair.unit(), 1.0, d, budget=30, threads=3)
    assert a.to_json() == b.to_json()


def test_sampler_respects_origin():
    d = domains.make_domain("exp")
    cfg = subord.SamplerConfig()
    for i in range(20):
        p, meta = subord.draw_sample(d, cfg, i)
        assert abs(fncat.evaluate(p, 0)[0] - d.h0) < 1e-12
        assert meta["family"] in ("blaschke", "perturb")


def test_thread_env_validation(monkeypatch):
    monkeypatch.setenv("SUBORDKIT_THREADS", "x")
    with pytest.raises(ConfigError):
        subord.thread_count()
    monkeypatch.setenv("SUBORDKIT_THREADS", "2")
    assert subord.thread_count() == 2
