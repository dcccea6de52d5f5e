import json

import pytest

from ltbcollapse import ModelParams
from ltbcollapse.classify import (
    ClassificationReport,
    NumericSettings,
    Rule,
    Verdict,
    classify,
    classify_analytic,
    classify_numeric,
    probe_anchors,
)
from ltbcollapse import geometry as geo
from ltbcollapse.roots import critical_constants

A_C = critical_constants().a_c


@pytest.mark.parametrize(
    "n, a, verdict, rule",
    [
        (1, 0.01, Verdict.NAKED, Rule.T4_1),
        (2, 100.0, Verdict.NAKED, Rule.T4_1),
        (4, 1.0, Verdict.BLACK_HOLE, Rule.T3_1),
        (9, 0.1, Verdict.BLACK_HOLE, Rule.T3_1),
        (3, 0.1, Verdict.BLACK_HOLE, Rule.P5_1),
        (3, 8 / 27, Verdict.BLACK_HOLE, Rule.P5_1),
        (3, 0.3, Verdict.BLACK_HOLE, Rule.P5_3),
        (3, 3.85, Verdict.BLACK_HOLE, Rule.P5_3),
        (3, A_C, Verdict.NAKED, Rule.P5_2),
        (3, 4.0, Verdict.NAKED, Rule.P5_2),
    ],
)
def test_analytic_table(n, a, verdict, rule):
    end, got_rule = classify_analytic(n, a)
    assert end.verdict is verdict and got_rule is rule


def test_marginal_band():
    assert classify_analytic(3, A_C + 5e-7)[0].marginal
    assert not classify_analytic(3, A_C + 5e-6)[0].marginal
    assert not classify_analytic(2, A_C)[0].marginal


def test_analytic_rejects_invalid():
    with pytest.raises(ValueError):
        classify_analytic(0, 1.0)
    with pytest.raises(ValueError):
        classify_analytic(3, -1.0)


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 8.0), (3, 4.0), (3, 1.0), (3, 0.1), (4, 1.0), (5, 2.0), (3, 3.84)])
def test_numeric_agrees_with_table(n, a):
    rep = classify(ModelParams(n, a))
    assert rep.agree, rep.reason
    assert rep.reason == ""


def test_black_hole_evidence_is_probe_based():
    end, ev = classify_numeric(ModelParams(4, 1.0))
    assert end.verdict is Verdict.BLACK_HOLE
    assert ev["start"] is None and "start_error" in ev
    assert len(ev["probes"]) == 5 and all(p["resolved"] for p in ev["probes"])
    assert all(t < 1 for t in ev["probe_limits"])


def test_anchor_layout():
    p = ModelParams(4, 1.0)
    s = NumericSettings()
    for r1, t1 in probe_anchors(p, s):
        th, ts = geo.horizon_time(p, r1), geo.singularity_time(p, r1)
        assert t1 < th < ts
        assert (th - t1) == pytest.approx(s.anchor_depth * (ts - th), rel=1e-6)
    small = p.with_r_max(0.01)
    assert max(r for r, _ in probe_anchors(small, s)) == pytest.approx(0.005)


def test_inconclusive_when_ray_does_not_escape():
    rep = classify(ModelParams(2, 0.05, r_max=0.1))
    assert rep.numeric.verdict is Verdict.INCONCLUSIVE
    assert not rep.agree and "horizon" in rep.reason
    assert rep.evidence["termination"] == "CrossedHorizon"


def test_report_round_trip():
    rep = classify(ModelParams(3, 4.0, ((4, 0.5),)))
    text = json.dumps(rep.to_dict(), sort_keys=True)
    back = ClassificationReport.from_dict(json.loads(text))
    assert back == rep


def test_settings_round_trip():
    s = NumericSettings(rtol=1e-9, probe_radii=(0.02, 0.04))
    assert NumericSettings.from_dict(json.loads(json.dumps(s.to_dict()))) == s
