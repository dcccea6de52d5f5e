import numpy as np
import pytest

from ltbcollapse import geometry as geo
from ltbcollapse.errors import DegenerateWindowError, DomainError, EnvelopeError
from ltbcollapse.geodesics import integrate_from_singularity, singular_start
from ltbcollapse.verification import (
    EnvelopeBounds,
    check_dphidt_on_horizon,
    check_envelope_containment,
    estimate_envelope,
    fit_exponent,
    horizon_dphidt_leading,
    run_identity_suite,
    shoot_inside_envelope,
)


def test_identity_suite_passes():
    results = run_identity_suite()
    assert results and all(r.passed for r in results.values())
    for r in results.values():
        d = r.to_dict()
        assert {"max_rel_err", "tolerance", "pass"} <= set(d)


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 0.5), (3, 4.0), (3, 0.2), (4, 1.0)])
def test_dphidt_leading_order(n, a):
    res = check_dphidt_on_horizon(geo.ModelParams(n, a))
    assert res.passed
    # deviation shrinks as r -> 0
    assert res.detail["rel_dev"][0] > res.detail["rel_dev"][-1]


def test_dphidt_leading_sign_flips_at_horizon_threshold():
    r = 1e-4
    assert horizon_dphidt_leading(geo.ModelParams(3, 0.29), r) < 0
    assert horizon_dphidt_leading(geo.ModelParams(3, 0.30), r) > 0


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 8.0), (1, 0.05)])
def test_envelope_contains_shot_solution(n, a):
    p = geo.ModelParams(n, a)
    b = estimate_envelope(p, r_star=1e-2)
    assert b.A1 < 0 and b.c0 <= b.c1
    assert b.A00 == pytest.approx(-(3 + 2 * n) / 3, rel=1e-2)
    path = shoot_inside_envelope(p, b, r_star=1e-2)
    assert check_envelope_containment(p, path, b, r_star=1e-2).passed
    assert check_envelope_containment(p, path, b.widened(2.0), r_star=1e-2).passed


def test_envelope_b_sign_is_negative():
    # B(0, 0) < 0, so x(r) approaches a**(2/3) from below
    p = geo.ModelParams(1, 1.0)
    b = estimate_envelope(p, r_star=1e-2)
    assert b.B00 < 0 and b.B1 < 0
    path = integrate_from_singularity(p, singular_start(p), 1e-2)
    assert np.all(path.x[1:] < 1.0)


def test_envelope_stable_under_band_halving():
    p = geo.ModelParams(2, 8.0)
    full = estimate_envelope(p, r_star=1e-2)
    half = estimate_envelope(p, r_star=1e-2, epsilon_band=0.025 * full.x_ref)
    assert half.c0 == pytest.approx(full.c0, rel=1e-2)
    assert half.c1 == pytest.approx(full.c1, rel=1e-2)


def test_envelope_rejects_bad_windows():
    with pytest.raises(DomainError):
        estimate_envelope(geo.ModelParams(3, 4.0))
    # the horizon overtakes the ray inside this window, B changes sign
    with pytest.raises(EnvelopeError):
        estimate_envelope(geo.ModelParams(2, 0.05), r_star=1e-2)


def test_containment_flags_violation():
    p = geo.ModelParams(1, 1.0)
    b = estimate_envelope(p, r_star=1e-2)
    tight = EnvelopeBounds(b.beta, b.A0, b.A1, b.B0 * 0.5, b.B1 * 0.5, b.x_ref)
    path = integrate_from_singularity(p, singular_start(p), 1e-2)
    assert not check_envelope_containment(p, path, tight).passed


def test_fit_exponent_window_checks():
    p = geo.ModelParams(1, 1.0)
    path = integrate_from_singularity(p, singular_start(p))
    assert fit_exponent(path, 1e-6, 1e-4) == pytest.approx(5 / 3, rel=1e-3)
    with pytest.raises(DegenerateWindowError):
        fit_exponent(path, 1e-3, 1.1e-3)
