import json

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from ltbcollapse import geometry as geo
from ltbcollapse.errors import DomainError, NoNakedStartError
from ltbcollapse.geodesics import (
    SingularStart,
    TerminationKind,
    backward_probe,
    integrate_from_point,
    integrate_from_singularity,
    natural_alpha,
    probe_to_centre,
    scaled_rhs,
    singular_start,
    transformed_rhs,
)
from ltbcollapse.roots import critical_constants


def tau_oracle(params, r0, tau0, r_eval):
    """``tau = t - 1`` along the ray, by scipy in the original (r, tau) variables."""

    def rhs(r, y):
        kr, kp = geo.k(params, r), geo.k_prime(params, r)
        w = geo.one_minus_k(params, r) - kr * y[0]
        return [(w - 2 * r * kp * (1 + y[0]) / 3) / np.cbrt(w)]

    sol = solve_ivp(rhs, (r0, r_eval[-1]), [tau0], method="DOP853", rtol=1e-12, atol=1e-300, t_eval=r_eval)
    assert sol.success
    return sol.y[0]


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 8.0), (1, 5.0), (3, 4.0), (3, 10.0)])
def test_singular_ray_matches_scipy_oracle(n, a):
    p = geo.ModelParams(n, a)
    start = singular_start(p)
    path = integrate_from_singularity(p, start)
    assert path.termination.kind is TerminationKind.REACHED_R_MAX
    sel = np.geomspace(1e-5, 0.1, 12)
    ref = tau_oracle(p, start.epsilon, start.x0 * start.epsilon**start.alpha, sel)
    got = np.interp(np.log(sel), np.log(path.r), np.log(path.tau))
    # log-linear interpolation between samples limits the comparison, not the solver
    assert np.allclose(np.exp(got), ref, rtol=2e-4)
    final_ref = tau_oracle(p, start.epsilon, start.x0 * start.epsilon**start.alpha, [0.1])[-1]
    assert path.tau[-1] == pytest.approx(final_ref, rel=1e-7)


def test_regular_ray_matches_scipy_oracle():
    p = geo.ModelParams(4, 1.0)
    r1, t1 = 0.05, 0.9999
    path = integrate_from_point(p, r1, t1, 0.001)
    ref = tau_oracle(p, r1, t1 - 1, [r1, 0.001])[-1]
    assert path.tau[0] == pytest.approx(ref, rel=1e-8)


def test_singular_start_values():
    assert singular_start(geo.ModelParams(1, 1.0)) == SingularStart(5 / 3, 1.0)
    s2 = singular_start(geo.ModelParams(2, 8.0))
    assert s2.alpha == 7 / 3 and s2.x0 == 4.0
    s3 = singular_start(geo.ModelParams(3, 4.0))
    assert s3.alpha == 3.0 and s3.x0 == pytest.approx(3.0, rel=1e-12)
    s3b = singular_start(geo.ModelParams(3, 4.0), root_index=1)
    assert s3b.x0 == pytest.approx(3.4023935215, rel=1e-9)
    assert singular_start(geo.ModelParams(3, critical_constants().a_c)).marginal
    for n, a in [(4, 1.0), (3, 1.0), (3, 0.001)]:
        with pytest.raises(NoNakedStartError):
            singular_start(geo.ModelParams(n, a))


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 8.0), (3, 4.0)])
def test_scaled_rhs_vanishes_at_singular_start(n, a):
    p = geo.ModelParams(n, a)
    x0 = singular_start(p).x0
    vals = [abs(scaled_rhs(p, r, x0)) for r in (1e-4, 1e-6, 1e-8)]
    assert vals[0] >= vals[1] >= vals[2]
    assert vals[2] < 1e-3


def test_transformed_rhs_is_scaled_over_r():
    p = geo.ModelParams(1, 1.0)
    assert transformed_rhs(p, 1e-3, 1.0) == pytest.approx(scaled_rhs(p, 1e-3, 1.0) / 1e-3)
    with pytest.raises(DomainError):
        transformed_rhs(p, 0.0, 1.0)
    with pytest.raises(DomainError):
        scaled_rhs(p, 1e-3, 1e6)


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 8.0)])
def test_epsilon_insensitivity(n, a):
    p = geo.ModelParams(n, a)
    finals = [integrate_from_singularity(p, singular_start(p, eps)).tau[-1] for eps in (1e-8, 1e-7, 1e-6, 1e-5, 1e-4)]
    assert np.ptp(finals) / abs(finals[0]) < 1e-4


def test_tolerance_halving_converges():
    p = geo.ModelParams(2, 8.0)
    s = singular_start(p)
    coarse = integrate_from_singularity(p, s, rtol=1e-8, atol=1e-10).tau[-1]
    fine = integrate_from_singularity(p, s, rtol=5e-9, atol=5e-11).tau[-1]
    assert abs(coarse - fine) / abs(fine) < 1e-7


def test_horizon_crossing_detected_outside_window():
    # for small a the horizon overtakes the ray well inside r = 0.1
    p = geo.ModelParams(2, 0.05)
    path = integrate_from_singularity(p, singular_start(p))
    assert path.termination.kind is TerminationKind.CROSSED_HORIZON
    r_c = path.termination.r
    assert 0.01 < r_c < 0.05
    assert path.t[-1] == pytest.approx(geo.horizon_time(p, path.r[-1]), abs=1e-12)


def test_nearby_singular_rays_converge():
    # for n = 1, 2 the singular ray attracts its neighbours: a whole family escapes
    p = geo.ModelParams(1, 1.0)
    s = singular_start(p)
    ref = integrate_from_singularity(p, s)
    for x_start in (0.9, 1.1):
        path = integrate_from_singularity(p, s, x_start=x_start)
        assert path.termination.kind is TerminationKind.REACHED_R_MAX
        assert abs(path.x[-1] - ref.x[-1]) < 1e-3 * abs(x_start - s.x0)


def test_ray_launched_on_singularity_curve_rejected():
    p = geo.ModelParams(1, 1.0)
    s = singular_start(p)
    with pytest.raises(DomainError):
        integrate_from_singularity(p, s, x_start=1e8)


def test_probes_resolve_for_covered_models():
    for n, a in [(4, 1.0), (3, 1.0), (3, 3.84)]:
        p = geo.ModelParams(n, a)
        r1 = 0.03
        t1 = geo.horizon_time(p, r1) - 1e-8
        res = probe_to_centre(p, r1, t1)
        assert res.resolved and res.tau_end < 0
        assert backward_probe(p, r1, t1, r_floor=1e-3) < t1


def test_probe_argument_checks():
    p = geo.ModelParams(4, 1.0)
    with pytest.raises(DomainError):
        backward_probe(p, 0.01, 0.9, r_floor=0.02)
    res = probe_to_centre(p, 0.05, 5.0)
    assert not res.resolved and res.status.startswith("DomainError")


def test_path_serialisation():
    p = geo.ModelParams(1, 1.0)
    path = integrate_from_singularity(p, singular_start(p))
    lines = path.to_csv().splitlines()
    assert lines[0] == "r,t,t_h,t_s,one_minus_kt"
    assert len(lines) == path.r.size + 1
    d = json.loads(path.to_json())
    assert d["termination"]["kind"] == "ReachedRMax"
    assert d["start"]["type"] == "singular"
    assert np.all(np.diff(path.r) > 0)
    assert np.all(path.one_minus_kt() > 0)


def test_natural_alpha():
    assert [natural_alpha(n) for n in (1, 2, 3, 4, 7)] == [5 / 3, 7 / 3, 3.0, 3.0, 3.0]
