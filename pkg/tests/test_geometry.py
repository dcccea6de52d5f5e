import mpmath
import numpy as np
import pytest

from ltbcollapse import geometry as geo
from ltbcollapse.errors import DomainError, ModelError, ShellCrossingError, ShellFocusingError, SingularDerivativeError
from ltbcollapse.geodesics import dphi_dt, phi


@pytest.mark.parametrize(
    "kwargs, rule",
    [
        (dict(n=0, a=1.0), "n>=1"),
        (dict(n=1.5, a=1.0), "n>=1"),
        (dict(n=True, a=1.0), "n>=1"),
        (dict(n=1, a=0.0), "a>0"),
        (dict(n=1, a=float("nan")), "a>0"),
        (dict(n=1, a=1.0, r_max=-1.0), "r_max>0"),
        (dict(n=2, a=1.0, gamma_terms=((3,),)), "gamma-pair"),
        (dict(n=2, a=1.0, gamma_terms=((3.5, 1.0),)), "gamma-power-int"),
        (dict(n=2, a=1.0, gamma_terms=((2, 1.0),)), "gamma-power>=n+1"),
        (dict(n=2, a=1.0, gamma_terms=((3, float("inf")),)), "gamma-coeff-finite"),
        (dict(n=1, a=20.0), "k>0"),
    ],
)
def test_model_validation_names_rule(kwargs, rule):
    with pytest.raises(ModelError) as exc:
        geo.ModelParams(**kwargs)
    assert exc.value.rule == rule
    assert f"[{rule}]" in str(exc.value)


def test_k_at_centre_and_gamma():
    p = geo.ModelParams(2, 1.5, ((3, 0.7), (5, -2.0)))
    assert geo.k(p, 0.0) == 1.0
    r = 0.03
    assert geo.k(p, r) == pytest.approx(1 - 1.5 * r**2 + 0.7 * r**3 - 2.0 * r**5, rel=1e-15)
    assert geo.k_prime(p, r) == pytest.approx(-3.0 * r + 2.1 * r**2 - 10.0 * r**4, rel=1e-14)


def test_one_minus_k_keeps_precision_near_centre():
    p = geo.ModelParams(4, 1.0)
    r = 1e-5
    # 1 - k is 1e-20, far below double rounding of k itself
    assert geo.one_minus_k(p, r) == pytest.approx(1e-20, rel=1e-14)


def test_horizon_precedes_singularity():
    p = geo.ModelParams(3, 2.0)
    r = np.geomspace(1e-4, 0.1, 50)
    gap = geo.singularity_time(p, r) - geo.horizon_time(p, r)
    assert np.allclose(gap, (8 / 27) * geo.k(p, r) ** 2 * r**3, rtol=1e-12)
    assert np.all(gap > 0)


def test_area_radius_vanishes_on_singularity_curve():
    p = geo.ModelParams(1, 1.0)
    r = 0.05
    assert geo.area_radius(p, r, geo.singularity_time(p, r)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        geo.area_radius(p, r, geo.singularity_time(p, r) * 1.01)


def test_rderiv_matches_mpmath_differentiation():
    p = geo.ModelParams(2, 3.0, ((3, 1.0),))
    with mpmath.workdps(40):
        for r, t in [(0.01, 0.5), (0.05, 0.99), (0.08, 1.0)]:
            num = mpmath.diff(lambda rr: geo.area_radius(p, rr, mpmath.mpf(t)), mpmath.mpf(r))
            assert float(geo.area_radius_rderiv(p, r, t)) == pytest.approx(float(num), rel=1e-12)
            assert float(phi(p, r, t)) == pytest.approx(float(num), rel=1e-12)


def test_dphidt_matches_mpmath_differentiation():
    p = geo.ModelParams(3, 4.0)
    with mpmath.workdps(40):
        r, t = mpmath.mpf("0.03"), mpmath.mpf("0.9")
        num = mpmath.diff(lambda tt: phi(p, r, tt), t)
        assert float(dphi_dt(p, r, t)) == pytest.approx(float(num), rel=1e-20)


def test_energy_density_matches_mass_derivative():
    p = geo.ModelParams(1, 1.0)
    r, t = 0.02, 0.3
    R = geo.area_radius(p, r, t)
    Rp = geo.area_radius_rderiv(p, r, t)
    assert geo.energy_density(p, r, t) == pytest.approx(geo.mass_function_rderiv(p, r) / (4 * np.pi * R**2 * Rp))
    assert geo.mass_function(p, r) == pytest.approx((2 / 9) * geo.k(p, r) ** 2 * r**3)


def test_energy_density_signals():
    p = geo.ModelParams(1, 1.0)
    with pytest.raises(DomainError):
        geo.energy_density(p, 0.0, 0.5)
    r = 0.05
    with pytest.raises((ShellFocusingError, SingularDerivativeError)):
        geo.energy_density(p, r, geo.singularity_time(p, r))


def test_shell_crossing_detected():
    # R' = phi = 0 where 1 - k t = (2/3) r k' t, i.e. before t_s for k' > 0 models
    p = geo.ModelParams(1, 1.0, ((2, 30.0),))
    r = 0.05
    kr, kp = geo.k(p, r), geo.k_prime(p, r)
    assert kp > 0
    t_cross = 1 / (kr + 2 * r * kp / 3)
    with pytest.raises(ShellCrossingError):
        geo.energy_density(p, r, t_cross)


def test_r_outside_domain_rejected():
    p = geo.ModelParams(1, 1.0, r_max=0.1)
    with pytest.raises(DomainError):
        geo.k(p, 0.2)
    with pytest.raises(DomainError):
        geo.k(p, -1e-3)


def test_spacetime_point_presingular():
    p = geo.ModelParams(1, 1.0)
    assert geo.SpacetimePoint(0.05, 1.0).is_presingular(p)
    assert not geo.SpacetimePoint(0.05, 2.0).is_presingular(p)


def test_to_dict_round_trip():
    p = geo.ModelParams(2, 1.5, ((3, 0.7),), 0.05)
    d = p.to_dict()
    assert d == {"n": 2, "a": 1.5, "gamma": [[3, 0.7]], "r_max": 0.05}
    assert geo.ModelParams(d["n"], d["a"], tuple(map(tuple, d["gamma"])), d["r_max"]) == p
