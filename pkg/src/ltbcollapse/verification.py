"""Numerical checks of the closed-form identities and comparison bounds.

Exact identities are evaluated in multiprecision arithmetic (mpmath) so the
comparison is not limited by cancellation in double precision; asymptotic
(leading-order) statements are checked through their convergence as
``r -> 0``. Envelope bounds for the n = 1, 2 rays are reconstructed from
the unexpanded rescaled equation ``r y' = A(r, y) y + B(r, y) r**beta``.
"""

from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import geometry as geo
from .errors import DegenerateWindowError, DomainError, EnvelopeError
from .geodesics import (
    dphi_dt,
    integrate_from_singularity,
    phi,
    scaled_rhs,
    singular_start,
)

__all__ = [
    "IdentityCheckResult",
    "EnvelopeBounds",
    "check_subsolution_margin",
    "check_phi_on_horizon",
    "check_phi_equals_rderiv",
    "check_dphidt_on_horizon",
    "horizon_dphidt_leading",
    "estimate_envelope",
    "shoot_inside_envelope",
    "check_envelope_containment",
    "fit_exponent",
    "run_identity_suite",
    "DEFAULT_CASES",
]

EXACT_TOL = 1e-10
DPS = 50
DEFAULT_CASES = ((1, 1.0), (2, 0.5), (3, 4.0), (4, 1.0))


@dataclass
class IdentityCheckResult:
    name: str
    grid: list
    max_rel_err: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"max_rel_err": self.max_rel_err, "tolerance": self.tolerance, "pass": self.passed, **self.detail}


def _default_grid(params, lo=1e-4, num=40):
    return list(np.geomspace(lo, params.r_max, num))


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else float(abs(a - b) / scale)


def horizon_rderiv(params, r):
    """``dt_h/dr = -k'/k**2 - (8/27)(2 k k' r**3 + 3 k**2 r**2)``."""
    kr, kp = geo.k(params, r), geo.k_prime(params, r)
    return -kp / kr**2 - 8 * (2 * kr * kp * r**3 + 3 * kr**2 * r**2) / 27


def check_subsolution_margin(params, r_grid=None, dps=DPS, tol=EXACT_TOL):
    """``dt_h/dr - phi(r, t_h)`` directly versus ``-(4/3) k r**2 ((2/3) k' r + k)``.

    Passes when the two routes agree to ``tol`` and the margin is negative
    on the whole grid (the horizon is a subsolution there).
    """
    r_grid = _default_grid(params) if r_grid is None else list(r_grid)
    errs, values = [], []
    with mpmath.workdps(dps):
        for r in r_grid:
            rm = mpmath.mpf(r)
            direct = horizon_rderiv(params, rm) - phi(params, rm, geo.horizon_time(params, rm))
            kr, kp = geo.k(params, rm), geo.k_prime(params, rm)
            closed = -4 * kr * rm**2 * (2 * kp * rm / 3 + kr) / 3
            errs.append(_rel(direct, closed))
            values.append(float(closed))
    negative = all(v < 0 for v in values)
    err = max(errs)
    return IdentityCheckResult(
        "subsolution_margin", r_grid, err, tol, err < tol and negative,
        {"all_negative": negative, "max_value": max(values)},
    )


def check_phi_on_horizon(params, r_grid=None, dps=DPS, tol=EXACT_TOL):
    """``phi(r, t_h)`` versus ``-k'/k**2 + (4/9) k**2 r**2 + (8/27) k k' r**3``."""
    r_grid = _default_grid(params) if r_grid is None else list(r_grid)
    errs = []
    with mpmath.workdps(dps):
        for r in r_grid:
            rm = mpmath.mpf(r)
            direct = phi(params, rm, geo.horizon_time(params, rm))
            kr, kp = geo.k(params, rm), geo.k_prime(params, rm)
            closed = -kp / kr**2 + 4 * kr**2 * rm**2 / 9 + 8 * kr * kp * rm**3 / 27
            errs.append(_rel(direct, closed))
    err = max(errs)
    return IdentityCheckResult("phi_on_horizon", r_grid, err, tol, err < tol)


def check_phi_equals_rderiv(params, r_grid=None, n_t=25, tol=EXACT_TOL):
    """``phi == R'`` in double precision on a pre-singular (r, t) lattice."""
    r_grid = _default_grid(params) if r_grid is None else list(r_grid)
    rs, ts = [], []
    for r in r_grid:
        # times from 0 up to 99.9% of the way to the singularity curve
        ts_r = np.linspace(0.0, 0.999 * geo.singularity_time(params, r), n_t)
        rs.extend([r] * n_t)
        ts.extend(ts_r)
    rs, ts = np.asarray(rs), np.asarray(ts)
    a = phi(params, rs, ts)
    b = geo.area_radius_rderiv(params, rs, ts)
    err = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))))
    return IdentityCheckResult("phi_equals_rderiv", r_grid, err, tol, err < tol, {"points": int(rs.size)})


def horizon_dphidt_leading(params, r):
    """Leading-order ``dphi/dt`` on the horizon: ``-(3/2)**3 ((8/27)/r - (n a/3) r**(n-4))``."""
    n, a = params.n, params.a
    return -(27 / 8) * (8 / (27 * r) - n * a * r ** (n - 4) / 3)


def check_dphidt_on_horizon(params, r_grid=(1e-3, 1e-4, 1e-5), dps=DPS, slope=50.0):
    """Exact ``dphi/dt(r, t_h(r))`` against its leading-order form.

    The leading form drops higher-order terms, so agreement is required
    to tighten as ``r -> 0``: the relative deviation at radius r must stay
    below ``slope * r`` (5% at 1e-3, 0.5% at 1e-4 for the default).
    """
    r_grid = list(r_grid)
    devs, exact_vals, ok = [], [], True
    with mpmath.workdps(dps):
        for r in r_grid:
            rm = mpmath.mpf(r)
            exact = dphi_dt(params, rm, geo.horizon_time(params, rm))
            lead = horizon_dphidt_leading(params, rm)
            dev = _rel(exact, lead)
            devs.append(dev)
            exact_vals.append(float(exact))
            ok = ok and dev < slope * r and (exact > 0) == (lead > 0)
    return IdentityCheckResult(
        "dphidt_on_horizon", r_grid, max(devs), slope, ok,
        {"rel_dev": devs, "values": exact_vals, "signs": [int(np.sign(v)) for v in exact_vals]},
    )


# ---------------------------------------------------------------------------
# comparison envelopes for n = 1, 2


@dataclass(frozen=True)
class EnvelopeBounds:
    """Bounds ``A0 <= A <= A1 < 0`` and ``B0 <= B <= B1`` (one strict sign).

    ``z0`` and ``z1`` are the lower and upper power-law barriers
    ``c r**beta`` solving ``r z' = A_i z + B_j r**beta`` with the pairing
    that makes each one a sub- (super-) solution for the sign of B.
    """

    beta: float
    A0: float
    A1: float
    B0: float
    B1: float
    x_ref: float = 0.0
    A00: float = float("nan")
    B00: float = float("nan")

    @property
    def c0(self):
        a_for_lower = self.A0 if self.B0 > 0 else self.A1
        return self.B0 / (self.beta - a_for_lower)

    @property
    def c1(self):
        a_for_upper = self.A1 if self.B1 > 0 else self.A0
        return self.B1 / (self.beta - a_for_upper)

    def z0(self, r):
        return self.c0 * np.asarray(r, dtype=float) ** self.beta

    def z1(self, r):
        return self.c1 * np.asarray(r, dtype=float) ** self.beta

    def widened(self, factor=2.0):
        """Looser bounds: A0 and the larger-magnitude end of B scaled by ``factor``."""
        if self.B0 > 0:
            return EnvelopeBounds(self.beta, self.A0 * factor, self.A1, self.B0, self.B1 * factor, self.x_ref, self.A00, self.B00)
        return EnvelopeBounds(self.beta, self.A0 * factor, self.A1, self.B0 * factor, self.B1, self.x_ref, self.A00, self.B00)


def _envelope_coefficients(params, x_ref, r, y, beta, fd_step):
    f_ref = float(scaled_rhs(params, r, x_ref))
    B = f_ref / r**beta
    if y == 0:
        A = (float(scaled_rhs(params, r, x_ref + fd_step)) - float(scaled_rhs(params, r, x_ref - fd_step))) / (2 * fd_step)
    else:
        A = (float(scaled_rhs(params, r, x_ref + y)) - f_ref) / y
    return A, B


def estimate_envelope(params, r_star=1e-2, epsilon_band=None, n_r=120, n_y=21, r_min=1e-12):
    """Reconstruct bounds on A(r, y), B(r, y) over ``[0, r_star] x [-band, band]``.

    With ``y = x - a**(2/3)``: ``B(r) = r x'|_{y=0} / r**beta`` and ``A`` is
    the secant slope of ``r x'`` in y (central difference at y = 0). The
    r-grid is logarithmic from ``r_min`` so the ``r -> 0`` limit is
    represented.
    """
    if params.n not in (1, 2):
        raise DomainError("comparison envelopes apply to n = 1, 2")
    start = singular_start(params)
    x_ref = start.x0
    beta = 1 - params.n / 3
    band = 0.05 * x_ref if epsilon_band is None else epsilon_band
    fd_step = 1e-6 * x_ref
    rs = np.geomspace(r_min, r_star, n_r)
    ys = np.linspace(-band, band, n_y)
    A = np.empty((n_r, n_y))
    B = np.empty(n_r)
    for i, r in enumerate(rs):
        for j, y in enumerate(ys):
            A[i, j], B[i] = _envelope_coefficients(params, x_ref, r, y, beta, fd_step)
    if not np.all(A < 0):
        raise EnvelopeError(f"A is not uniformly negative (max {A.max():.3g}); shrink r_star or epsilon_band")
    if not (np.all(B > 0) or np.all(B < 0)):
        raise EnvelopeError("B changes sign on the window; shrink r_star")
    A00, B00 = _envelope_coefficients(params, x_ref, r_min, 0.0, beta, fd_step)
    return EnvelopeBounds(beta, float(A.min()), float(A.max()), float(B.min()), float(B.max()), x_ref, A00, B00)


def shoot_inside_envelope(params, bounds, r_star=None, epsilon=None):
    """Ray launched at ``r = epsilon`` midway between the two barriers."""
    start = singular_start(params) if epsilon is None else singular_start(params, epsilon=epsilon)
    r_star = params.r_max if r_star is None else r_star
    y_eps = 0.5 * float(bounds.z0(start.epsilon) + bounds.z1(start.epsilon))
    return integrate_from_singularity(params, start, r_star, x_start=start.x0 + y_eps)


def check_envelope_containment(params, path, bounds, r_star=None):
    """``z0(r) <= x(r) - a**(2/3) <= z1(r)`` on every sample with ``r <= r_star``.

    ``detail['worst_margin']`` is the smallest distance to a barrier in
    units of the envelope width; negative means a violation.
    """
    r_star = float(path.r[-1]) if r_star is None else r_star
    sel = path.r <= r_star * (1 + 1e-12)
    r = path.r[sel]
    y = path.x[sel] - bounds.x_ref
    lo, hi = bounds.z0(r), bounds.z1(r)
    width = np.abs(hi - lo)
    margin = np.minimum(y - lo, hi - y) / width
    worst = float(margin.min())
    violation = np.maximum(np.maximum(lo - y, y - hi), 0.0) / np.maximum(np.abs(lo), np.abs(hi))
    return IdentityCheckResult(
        "envelope_containment", r.tolist(), float(violation.max()), 0.0, worst >= 0,
        {"worst_margin": worst, "samples": int(r.size)},
    )


def fit_exponent(path, r_lo, r_hi, min_samples=10):
    """Least-squares slope of ``log(t - 1)`` against ``log r`` on ``[r_lo, r_hi]``."""
    sel = (path.r >= r_lo) & (path.r <= r_hi)
    if sel.sum() < min_samples:
        raise DegenerateWindowError(f"only {int(sel.sum())} samples in [{r_lo}, {r_hi}]")
    tau = path.tau[sel]
    if np.any(tau <= 0):
        raise DegenerateWindowError("t - 1 must be positive on the fit window")
    slope, _ = np.polyfit(np.log(path.r[sel]), np.log(tau), 1)
    return float(slope)


def run_identity_suite(cases=DEFAULT_CASES):
    """Run every exact identity and the leading-order check on each ``(n, a)``."""
    results = {}
    for n, a in cases:
        params = geo.ModelParams(n, a)
        tag = f"n={n},a={a:g}"
        for check in (check_subsolution_margin, check_phi_on_horizon, check_phi_equals_rderiv):
            res = check(params)
            results[f"{res.name}[{tag}]"] = res
        if not (n == 3 and abs(a - 8 / 27) < 0.05):
            res = check_dphidt_on_horizon(params)
            results[f"{res.name}[{tag}]"] = res
    return results
