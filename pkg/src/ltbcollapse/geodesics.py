"""Outgoing radial null geodesics ``dt/dr = phi(r, t)`` near the central singularity.

Rays are integrated in the rescaled unknown ``x(r) = (t(r) - 1) / r**alpha``
against ``s = ln r``. With ``m = min(n, alpha)`` and

    u = (1 - k) / r**m,   v = r k' / r**m,   D = u - k x r**(alpha - m),

one has ``1 - k t = r**m D`` exactly, and

    dx/ds = r x' = r**(1 - alpha + 2m/3) (D - (2/3) v t) / D**(1/3) - alpha x.

For the natural exponent (``alpha = 1 + 2n/3`` when n <= 3, ``alpha = 3``
otherwise) the prefactor is ``r**0``. This form is algebraically identical
to substituting ``t = 1 + x r**alpha`` into phi but involves no
cancellation of O(1) terms as ``r -> 0``.
"""

import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import DomainError, NoNakedStartError, StepFailure
from .geometry import cbrt
from .integrate import dopri_step, dopri_steps
from .roots import critical_constants, solve_roots

__all__ = [
    "SingularStart",
    "RegularStart",
    "TerminationKind",
    "Termination",
    "GeodesicPath",
    "ProbeResult",
    "natural_alpha",
    "phi",
    "dphi_dt",
    "scaled_gap",
    "scaled_rhs",
    "transformed_rhs",
    "horizon_x",
    "singular_start",
    "integrate_from_singularity",
    "integrate_from_point",
    "backward_probe",
    "probe_to_centre",
]

RTOL = 1e-10
ATOL = 1e-12
EPSILON = 1e-6
GAP_FLOOR = 1e-14
# max step in ln r; keeps sample density usable for exponent fits
H_MAX = 0.25
H_MIN = 1e-14
EVENT_RTOL = 1e-12
# scaled gap below which a step underflow is read as reaching the singularity curve
SINGULAR_PROXIMITY = 1e-8
MARGINAL_BAND = 1e-6


def natural_alpha(n):
    """Exponent of the ray ansatz ``t = 1 + x r**alpha``."""
    return (3 + 2 * n) / 3 if n <= 3 else 3.0


# ---------------------------------------------------------------------------
# the geodesic field in (r, t)


def phi(params, r, t):
    """Null slope ``(1 - kt - (2/3) r k' t) / (1 - kt)**(1/3)``; equals R'."""
    w = geo.one_minus_kt(params, r, t)
    if np.any(w <= 0):
        raise DomainError(f"phi needs 1 - k t > 0 (r={r!r}, t={t!r})")
    return (w - 2 * r * geo.k_prime(params, r) * t / 3) / cbrt(w)


def dphi_dt(params, r, t):
    """``-(2/3) [k (1 - kt) + r k' (1 - (2/3) k t)] / (1 - kt)**(4/3)``."""
    w = geo.one_minus_kt(params, r, t)
    if np.any(w <= 0):
        raise DomainError(f"dphi/dt needs 1 - k t > 0 (r={r!r}, t={t!r})")
    kr = geo.k(params, r)
    # 1 - (2/3) k t == (1 + 2 w) / 3
    num = kr * w + r * geo.k_prime(params, r) * (1 + 2 * w) / 3
    cw = cbrt(w)
    return -2 * num / (3 * cw**4)


# ---------------------------------------------------------------------------
# rescaled unknown x(r)


def _uvk(params, r, m):
    n, a = params.n, params.a
    rn = r ** (n - m)
    u = a * rn
    v = -n * a * rn
    for p, c in params.gamma_terms:
        rp = r ** (p - m)
        u = u - c * rp
        v = v + p * c * rp
    return u, v, 1 - r**m * u


def scaled_gap(params, r, x, alpha=None):
    """``D = (1 - k t) / r**m`` at ``t = 1 + x r**alpha``."""
    alpha = natural_alpha(params.n) if alpha is None else alpha
    m = min(params.n, alpha)
    u, _, kr = _uvk(params, r, m)
    return u - kr * x * r ** (alpha - m)


def scaled_rhs(params, r, x, alpha=None):
    """``r dx/dr`` for the ray ``t = 1 + x r**alpha`` (r > 0)."""
    alpha = natural_alpha(params.n) if alpha is None else alpha
    m = min(params.n, alpha)
    u, v, kr = _uvk(params, r, m)
    d = u - kr * x * r ** (alpha - m)
    if d <= 0:
        raise DomainError(f"post-singular ray point (r={r!r}, x={x!r})")
    t = 1 + x * r**alpha
    core = (d - 2 * v * t / 3) / cbrt(d)
    e = 1 - alpha + 2 * m / 3
    if e != 0:
        core = core * r**e
    return core - alpha * x


def transformed_rhs(params, r, x, alpha=None):
    """``dx/dr`` for the ray ``t = 1 + x r**alpha``.

    Note that this derivative itself need not vanish as ``r -> 0`` even on
    the singular ray (for n = 1, 2 it grows like ``r**(-n/3)``); it is
    ``r dx/dr`` (see scaled_rhs) that tends to zero there.
    """
    if np.any(r <= 0):
        raise DomainError("transformed_rhs requires r > 0")
    return scaled_rhs(params, r, x, alpha) / r


def horizon_x(params, r, alpha=None):
    """Apparent horizon in the rescaled unknown, ``(t_h - 1) / r**alpha``."""
    alpha = natural_alpha(params.n) if alpha is None else alpha
    return geo.horizon_offset(params, r) / r**alpha


# ---------------------------------------------------------------------------
# starts, paths, terminations


@dataclass(frozen=True)
class SingularStart:
    """Singular datum ``t(r) ~ 1 + x0 r**alpha`` launched at ``r = epsilon``."""

    alpha: float
    x0: float
    epsilon: float = EPSILON
    root_index: int = 0
    marginal: bool = False


@dataclass(frozen=True)
class RegularStart:
    r1: float
    t1: float


class TerminationKind(str, enum.Enum):
    REACHED_R_MAX = "ReachedRMax"
    CROSSED_HORIZON = "CrossedHorizon"
    HIT_SINGULARITY = "HitSingularity"
    STEP_FAILURE = "StepFailure"
    REACHED_FLOOR = "ReachedFloor"
    RESOLVED = "Resolved"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    r: float

    def __str__(self):
        return f"{self.kind.value}({self.r:.12g})"


@dataclass
class GeodesicPath:
    """Sampled ray, ordered by increasing r.

    ``x`` is the rescaled unknown; ``tau = t - 1 = x r**alpha`` keeps full
    relative precision where ``t`` itself rounds to 1.
    """

    params: geo.ModelParams
    alpha: float
    r: np.ndarray
    x: np.ndarray
    start: object
    termination: Termination
    meta: dict = field(default_factory=dict)

    @property
    def tau(self):
        return self.x * self.r**self.alpha

    @property
    def t(self):
        return 1 + self.tau

    @property
    def samples(self):
        return list(zip(self.r.tolist(), self.t.tolist()))

    def one_minus_kt(self):
        return geo.one_minus_kt(self.params, self.r, self.t)

    def table(self):
        """Columns r, t, t_h, t_s, 1 - kt as float arrays."""
        p = self.params
        gap = self.r ** min(p.n, self.alpha) * scaled_gap(p, self.r, self.x, self.alpha)
        return {
            "r": self.r,
            "t": self.t,
            "t_h": geo.horizon_time(p, self.r),
            "t_s": geo.singularity_time(p, self.r),
            "one_minus_kt": gap,
        }

    def to_csv(self):
        cols = self.table()
        buf = io.StringIO()
        buf.write("r,t,t_h,t_s,one_minus_kt\n")
        for row in zip(*(cols[c] for c in ("r", "t", "t_h", "t_s", "one_minus_kt"))):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()

    def to_dict(self):
        if isinstance(self.start, SingularStart):
            start = {"type": "singular", **self.start.__dict__}
        else:
            start = {"type": "regular", **self.start.__dict__}
        cols = self.table()
        return {
            "params": self.params.to_dict(),
            "alpha": self.alpha,
            "start": start,
            "termination": {"kind": self.termination.kind.value, "r": self.termination.r},
            "samples": {c: [float(v) for v in cols[c]] for c in cols} | {"x": self.x.tolist()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def singular_start(params, epsilon=EPSILON, root_index=0):
    """Leading behaviour of a ray leaving the central singularity.

    n = 1, 2: ``alpha = 1 + 2n/3`` and ``x0 = a**(2/3)``. n = 3: ``alpha = 3``
    and ``x0`` a positive root of the critical quartic lying under the
    horizon tangent ``a - 8/27`` (smallest by default; ``root_index=1``
    selects the other). Raises NoNakedStartError otherwise.
    """
    n, a = params.n, params.a
    if n in (1, 2):
        return SingularStart(alpha=natural_alpha(n), x0=float(cbrt(a)) ** 2, epsilon=epsilon)
    if n == 3:
        report = solve_roots(a)
        roots = report.below_horizon
        if not roots:
            if report.admissible:
                raise NoNakedStartError(
                    f"n=3, a={a}: positive roots {report.admissible} lie above the horizon tangent a-8/27"
                )
            raise NoNakedStartError(f"n=3, a={a}: the root equation has no positive root")
        if not 0 <= root_index < len(roots):
            raise NoNakedStartError(f"root_index {root_index} out of range for roots {roots}")
        idx = report.admissible.index(roots[root_index])
        marginal = report.multiplicity[idx] > 1 or abs(a - critical_constants().a_c) <= MARGINAL_BAND
        return SingularStart(alpha=3.0, x0=roots[root_index], epsilon=epsilon, root_index=root_index, marginal=marginal)
    raise NoNakedStartError(f"n={n} >= 4: no positive tangent reaches the singular point")


# ---------------------------------------------------------------------------
# shooting


def _shoot(params, alpha, r0, x0, r_end, *, rtol, atol, h_max, floor, detect_horizon, stop=None):
    """Integrate x in ln r from r0 to r_end; returns (rs, xs, Termination)."""
    m = min(params.n, alpha)
    fun = lambda s, x: scaled_rhs(params, math.exp(s), x, alpha)
    crossed = lambda r, x: detect_horizon and x >= horizon_x(params, r, alpha)

    rs, xs = [r0], [x0]
    if scaled_gap(params, r0, x0, alpha) <= 0:
        raise DomainError(f"start point (r={r0}, x={x0}) is not pre-singular")
    if crossed(r0, x0):
        return rs, xs, Termination(TerminationKind.CROSSED_HORIZON, r0)

    s_prev, x_prev = math.log(r0), x0
    s_end = math.log(r_end)
    term = TerminationKind.REACHED_R_MAX if r_end > r0 else TerminationKind.REACHED_FLOOR
    try:
        for s, x in dopri_steps(fun, s_prev, x0, s_end, rtol=rtol, atol=atol, h_max=h_max, h_min=H_MIN):
            r = math.exp(s)
            if crossed(r, x):
                r, x = _locate_crossing(params, alpha, fun, s_prev, x_prev, s - s_prev)
                rs.append(r)
                xs.append(x)
                return rs, xs, Termination(TerminationKind.CROSSED_HORIZON, r)
            rs.append(r)
            xs.append(x)
            if scaled_gap(params, r, x, alpha) <= floor:
                return rs, xs, Termination(TerminationKind.HIT_SINGULARITY, r)
            if stop is not None and stop(r, x):
                return rs, xs, Termination(TerminationKind.RESOLVED, r)
            s_prev, x_prev = s, x
    except StepFailure:
        r = rs[-1]
        kind = TerminationKind.STEP_FAILURE
        if scaled_gap(params, r, xs[-1], alpha) <= SINGULAR_PROXIMITY:
            kind = TerminationKind.HIT_SINGULARITY
        return rs, xs, Termination(kind, r)
    rs[-1] = r_end
    return rs, xs, Termination(term, r_end)


def _locate_crossing(params, alpha, fun, s0, x0, h):
    """Bisect the step length until the crossing radius is known to EVENT_RTOL."""
    g = lambda s, x: x - horizon_x(params, math.exp(s), alpha)
    lo, hi = 0.0, h
    x_hi = dopri_step(fun, s0, x0, h)[0]
    while abs(hi - lo) > EVENT_RTOL:
        mid = 0.5 * (lo + hi)
        try:
            x_mid = dopri_step(fun, s0, x0, mid)[0]
        except DomainError:
            hi = mid
            continue
        if g(s0 + mid, x_mid) >= 0:
            hi, x_hi = mid, x_mid
        else:
            lo = mid
    return math.exp(s0 + hi), x_hi


def _path(params, alpha, rs, xs, start, term, **meta):
    rs, xs = np.asarray(rs), np.asarray(xs)
    if rs.size > 1 and rs[-1] < rs[0]:
        rs, xs = rs[::-1], xs[::-1]
    return GeodesicPath(params, alpha, rs, xs, start, term, meta)


def integrate_from_singularity(
    params, start, r_max=None, *, rtol=RTOL, atol=ATOL, x_start=None, h_max=H_MAX, floor=GAP_FLOOR
):
    """Shoot the ray ``t = 1 + x r**alpha`` outward from ``r = start.epsilon``.

    ``x(epsilon) = x0`` unless ``x_start`` overrides it (used to launch
    inside the comparison envelope). Stops at the first horizon crossing,
    on reaching the singularity curve (scaled gap ``<= floor``) or at
    ``r_max``.
    """
    r_max = params.r_max if r_max is None else r_max
    if not start.epsilon < r_max <= params.r_max * (1 + 1e-12):
        raise DomainError(f"need epsilon < r_max <= params.r_max, got r_max={r_max}")
    x0 = start.x0 if x_start is None else x_start
    rs, xs, term = _shoot(
        params, start.alpha, start.epsilon, x0, r_max,
        rtol=rtol, atol=atol, h_max=h_max, floor=floor, detect_horizon=True,
    )
    return _path(params, start.alpha, rs, xs, start, term, rtol=rtol, atol=atol)


def integrate_from_point(params, r1, t1, r_end, *, rtol=RTOL, atol=ATOL, h_max=H_MAX, detect_horizon=False, stop=None):
    """Integrate ``dt/dr = phi`` from a regular event ``(r1, t1)`` to ``r_end``."""
    alpha = natural_alpha(params.n)
    x1 = (t1 - 1) / r1**alpha
    rs, xs, term = _shoot(
        params, alpha, r1, x1, r_end,
        rtol=rtol, atol=atol, h_max=h_max, floor=GAP_FLOOR, detect_horizon=detect_horizon, stop=stop,
    )
    return _path(params, alpha, rs, xs, RegularStart(r1, t1), term)


def backward_probe(params, r1, t1, r_floor=1e-7, *, rtol=RTOL, atol=ATOL):
    """Value ``t(r_floor)`` of the ray through ``(r1, t1)`` followed inward.

    Since ``phi > 0`` the ray's time only decreases inward, so the result
    bounds from above the emission time at the centre. Raises DomainError
    if the ray leaves the pre-singular region.
    """
    if not 0 < r_floor < r1:
        raise DomainError(f"need 0 < r_floor < r1, got r_floor={r_floor}, r1={r1}")
    path = integrate_from_point(params, r1, t1, r_floor, rtol=rtol, atol=atol)
    if path.termination.kind is not TerminationKind.REACHED_FLOOR:
        raise DomainError(f"backward ray from (r={r1}, t={t1}) left the pre-singular region: {path.termination}")
    return float(path.t[0])


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of following one sub-horizon ray towards the centre.

    ``resolved`` means the ray was seen at ``t < 1`` (beyond ``margin`` in
    the scaled unknown), after which it can only emanate from the regular
    centre. ``tau_end = t - 1`` where integration stopped.
    """

    r1: float
    t1: float
    r_end: float
    tau_end: float
    status: str
    resolved: bool

    @property
    def t_end(self):
        return 1 + self.tau_end

    def to_dict(self):
        return dict(self.__dict__)


def probe_to_centre(params, r1, t1, r_floor=1e-80, margin=1e-6, *, rtol=RTOL, atol=ATOL):
    """Follow the ray through ``(r1, t1)`` inward until it is seen below ``t = 1``."""
    alpha = natural_alpha(params.n)
    stop = lambda r, x: x < -margin
    try:
        path = integrate_from_point(params, r1, t1, r_floor, rtol=rtol, atol=atol, stop=stop)
    except DomainError as exc:
        return ProbeResult(r1, t1, r1, t1 - 1, f"DomainError: {exc}", False)
    x_end = float(path.x[0])
    r_end = float(path.r[0])
    resolved = x_end < -margin
    return ProbeResult(r1, t1, r_end, x_end * r_end**alpha, path.termination.kind.value, resolved)
