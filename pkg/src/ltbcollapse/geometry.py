"""Closed-form background of marginally bound Tolman-Bondi dust.

The model is specified through the "velocity" profile

    k(r) = 1 - a r**n + gamma(r),     gamma(r) = sum_p c_p r**p,  p >= n + 1,

from which the mass function ``F = (2/9) k**2 r**3``, the area radius
``R = r (1 - k t)**(2/3)``, the singularity curve ``t_s = 1/k`` and the
apparent horizon ``t_h = t_s - (8/27) k**2 r**3`` follow.

Every function accepts Python floats, numpy arrays or ``mpmath.mpf``
scalars; the latter is used by the verification module as a
high-precision oracle. Quantities that vanish at the centre (``1 - k``,
``1 - k t``) are formed without subtracting nearly equal numbers.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ModelError, ShellCrossingError, ShellFocusingError, SingularDerivativeError

__all__ = [
    "ModelParams",
    "SpacetimePoint",
    "gamma",
    "gamma_prime",
    "one_minus_k",
    "k",
    "k_prime",
    "mass_function",
    "mass_function_rderiv",
    "singularity_time",
    "horizon_time",
    "horizon_offset",
    "one_minus_kt",
    "area_radius",
    "area_radius_rderiv",
    "energy_density",
]

# number of interior samples used to validate k > 0 on [0, r_max]
K_POSITIVITY_SAMPLES = 10_000
_R_SLACK = 1e-12
# relative rounding allowance when testing a difference for zero
_ROUNDING = 16 * np.finfo(float).eps


def cbrt(x):
    """Real cube root for floats, arrays and mpmath scalars."""
    if hasattr(x, "_mpf_"):
        import mpmath

        return mpmath.cbrt(x) if x >= 0 else -mpmath.cbrt(-x)
    return np.cbrt(x)


@dataclass(frozen=True)
class ModelParams:
    """Marginally bound collapse model ``k(r) = 1 - a r**n + sum c_p r**p``.

    ``gamma_terms`` holds ``(power, coefficient)`` pairs; every power must be
    at least ``n + 1``. ``k(0) = 1`` holds by construction.
    """

    n: int
    a: float
    gamma_terms: tuple = ()
    r_max: float = 0.1

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ModelError("n>=1", f"perturbation order must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not np.isfinite(self.a) or self.a <= 0:
            raise ModelError("a>0", f"amplitude must be positive, got {self.a!r}")
        object.__setattr__(self, "a", float(self.a))
        if not np.isfinite(self.r_max) or self.r_max <= 0:
            raise ModelError("r_max>0", f"domain cutoff must be positive, got {self.r_max!r}")
        object.__setattr__(self, "r_max", float(self.r_max))

        terms = []
        for term in self.gamma_terms:
            try:
                p, c = term
            except (TypeError, ValueError):
                raise ModelError("gamma-pair", f"gamma term must be a (power, coeff) pair, got {term!r}") from None
            if isinstance(p, bool) or int(p) != p:
                raise ModelError("gamma-power-int", f"gamma power must be an integer, got {p!r}")
            if p < self.n + 1:
                raise ModelError(
                    "gamma-power>=n+1", f"gamma power {p} is below n+1={self.n + 1}"
                )
            if not np.isfinite(c):
                raise ModelError("gamma-coeff-finite", f"gamma coefficient must be finite, got {c!r}")
            terms.append((int(p), float(c)))
        object.__setattr__(self, "gamma_terms", tuple(sorted(terms)))

        rs = np.linspace(0.0, self.r_max, K_POSITIVITY_SAMPLES + 2)
        ks = k(self, rs)
        if np.any(ks <= 0):
            bad = rs[np.argmax(ks <= 0)]
            raise ModelError("k>0", f"k(r) is not positive on [0, r_max]; first failure near r={bad:.6g}")

    def to_dict(self):
        return {"n": self.n, "a": self.a, "gamma": [list(t) for t in self.gamma_terms], "r_max": self.r_max}

    def with_r_max(self, r_max):
        return ModelParams(self.n, self.a, self.gamma_terms, r_max)


class SpacetimePoint(NamedTuple):
    """Comoving coordinates ``(r, t)`` of an event on a radial line."""

    r: float
    t: float

    def is_presingular(self, params):
        return bool(one_minus_kt(params, self.r, self.t) > 0)


def _check_r(params, r):
    if np.any(r < 0) or np.any(r > params.r_max * (1 + _R_SLACK)):
        raise DomainError(f"r must lie in [0, r_max={params.r_max}], got {r!r}")


def gamma(params, r):
    """Higher-order tail ``sum c_p r**p`` of k."""
    out = 0 * r
    for p, c in params.gamma_terms:
        out = out + c * r**p
    return out


def gamma_prime(params, r):
    out = 0 * r
    for p, c in params.gamma_terms:
        out = out + p * c * r ** (p - 1)
    return out


def one_minus_k(params, r):
    """``1 - k(r) = a r**n - gamma(r)``, formed without cancellation."""
    _check_r(params, r)
    return params.a * r**params.n - gamma(params, r)


def k(params, r):
    _check_r(params, r)
    return 1 - params.a * r**params.n + gamma(params, r)


def k_prime(params, r):
    _check_r(params, r)
    n = params.n
    return -n * params.a * r ** (n - 1) + gamma_prime(params, r)


def mass_function(params, r):
    """Initial mass ``F(r) = (2/9) k**2 r**3`` (inverse of ``k = (3/2) sqrt(2F/r**3)``)."""
    kr = k(params, r)
    return 2 * kr**2 * r**3 / 9


def mass_function_rderiv(params, r):
    kr = k(params, r)
    return 2 * (2 * kr * k_prime(params, r) * r**3 + 3 * kr**2 * r**2) / 9


def _require_positive_k(kr):
    if np.any(kr <= 0):
        raise DomainError("k(r) must be positive")


def singularity_time(params, r):
    """Comoving time ``t_s = 1/k`` at which shell r is crushed to R = 0."""
    kr = k(params, r)
    _require_positive_k(kr)
    return 1 / kr


def horizon_offset(params, r):
    """``t_h(r) - 1`` computed without cancellation near the centre."""
    kr = k(params, r)
    _require_positive_k(kr)
    return one_minus_k(params, r) / kr - 8 * kr**2 * r**3 / 27


def horizon_time(params, r):
    """Apparent horizon ``t_h = 1/k - (8/27) k**2 r**3``."""
    return 1 + horizon_offset(params, r)


def one_minus_kt(params, r, t):
    """``1 - k(r) t`` evaluated as ``(1 - k) - k (t - 1)``."""
    return one_minus_k(params, r) - k(params, r) * (t - 1)


def _gap(params, r, t):
    w = one_minus_kt(params, r, t)
    if np.any(w < 0):
        raise DomainError(f"post-singular point: 1 - k t < 0 at r={r!r}, t={t!r}")
    return w


def area_radius(params, r, t):
    """Area radius ``R = r (1 - k t)**(2/3)``."""
    w = _gap(params, r, t)
    return r * cbrt(w) ** 2


def area_radius_rderiv(params, r, t):
    """``R' = (1 - kt)**(2/3) - (2/3) r k' t (1 - kt)**(-1/3)``.

    Raises SingularDerivativeError on the singularity curve itself, where
    the second term diverges.
    """
    w = _gap(params, r, t)
    drift = 2 * r * k_prime(params, r) * t / 3
    if np.any(w == 0):
        if np.all(drift == 0):
            return 0 * w
        raise SingularDerivativeError(f"R' diverges on the singularity curve at r={r!r}")
    cw = cbrt(w)
    return cw**2 - drift / cw


def energy_density(params, r, t):
    """Dust energy density ``F' / (4 pi R**2 R')``.

    Raises ShellFocusingError where R = 0 (r > 0) and ShellCrossingError
    where R' = 0 with R > 0, each to within the rounding error of the
    expression involved. The centre r = 0 is outside the domain (the
    density there is only a limit).
    """
    if np.any(r <= 0):
        raise DomainError("energy density requires r > 0")
    w = _gap(params, r, t)
    kr = k(params, r)
    w_noise = _ROUNDING * (abs(one_minus_k(params, r)) + abs(kr * (t - 1)))
    if np.any(w <= w_noise):
        raise ShellFocusingError(f"R = 0 at r={r!r}, t={t!r}")
    cw = cbrt(w)
    drift = 2 * r * k_prime(params, r) * t / 3
    dR = cw**2 - drift / cw
    if np.any(abs(dR) <= _ROUNDING * (cw**2 + abs(drift / cw))):
        raise ShellCrossingError(f"R' = 0 with R > 0 at r={r!r}, t={t!r}")
    R = r * cw**2
    pi = np.pi if not hasattr(r, "_mpf_") else _mp_pi()
    return mass_function_rderiv(params, r) / (4 * pi * R**2 * dR)


def _mp_pi():
    import mpmath

    return +mpmath.pi
