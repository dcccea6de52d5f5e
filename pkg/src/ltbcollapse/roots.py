"""Critical-case algebra for n = 3: the quartic root equation and Q(a, x).

A ray of the form ``t = 1 + x r**3`` can leave the central singularity only
if its tangent ``x`` is a positive root of

    27 x**3 (a - x) - (3 a - x)**3 = 0,

equivalently ``Q(a, x) = (3a - x)/(a - x)**(1/3) - 3x = 0`` with the real
cube root. Positive roots exist only for ``a <= a_0`` (where they sit past
the singularity curve, ``x > a``) or ``a >= a_c``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonMonotonePredicate

__all__ = [
    "CriticalConstants",
    "RootReport",
    "critical_constants",
    "quartic_coefficients",
    "companion_matrix",
    "Q",
    "solve_roots",
    "has_admissible_root",
    "find_critical_a_numeric",
    "find_lower_critical_a_numeric",
]

HORIZON_THRESHOLD = 8 / 27
# relative separation below which two roots are reported as one double root
DOUBLE_ROOT_SEPARATION = 1e-6
Q_RESIDUAL_TOL = 1e-10
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class CriticalConstants:
    a_c: float
    a_0: float
    horizon_threshold: float = HORIZON_THRESHOLD


def critical_constants():
    s = 26 + 15 * math.sqrt(3)
    return CriticalConstants(a_c=2 * s / 27, a_0=(2 / 27) / s)


def quartic_coefficients(a):
    """Coefficients, degree 4 first, of ``27x^3(a-x) - (3a-x)^3``."""
    return (-27.0, 27.0 * a + 1.0, -9.0 * a, 27.0 * a * a, -27.0 * a**3)


def companion_matrix(coeffs):
    """Frobenius companion matrix of a polynomial given highest degree first."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    deg = c.size - 1
    if deg < 1:
        raise ValueError("polynomial must have degree >= 1")
    m = np.eye(deg, k=-1)
    m[0, :] = -c[1:] / c[0]
    return m


def Q(a, x):
    """``(3a - x)/(a - x)**(1/3) - 3x`` with the real cube root.

    Only ``x = a`` is excluded. For ``x > a`` the cube root is negative,
    which is the branch carrying the ``a <= a_0`` roots.
    """
    s = a - x
    if s == 0:
        raise DomainError("Q(a, x) is undefined at x = a")
    if hasattr(s, "_mpf_"):
        import mpmath

        cs = mpmath.cbrt(s) if s > 0 else -mpmath.cbrt(-s)
    else:
        cs = np.cbrt(s)
    return (3 * a - x) / cs - 3 * x


def _polyval(c, x):
    return float(np.polyval(c, x))


def _zero_tol(c, x):
    return 64 * _EPS * float(np.polyval(np.abs(c), abs(x)))


def _bisect(f, lo, hi, flo):
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid


def _real_roots(c, lo, hi):
    """Real roots of ``c`` in ``[lo, hi]`` isolated between critical points.

    Returns ``(root, multiplicity_hint)`` pairs; a critical point whose
    value is zero to rounding is reported as a double root.
    """
    c = np.trim_zeros(np.asarray(c, dtype=float), "f")
    deg = c.size - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[1] / c[0]
        return [(r, 1)] if lo <= r <= hi else []
    crit = [x for x, _ in _real_roots(np.polyder(c), lo, hi)]
    f = lambda x: _polyval(c, x)
    found = []
    for x in crit:
        if abs(f(x)) <= _zero_tol(c, x):
            found.append((x, 2))
    knots = [lo] + crit + [hi]
    for left, right in zip(knots[:-1], knots[1:]):
        fl, fr = f(left), f(right)
        if fl == 0 and left == lo:
            found.append((left, 1))
        if fr == 0 and right == hi:
            found.append((right, 1))
        if fl * fr < 0:
            found.append((_bisect(f, left, right, fl), 1))
    return _merge(found)


def _merge(found):
    found = sorted(found)
    merged = []
    for x, m in found:
        if merged and abs(x - merged[-1][0]) < DOUBLE_ROOT_SEPARATION * max(1.0, abs(x)):
            x0, m0 = merged[-1]
            merged[-1] = (x0 if m0 >= m else x, 2)
        else:
            merged.append((x, m))
    return merged


@dataclass(frozen=True)
class RootReport:
    """Roots of the critical quartic for one amplitude ``a``.

    ``admissible`` lists the distinct positive real roots (verified against
    Q with the real cube root); ``multiplicity`` runs parallel to it.
    """

    a: float
    quartic_coeffs: tuple
    all_roots: tuple
    admissible: tuple
    multiplicity: tuple = field(default=())

    @property
    def below_singularity(self):
        """Admissible roots with ``x < a``, i.e. rays with ``1 - k t > 0``."""
        return tuple(x for x in self.admissible if x < self.a)

    @property
    def below_horizon(self):
        """Admissible roots under the horizon tangent ``x < a - 8/27``."""
        return tuple(x for x in self.admissible if x < self.a - HORIZON_THRESHOLD)

    @property
    def regime(self):
        if not self.admissible:
            return "gap"
        if self.below_singularity:
            return "super-critical"
        return "low"

    def to_dict(self):
        return {
            "a": self.a,
            "coefficients": list(self.quartic_coeffs),
            "roots": [{"re": float(z.real), "im": float(z.imag)} for z in self.all_roots],
            "admissible": list(self.admissible),
            "regime": self.regime,
        }


def solve_roots(a):
    """All four roots (companion eigenvalues) plus the admissible positive set."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a!r}")
    coeffs = quartic_coefficients(a)
    eig = np.linalg.eigvals(companion_matrix(coeffs))
    all_roots = tuple(sorted((complex(z) for z in eig), key=lambda z: (z.real, z.imag)))

    c = np.asarray(coeffs)
    bound = 1.0 + float(np.max(np.abs(c[1:] / c[0])))
    admissible, mult = [], []
    for x, m in _real_roots(c, 0.0, bound):
        if x <= 0 or x == a:
            continue
        if abs(Q(a, x)) < Q_RESIDUAL_TOL * max(1.0, abs(x)):
            admissible.append(float(x))
            mult.append(m)
    return RootReport(a, coeffs, all_roots, tuple(admissible), tuple(mult))


def has_admissible_root(a):
    return bool(solve_roots(a).admissible)


def _boundary(lo, hi, want_at_hi, xtol, scan):
    """Bisect for the switch of ``has_admissible_root`` on ``[lo, hi]``."""
    plo, phi_ = has_admissible_root(lo), has_admissible_root(hi)
    if plo == phi_ or phi_ != want_at_hi:
        raise NonMonotonePredicate(
            f"predicate is {plo} at a={lo} and {phi_} at a={hi}; expected a single switch"
        )
    grid = np.geomspace(lo, hi, scan)
    values = [has_admissible_root(g) for g in grid]
    switches = sum(v1 != v0 for v0, v1 in zip(values[:-1], values[1:]))
    if switches != 1:
        raise NonMonotonePredicate(f"predicate switches {switches} times on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if has_admissible_root(mid) == want_at_hi:
            hi = mid
        else:
            lo = mid
    return hi if want_at_hi else lo


def find_critical_a_numeric(lo=1.0, hi=10.0, xtol=1e-13, scan=64):
    """Infimum of the upper admissible region, recovered by bisection."""
    return _boundary(lo, hi, True, xtol, scan)


def find_lower_critical_a_numeric(lo=1e-5, hi=0.1, xtol=1e-15, scan=64):
    """Supremum of the lower admissible region ``a <= a_0``."""
    return _boundary(lo, hi, False, xtol, scan)
