"""Scalar Dormand-Prince 5(4) integrator with step rejection on domain errors.

Stage evaluations that leave the domain of the right-hand side (raising
DomainError) are treated as an infinitely bad error estimate, so the step
is retried with a smaller size. This lets the geodesic shooter approach
the singularity curve without ever evaluating a cube root of a negative
gap.
"""

import math

from .errors import DomainError, StepFailure

# Dormand & Prince (1980) tableau, 5th-order propagation with FSAL
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# difference between 5th and embedded 4th order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
REJECT_FACTOR = 0.25


def dopri_step(fun, s, y, h, f0=None):
    """One unconditioned DP5(4) step. Returns ``(y_new, err, f_new)``."""
    k = [f0 if f0 is not None else fun(s, y)]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(fun(s + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k))
    err = h * sum(e * kj for e, kj in zip(_E, k))
    return y_new, err, k[6]


def dopri_steps(fun, s0, y0, s_end, *, rtol=1e-10, atol=1e-12, h0=None, h_max=math.inf, h_min=1e-14):
    """Yield ``(s, y)`` after every accepted step from ``s0`` to ``s_end``.

    Integration runs backwards when ``s_end < s0``. ``h_min`` bounds the
    step magnitude from below; reaching it raises StepFailure. A domain
    error in any stage counts as a rejected step.
    """
    direction = 1.0 if s_end >= s0 else -1.0
    span = abs(s_end - s0)
    if span == 0:
        return
    h = min(h_max, span, h0 if h0 is not None else 1e-3 * span)
    s, y = s0, y0
    f0 = fun(s, y)
    while direction * (s_end - s) > 0:
        h = min(h, abs(s_end - s))
        last = h >= abs(s_end - s)
        signed = direction * h
        try:
            y_new, err, f_new = dopri_step(fun, s, y, signed, f0)
            scale = atol + rtol * max(abs(y), abs(y_new))
            ratio = abs(err) / scale
            if not math.isfinite(ratio):
                raise DomainError("non-finite stage")
        except DomainError:
            h *= REJECT_FACTOR
            if h < h_min:
                raise StepFailure(s, h, "domain rejection drove step below minimum") from None
            continue
        if ratio <= 1.0:
            s = s_end if last else s + signed
            y, f0 = y_new, f_new
            yield s, y
            grow = MAX_FACTOR if ratio == 0 else min(MAX_FACTOR, SAFETY * ratio**-0.2)
            h = min(h_max, h * grow)
        else:
            h *= max(MIN_FACTOR, SAFETY * ratio**-0.2)
            if h < h_min:
                raise StepFailure(s, h)
