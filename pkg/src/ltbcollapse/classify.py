"""Endstate of the collapse: closed-form table versus numerical shooting evidence."""

import enum
from dataclasses import asdict, dataclass, field

from . import geometry as geo
from .errors import CollapseError, NoNakedStartError
from .geodesics import (
    ATOL,
    EPSILON,
    RTOL,
    TerminationKind,
    integrate_from_singularity,
    probe_to_centre,
    singular_start,
)
from .roots import HORIZON_THRESHOLD, critical_constants

__all__ = [
    "Verdict",
    "Rule",
    "Endstate",
    "NumericSettings",
    "ClassificationReport",
    "classify_analytic",
    "classify_numeric",
    "classify",
    "probe_anchors",
]

MARGINAL_BAND = 1e-6


class Verdict(str, enum.Enum):
    NAKED = "Naked"
    BLACK_HOLE = "BlackHole"
    # numeric side only: evidence missing or contradictory
    INCONCLUSIVE = "Inconclusive"


class Rule(str, enum.Enum):
    T4_1 = "T4.1"  # n = 1, 2: a ray leaves the singularity
    T3_1 = "T3.1"  # n >= 4: horizon forms first
    P5_1 = "P5.1"  # n = 3, a <= 8/27
    P5_2 = "P5.2"  # n = 3, a >= a_c
    P5_3 = "P5.3"  # n = 3, 8/27 < a < a_c


@dataclass(frozen=True)
class Endstate:
    verdict: Verdict
    marginal: bool = False


@dataclass(frozen=True)
class NumericSettings:
    """Tolerances and probe layout for the numerical verdict.

    Probes are anchored a fraction ``anchor_depth`` of the trapped-region
    width ``t_s - t_h`` below the horizon. A probe counts as resolved once
    its ray is seen at ``t < 1 - probe_margin * r**alpha``.
    """

    rtol: float = RTOL
    atol: float = ATOL
    epsilon: float = EPSILON
    root_index: int = 0
    probe_radii: tuple = (0.01, 0.02, 0.03, 0.04, 0.05)
    anchor_depth: float = 1e-2
    probe_margin: float = 1e-6
    probe_floor: float = 1e-80

    def to_dict(self):
        d = asdict(self)
        d["probe_radii"] = list(self.probe_radii)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["probe_radii"] = tuple(d.get("probe_radii", cls.probe_radii))
        return cls(**d)


def _is_marginal(n, a):
    return n == 3 and abs(a - critical_constants().a_c) <= MARGINAL_BAND


def classify_analytic(n, a):
    """Verdict and rule tag from the closed-form table for ``k = 1 - a r**n + ...``."""
    if n < 1 or not a > 0:
        raise ValueError(f"need n >= 1 and a > 0, got n={n}, a={a}")
    marginal = _is_marginal(n, a)
    if n in (1, 2):
        return Endstate(Verdict.NAKED), Rule.T4_1
    if n >= 4:
        return Endstate(Verdict.BLACK_HOLE), Rule.T3_1
    if a <= HORIZON_THRESHOLD:
        return Endstate(Verdict.BLACK_HOLE, marginal), Rule.P5_1
    if a >= critical_constants().a_c:
        return Endstate(Verdict.NAKED, marginal), Rule.P5_2
    return Endstate(Verdict.BLACK_HOLE, marginal), Rule.P5_3


def probe_anchors(params, settings):
    """Sub-horizon events ``(r1, t1)`` from which rays are followed inward."""
    scale = min(1.0, params.r_max / 0.1)
    anchors = []
    for radius in settings.probe_radii:
        r1 = radius * scale
        th = geo.horizon_offset(params, r1)
        ts = geo.singularity_time(params, r1) - 1
        anchors.append((r1, 1 + th - settings.anchor_depth * (ts - th)))
    return anchors


def classify_numeric(params, settings=None):
    """Numerical verdict with its evidence.

    Naked: a singular start exists and the ray launched from it reaches
    ``r_max`` without crossing the horizon. BlackHole: no singular start
    exists and every probe ray from just under the horizon is traced back
    to ``t < 1``, i.e. to the regular centre. Anything else is Inconclusive.
    """
    settings = NumericSettings() if settings is None else settings
    evidence = {"start": None}
    marginal = _is_marginal(params.n, params.a)
    try:
        start = singular_start(params, settings.epsilon, settings.root_index)
    except NoNakedStartError as exc:
        evidence["start_error"] = str(exc)
        start = None

    if start is not None:
        evidence["start"] = {"alpha": start.alpha, "x0": start.x0, "epsilon": start.epsilon, "marginal": start.marginal}
        marginal = marginal or start.marginal
        try:
            path = integrate_from_singularity(params, start, rtol=settings.rtol, atol=settings.atol)
        except CollapseError as exc:
            evidence["error"] = f"{type(exc).__name__}: {exc}"
            return Endstate(Verdict.INCONCLUSIVE, marginal), evidence
        evidence["termination"] = path.termination.kind.value
        evidence["termination_r"] = path.termination.r
        evidence["steps"] = int(path.r.size)
        if path.termination.kind is TerminationKind.REACHED_R_MAX:
            evidence["r_escape"] = float(path.r[-1])
            return Endstate(Verdict.NAKED, marginal), evidence
        evidence["conflict"] = "singular start exists but its ray does not stay under the horizon"
        return Endstate(Verdict.INCONCLUSIVE, marginal), evidence

    probes = []
    for r1, t1 in probe_anchors(params, settings):
        res = probe_to_centre(
            params, r1, t1, settings.probe_floor, settings.probe_margin, rtol=settings.rtol, atol=settings.atol
        )
        probes.append(res.to_dict())
    evidence["probes"] = probes
    evidence["probe_limits"] = [1 + p["tau_end"] for p in probes]
    if all(p["resolved"] for p in probes):
        return Endstate(Verdict.BLACK_HOLE, marginal), evidence
    evidence["conflict"] = "no singular start, but some probe rays were not traced back below t = 1"
    return Endstate(Verdict.INCONCLUSIVE, marginal), evidence


@dataclass
class ClassificationReport:
    params: geo.ModelParams
    analytic: Endstate
    rule: Rule
    numeric: Endstate
    evidence: dict = field(default_factory=dict)
    agree: bool = False
    reason: str = ""

    def to_dict(self):
        return {
            "params": self.params.to_dict() if self.params is not None else None,
            "analytic": {"verdict": self.analytic.verdict.value, "marginal": self.analytic.marginal},
            "rule": self.rule.value,
            "numeric": {"verdict": self.numeric.verdict.value, "marginal": self.numeric.marginal},
            "evidence": self.evidence,
            "agree": self.agree,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        params = None
        if p is not None:
            params = geo.ModelParams(p["n"], p["a"], tuple(tuple(t) for t in p["gamma"]), p["r_max"])
        return cls(
            params=params,
            analytic=Endstate(Verdict(d["analytic"]["verdict"]), d["analytic"]["marginal"]),
            rule=Rule(d["rule"]),
            numeric=Endstate(Verdict(d["numeric"]["verdict"]), d["numeric"]["marginal"]),
            evidence=d["evidence"],
            agree=d["agree"],
            reason=d["reason"],
        )


def classify(params, settings=None):
    """Run both verdicts for one model and record whether they agree."""
    analytic, rule = classify_analytic(params.n, params.a)
    numeric, evidence = classify_numeric(params, settings)
    agree = numeric.verdict == analytic.verdict
    reason = ""
    if numeric.verdict is Verdict.INCONCLUSIVE:
        reason = evidence.get("conflict") or evidence.get("error", "inconclusive")
    elif not agree:
        reason = f"analytic {analytic.verdict.value} ({rule.value}) vs numeric {numeric.verdict.value}"
    return ClassificationReport(params, analytic, rule, numeric, evidence, agree, reason)

