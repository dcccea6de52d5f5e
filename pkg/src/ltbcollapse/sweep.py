"""Parameter sweeps, model configuration files and tabular output."""

import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from ._version import __version__
from .classify import ClassificationReport, Endstate, NumericSettings, Verdict, classify, classify_analytic
from .errors import CollapseError, ModelError
from .geometry import ModelParams

__all__ = [
    "SweepGrid",
    "SweepResult",
    "ConfigError",
    "natural_window",
    "run_sweep",
    "emit",
    "load_model_config",
    "parse_model_config",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("n", "a", "analytic", "rule", "numeric", "agree", "x0", "alpha", "termination", "r_escape")
WORKERS_ENV = "LTBCOLLAPSE_WORKERS"
CONFIG_KEYS = ("n", "a", "gamma", "r_max")


class ConfigError(ValueError):
    """Malformed model configuration; ``rule`` names the violated check."""

    def __init__(self, rule, message):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule


def natural_window(n, a, cap=0.1):
    """Outer radius for a model with ``k = 1 - a r**n``.

    The near-centre scalings hold while ``a r**n`` is small; for n < 3 the
    escaping ray also has to stay inside ``r ~ a**(1/(3-n))``, beyond which
    the horizon overtakes it.
    """
    w = min(cap, 0.5 * a ** (-1.0 / n))
    if n < 3:
        w = min(w, 0.25 * a ** (1.0 / (3 - n)))
    return float(w)


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over ``n`` and ``a``; both ``a`` endpoints included."""

    n_values: tuple
    a_min: float
    a_max: float
    a_steps: int
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")
        if not 0 < self.a_min <= self.a_max:
            raise ValueError("need 0 < a_min <= a_max")
        if self.a_steps < 1 or (self.a_steps == 1 and self.a_min != self.a_max):
            raise ValueError("a_steps must be >= 2 unless a_min == a_max")

    def a_values(self):
        if self.a_steps == 1:
            return [float(self.a_min)]
        make = np.geomspace if self.spacing == "log" else np.linspace
        vals = make(self.a_min, self.a_max, self.a_steps)
        vals[0], vals[-1] = self.a_min, self.a_max
        return [float(v) for v in vals]

    def points(self):
        return [(int(n), a) for n in self.n_values for a in self.a_values()]

    def to_dict(self):
        return {
            "n_values": [int(n) for n in self.n_values],
            "a_min": self.a_min,
            "a_max": self.a_max,
            "a_steps": self.a_steps,
            "spacing": self.spacing,
        }


def _failed_report(n, a, params, exc):
    analytic, rule = classify_analytic(n, a)
    reason = f"{type(exc).__name__}: {exc}"
    return ClassificationReport(
        params, analytic, rule, Endstate(Verdict.INCONCLUSIVE), {"error": reason}, False, reason
    )


def _run_point(job):
    n, a, gamma_terms, r_max, settings = job
    t0 = time.perf_counter()
    params = None
    try:
        params = ModelParams(n, a, gamma_terms, natural_window(n, a) if r_max is None else r_max)
        report = classify(params, settings)
    except (CollapseError, ArithmeticError, ValueError) as exc:
        report = _failed_report(n, a, params, exc)
    return report, time.perf_counter() - t0


def _worker_count(workers):
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


@dataclass
class SweepResult:
    rows: list
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {"provenance": self.provenance, "rows": [r.to_dict() for r in self.rows]}

    @classmethod
    def from_dict(cls, d):
        return cls([ClassificationReport.from_dict(r) for r in d["rows"]], d["provenance"])

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def table(self):
        out = []
        for r in self.rows:
            ev = r.evidence
            start = ev.get("start") or {}
            out.append({
                "n": r.params.n if r.params else None,
                "a": r.params.a if r.params else None,
                "analytic": r.analytic.verdict.value,
                "rule": r.rule.value,
                "numeric": r.numeric.verdict.value,
                "agree": r.agree,
                "x0": start.get("x0"),
                "alpha": start.get("alpha"),
                "termination": ev.get("termination", "Resolved" if "probes" in ev else ""),
                "r_escape": ev.get("r_escape"),
            })
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.table():
            w.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c])
                        for c in CSV_COLUMNS])
        return buf.getvalue()

    def agreement(self):
        return sum(r.agree for r in self.rows) / len(self.rows) if self.rows else float("nan")

    def without_timing(self):
        d = self.to_dict()
        d["provenance"] = {k: v for k, v in d["provenance"].items() if k != "timing"}
        return d


def run_sweep(grid, settings=None, *, workers=None, gamma_terms=(), r_max=None):
    """Classify every grid point; rows keep grid order whatever the worker count.

    ``r_max=None`` picks :func:`natural_window` per point. Failures at a
    point are recorded in that point's row rather than raised.
    """
    settings = NumericSettings() if settings is None else settings
    jobs = [(n, a, tuple(gamma_terms), r_max, settings) for n, a in grid.points()]
    nw = _worker_count(workers)
    t0 = time.perf_counter()
    if nw == 1 or len(jobs) < 2:
        out = [_run_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            out = list(pool.map(_run_point, jobs, chunksize=max(1, len(jobs) // (4 * nw))))
    rows = [r for r, _ in out]
    provenance = {
        "package": "ltbcollapse",
        "version": __version__,
        "grid": grid.to_dict(),
        "settings": settings.to_dict(),
        "gamma": [list(t) for t in gamma_terms],
        "r_max": r_max,
        "timing": {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "workers": nw,
            "total_s": time.perf_counter() - t0,
            "point_s": [dt for _, dt in out],
        },
    }
    return SweepResult(rows, provenance)


def emit(result, fmt="csv", destination=None):
    """Serialise ``result`` as ``csv`` or ``json``; write it when a destination is given."""
    if fmt == "csv":
        text = result.to_csv()
    elif fmt == "json":
        text = result.to_json() + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None:
        return text
    if destination == "-":
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _parse_gamma(raw):
    if not isinstance(raw, list):
        raise ConfigError("gamma-list", "gamma must be a list of [power, coefficient] pairs")
    terms = []
    for i, item in enumerate(raw):
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ModelError("gamma-pair", f"gamma[{i}] = {item!r} is not a [power, coefficient] pair")
        terms.append((item[0], item[1]))
    return tuple(terms)


def parse_model_config(text, source="<string>"):
    """Build :class:`ModelParams` from JSON text with keys n, a, gamma, r_max."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        ctx = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ConfigError(
            "json", f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {ctx}\n    {' ' * (exc.colno - 1)}^"
        ) from None
    if not isinstance(data, dict):
        raise ConfigError("object", f"{source}: top level must be a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError("unknown-key", f"{source}: unknown key(s) {unknown}; allowed {list(CONFIG_KEYS)}")
    for key in ("n", "a"):
        if key not in data:
            raise ConfigError("missing-key", f"{source}: missing required key {key!r}")
    n, a = data["n"], data["a"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("n-int", f"{source}: n must be an integer, got {n!r}")
    if isinstance(a, bool) or not isinstance(a, (int, float)):
        raise ConfigError("a-number", f"{source}: a must be a number, got {a!r}")
    gamma = _parse_gamma(data.get("gamma", []))
    r_max = data.get("r_max")
    if r_max is None:
        r_max = natural_window(n, float(a)) if n >= 1 and a > 0 else 0.1
    elif isinstance(r_max, bool) or not isinstance(r_max, (int, float)):
        raise ConfigError("r_max-number", f"{source}: r_max must be a number, got {r_max!r}")
    return ModelParams(n, float(a), gamma, float(r_max))


def load_model_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model_config(fh.read(), str(path))
