"""Endstates of marginally bound spherical dust collapse.

A model is fixed by ``k(r) = 1 - a r**n + ...``. The package decides
whether outgoing null rays escape the central shell-focusing singularity
(naked) or whether the apparent horizon forms first (black hole), both
from the closed-form table and by shooting the ray equation.
"""

from ._version import __version__
from .classify import (
    ClassificationReport,
    Endstate,
    NumericSettings,
    Rule,
    Verdict,
    classify,
    classify_analytic,
    classify_numeric,
)
from .errors import (
    CollapseError,
    CollapseSignal,
    DomainError,
    ModelError,
    NoNakedStartError,
    ShellCrossingError,
    ShellFocusingError,
    SingularDerivativeError,
)
from .geodesics import (
    GeodesicPath,
    SingularStart,
    TerminationKind,
    backward_probe,
    integrate_from_point,
    integrate_from_singularity,
    probe_to_centre,
    singular_start,
)
from .geometry import ModelParams, SpacetimePoint
from .roots import Q, RootReport, critical_constants, find_critical_a_numeric, solve_roots
from .sweep import SweepGrid, SweepResult, emit, load_model_config, natural_window, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
