"""Exception hierarchy shared by all modules."""


class CollapseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CollapseError, ValueError):
    """Evaluation point lies outside the region where a quantity is defined."""


class ModelError(CollapseError, ValueError):
    """A model configuration violates one of the model invariants."""

    def __init__(self, rule, message):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule


class CollapseSignal(CollapseError, ArithmeticError):
    """Geometric degeneracy reached (focusing, crossing, singular derivative)."""


class ShellFocusingError(CollapseSignal):
    """The area radius vanishes: shell-focusing singularity."""


class ShellCrossingError(CollapseSignal):
    """R' vanishes while R > 0: shell-crossing singularity."""


class SingularDerivativeError(CollapseSignal):
    """R' diverges because 1 - k t = 0 exactly."""


class NoNakedStartError(CollapseError):
    """No singular start (t = 1 + x0 r^alpha, x0 > 0, below the horizon) exists."""


class StepFailure(CollapseError):
    """The adaptive step controller fell below the minimum step."""

    def __init__(self, s, h, message="step size underflow"):
        super().__init__(f"{message} at s={s!r} (h={h!r})")
        self.s = s
        self.h = h


class NonMonotonePredicate(CollapseError):
    """A bisection predicate did not change value exactly once on the bracket."""


class EnvelopeError(CollapseError):
    """Sampled comparison coefficients lack the sign structure the bounds need."""


class DegenerateWindowError(CollapseError, ValueError):
    """Too few samples in a fitting window."""
