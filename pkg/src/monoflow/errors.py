"""Exception hierarchy shared by all monoflow modules.

Domain errors (anything a caller can trigger with valid-but-unlucky inputs)
derive from :class:`MonoflowError` so the CLI can map them to exit code 1.
"""

from __future__ import annotations


class MonoflowError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(MonoflowError):
    """A vector or matrix does not match the expected dimension."""


# --- cones -----------------------------------------------------------------

class InvalidCone(MonoflowError):
    """Base for cone construction failures."""


class NonSolidCone(InvalidCone):
    """The cone has empty interior (no strictly feasible point found)."""


class NotPointed(InvalidCone):
    """The cone contains a full line (C and -C share a nonzero vector)."""


# --- expression parsing / evaluation ---------------------------------------

class ParseError(MonoflowError):
    """Syntax error in a vector-field expression string."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"at position {position}: {message}")


class UnknownVariable(ParseError):
    """An identifier is not one of the declared state variables."""


class DomainError(MonoflowError):
    """Field evaluation left the real domain (log/sqrt of a negative,
    division by zero, or a non-finite result)."""

    def __init__(self, message: str, component: int | None = None):
        self.component = component
        if component is not None:
            message = f"component {component}: {message}"
        super().__init__(message)


# --- integration ------------------------------------------------------------

class BlowUp(MonoflowError):
    """The state norm exceeded the configured cap before the horizon."""

    def __init__(self, t_reached: float):
        self.t_reached = t_reached
        super().__init__(f"state norm cap exceeded at t = {t_reached:.6g}")


class AlphaUnbounded(BlowUp):
    """Backward orbit escaped: the backward-limit set cannot be sampled."""


class StepFailure(MonoflowError):
    """Adaptive step size underflowed without meeting the error tolerance."""


# --- monotonicity certification ---------------------------------------------

class UnsupportedCone(MonoflowError):
    """The requested analysis only supports orthant cones."""


class EigenFailure(MonoflowError):
    """The eigensolver did not converge."""


class SamplingFailure(MonoflowError):
    """Too many sampled trials were dropped (e.g. by blow-up) to report."""


# --- oscillation scanning -----------------------------------------------------

class DegenerateInterval(MonoflowError):
    """Steepening consumed the whole interval on the sample grid."""


# --- witness construction -----------------------------------------------------

class InvalidProblem(MonoflowError):
    """Witness problem invariants violated (need A > 0, B > 0, 0 < E <= A)."""


class ToleranceAmbiguity(MonoflowError):
    """A float-mode comparison landed within epsilon of a case boundary;
    the branch cannot be decided reliably.  Switch to exact rationals."""


class IterationCap(MonoflowError):
    """The recursion exceeded the configured iteration cap."""


# --- limit sets ----------------------------------------------------------------

class VNotInterior(MonoflowError):
    """The projection direction is not strictly inside the cone."""


class NotEquilibrium(MonoflowError):
    """The point is not an equilibrium to the required residual."""


class NotPeriodic(MonoflowError):
    """The point does not return to itself after the claimed period."""
