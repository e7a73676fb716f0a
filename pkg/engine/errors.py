"""
Domain errors raised by the geometry engine.

Integrators never raise on reaching the singular set; they return a
trajectory flagged with the matching reason. These classes are raised by
callers that need a complete run (see Trajectory.or_raise).
"""
from typing import Optional


class PwlabError(Exception):
    """Base class for all engine errors."""


class SpecError(PwlabError):
    """A spec file or spec object failed to parse or validate."""


class InvalidPointError(PwlabError):
    """Evaluation requested on the singular set of a profile."""


class JetDomainError(InvalidPointError):
    """Division by a zero jet or root of a nonpositive jet."""


class DegenerateBasis(PwlabError):
    """The normal-form basis cannot be built because b vanishes at the point."""


class NonIsotropicXi(PwlabError):
    """A structure tensor of strongly degenerate type needs a nonzero null vector."""


class SingularityReached(PwlabError):
    def __init__(self, t: float, message: Optional[str] = None):
        self.t = t
        super().__init__(message or f"singular set reached at t={t:.9g}")


class BlowUp(PwlabError):
    def __init__(self, t: float, message: Optional[str] = None):
        self.t = t
        super().__init__(message or f"solution escapes to infinity at t={t:.9g}")


class StepUnderflow(PwlabError):
    def __init__(self, t: float, message: str = "integrator could not meet tolerance"):
        self.t = t
        super().__init__(f"{message} (t={t:.9g})")
