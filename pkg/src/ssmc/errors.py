"""Exception types raised by the simulators and the characterization pipeline.

Plain ``ValueError`` is used for invalid arguments throughout the package;
the classes here cover failures that occur mid-run and need to carry physics
context (which species, which time step).
"""


class SsmcError(Exception):
    """Base class for run-time failures of the characterization pipeline."""


class TrackingError(SsmcError):
    """Base class for failures while computing a tracking control value."""

    def __init__(self, message, species=None, step=None):
        if species is not None or step is not None:
            message = f"{message} (species={species!r}, step={step})"
        super().__init__(message)
        self.species = species
        self.step = step


class TrackingSingularityError(TrackingError):
    """Tracking-field denominator fell below the configured floor."""


class UntrackableTargetError(TrackingError):
    """Requested response target exceeds what the current state can emit."""


class DegenerateStateError(TrackingError):
    """Neighbor-expectation magnitude too small for a well-defined phase."""


class NumericError(SsmcError):
    """Linear algebra or propagation failure (non-convergence, rank loss)."""
