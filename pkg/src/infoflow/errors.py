"""Exception and warning types shared across the package."""


class DimensionError(ValueError):
    """Array or mask shape does not match the grid it is used with."""


class InvalidDensityError(ValueError):
    """Density values are negative, non-finite, or badly normalized."""


class EmptySupportError(ValueError):
    """Operation requires a region carrying nonzero state measure."""


class ForbiddenBoundaryError(ValueError):
    """Operation invoked on a state space with a forbidden boundary axis."""


class IntegrationAbortedError(RuntimeError):
    """Velocity evaluation failed mid-integration.

    Carries ``last_state`` (position) and ``last_time`` of the last good step.
    """

    def __init__(self, message, last_state=None, last_time=None):
        super().__init__(message)
        self.last_state = last_state
        self.last_time = last_time


class StiffnessError(IntegrationAbortedError):
    """Speed exceeded the configured cap during integration."""


class StencilError(ValueError):
    """Finite-difference stencil would cross a non-periodic boundary."""


class SingularLawError(ValueError):
    """State density is zero (or below its floor) where a law needs 1/mu."""


class BoundaryError(RuntimeError):
    """A backward trajectory foot left the domain on a non-periodic axis."""


class SamplingError(RuntimeError):
    """Rejection sampling starved, or a proposal bound was violated."""


class NodeProximityError(RuntimeError):
    """Wavefunction amplitude at the query point is below the node floor."""


class ScenarioError(ValueError):
    """Scenario text failed validation; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PremiseViolationWarning(UserWarning):
    """Coarse cells are too large to capture the initial distribution."""


class DegradedRunWarning(UserWarning):
    """Run completed but diagnostics exceeded quality thresholds."""
