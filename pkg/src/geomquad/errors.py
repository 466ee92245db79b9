"""Exception types shared across the package."""


class GeomQuadError(Exception):
    """Base class for all package errors."""


class NotSkewSymmetric(GeomQuadError):
    """vee() received a matrix whose symmetric part is too large."""


class NotARotation(GeomQuadError):
    """Matrix failed the orthogonality / determinant check."""


class SingularInput(GeomQuadError):
    """orthonormalize() received a matrix with non-positive determinant."""


class DegenerateProjection(GeomQuadError):
    """Heading target nearly parallel to the commanded thrust axis."""


class SingularMixing(GeomQuadError):
    """Mixing matrix not invertible (d or c_tau_f near zero)."""


class ThrustSingularity(GeomQuadError):
    """Altitude-thrust denominator e3 . R e3 is too close to zero."""


class ThrustVectorSingularity(GeomQuadError):
    """Computed thrust direction undefined (||A|| below threshold)."""


class OutOfWindow(GeomQuadError):
    """Command evaluated outside its segment's time window."""


class SimulationAbort(GeomQuadError):
    """Simulation stopped on a controller singularity or non-finite state."""

    def __init__(self, message: str, t: float):
        super().__init__(f"t={t:.6f}: {message}")
        self.t = t


class ParseError(GeomQuadError):
    """Scenario config text could not be parsed."""


class ValidationError(GeomQuadError):
    """Scenario config parsed but violates a type invariant."""


class FitFailed(GeomQuadError):
    """Exponential envelope fit impossible for the given series."""


class InfeasibleInputs(GeomQuadError):
    """Certificate search called with non-positive psi1 / e_x_max / B."""


class SchemaMismatch(GeomQuadError):
    """CSV file does not match the trace schema."""
