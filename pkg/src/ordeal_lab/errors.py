"""Exception types shared across the package.

``ValidationError`` covers malformed inputs (bad parameters, broken files);
the CLI maps it to exit code 1.  ``SolverError`` covers well-formed problems
the solvers could not finish (non-convergence, infeasible configurations);
the CLI maps it to exit code 2.
"""


class OrdealLabError(Exception):
    """Base class for all package errors."""


class ValidationError(OrdealLabError, ValueError):
    """Malformed input.  ``field`` names the offending parameter when known."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class DomainError(ValidationError):
    """A point or parameter lies outside the unit square / allowed range."""


class BoundaryError(ValidationError):
    """A boundary curve violates its shape constraints."""


class ConvexityError(ValidationError):
    """A piecewise-linear function is not convex within tolerance."""


class DegenerateMechanismError(ValidationError):
    """A mechanism leaves one good without any chooser."""


class ScenarioError(ValidationError):
    """A scenario file is malformed."""


class SolverError(OrdealLabError, RuntimeError):
    """A solver failed on a well-formed problem."""


class NonConvergenceError(SolverError):
    """Iteration budget exhausted before reaching tolerance."""


class InfeasiblePairError(SolverError):
    """No utility pair satisfies the coupling constraints for this boundary."""


class InfeasibleSlopeError(SolverError):
    """No supply-preserving boundary exists for the requested slope."""


class SteadyStateError(SolverError):
    """A waitlist configuration has no steady state."""
