"""Exception types raised across the package."""


class HomogenizationError(Exception):
    """Base class for every error raised by this package."""


class AliasError(HomogenizationError, ValueError):
    """Requested resolution cannot represent the field without aliasing."""


class CanonicalError(HomogenizationError, ValueError):
    """A wave term cannot be put in canonical form (e.g. sin with k = 0)."""


class EllipticityError(HomogenizationError, ValueError):
    """A coefficient field is not uniformly positive definite."""


class PositivityError(HomogenizationError, ValueError):
    """A quantity that must stay positive (density, scaling factor) does not."""


class ConvergenceError(HomogenizationError, RuntimeError):
    """An iterative solver missed its residual target."""


class CompatibilityError(HomogenizationError, ValueError):
    """A right-hand side violates the solvability condition.

    Attributes
    ----------
    defect : float
        Size of the violation, ``|integral of r * rhs|``.
    """

    def __init__(self, message, defect=float("nan")):
        super().__init__(message)
        self.defect = float(defect)


class DomainError(HomogenizationError, ValueError):
    """Input lies outside the domain where a construction is defined."""


class DegenerateError(HomogenizationError, ValueError):
    """A construction would produce a trivial (unperturbed) output."""


class TraceError(HomogenizationError, ValueError):
    """The trace constant is too small for a positive lifted entry."""


class UnknownName(HomogenizationError, KeyError):
    """Lookup of an unregistered gallery entry, suite or preset."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SingularSystemError(HomogenizationError, RuntimeError):
    """A finite-difference system could not be factorized."""
