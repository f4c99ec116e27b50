class ModelError(ValueError):
    """Base class for invalid inputs to the model."""


class DomainError(ModelError):
    """Argument outside the domain of a function."""


class UnsupportedCaseError(ModelError):
    """Parameters outside the case the operation is defined for."""


class DegenerateModelError(ModelError):
    """The largest eigenvalue of the reduced interaction matrix vanishes."""


class CurieWeissDegenerationError(ModelError):
    """Zero inter-population coupling: two decoupled Curie-Weiss models."""


class NoPositiveRootError(ModelError):
    """The scalar equation has no positive root for these parameters."""


class RegimeError(ModelError):
    """Operation called outside the regime it applies to."""


class NotCriticalPointError(ModelError):
    """The point does not solve the mean-field equations."""


class UnclassifiableDegenerateError(RuntimeError):
    """Vanishing Hessian determinant outside the known degenerate cases."""


class SolverFailure(RuntimeError):
    """A numerical solver did not converge.

    ``branch`` names the family of critical points being computed, if any.
    """

    def __init__(self, message, branch=None):
        super().__init__(message if branch is None else f"{branch}: {message}")
        self.branch = branch


class ResourceError(RuntimeError):
    """Requested system size exceeds the configured cap."""
