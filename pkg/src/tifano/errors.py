"""Exception and warning types shared across the package."""


class PhysicsError(ValueError):
    """A physical precondition failed (pole, invalid regime, inconsistent geometry)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class PhysicsWarning(UserWarning):
    """Advisory about the validity regime of an approximation."""
