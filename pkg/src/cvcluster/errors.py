"""Exception types raised across the package."""

import numpy as np


class CVClusterError(Exception):
    """Base class for all package errors."""


class ModeIndexError(CVClusterError, IndexError):
    pass


class NonUnitaryError(CVClusterError, ValueError):
    """Raised when a matrix that must be unitary is not.

    The offending deviation ``max |U^dagger U - I|`` is kept on ``residual``.
    """

    def __init__(self, residual, tol=None):
        self.residual = float(residual)
        msg = f"matrix is not unitary: max |U^dag U - I| = {self.residual:.3e}"
        if tol is not None:
            msg += f" (tolerance {tol:.1e})"
        super().__init__(msg)


class DegenerateMeasurementError(CVClusterError, ValueError):
    pass


class InvalidCircuitError(CVClusterError, ValueError):
    """A circuit violates the cluster-type cancellation conditions."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FactorizationError(CVClusterError, np.linalg.LinAlgError):
    """Gram matrix is not positive definite.

    ``minor`` is the 1-based size of the first leading minor that fails.
    """

    def __init__(self, minor, pivot):
        self.minor = minor
        self.pivot = float(pivot)
        super().__init__(
            f"matrix is not positive definite: leading minor {minor} has pivot {pivot:.3e}"
        )


class DecompositionError(CVClusterError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ProtocolError(CVClusterError, ValueError):
    pass
