"""Exception and warning types raised by qvbs."""


class AnalyticMismatchError(ArithmeticError):
    """An analytic eigenpair failed its numerical residual check."""


class NegativeEigenvalueError(ValueError):
    """A density-matrix eigenvalue is more negative than round-off allows."""


class NotHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class SizeLimitError(ValueError):
    """Requested brute-force object exceeds the desk-scale guard."""


class ValidityWarning(UserWarning):
    """An asymptotic or perturbative formula is used outside its regime."""
