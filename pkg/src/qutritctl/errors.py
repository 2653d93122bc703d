"""Exception types shared across the package."""


class QutritctlError(Exception):
    """Base class for package-specific failures."""


class SolverError(QutritctlError):
    """A root finder, quadrature, or optimizer failed to converge."""


class FitError(QutritctlError):
    """A least-squares fit failed or the data are degenerate."""
