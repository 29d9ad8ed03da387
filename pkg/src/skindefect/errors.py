"""Exception hierarchy shared by every module."""


class SkinDefectError(Exception):
    """Base class for all package errors."""


class SpecificationError(SkinDefectError, ValueError):
    """Ill-formed lattice, parameter record or operator."""


class SolverError(SkinDefectError, ArithmeticError):
    """Dense eigensolver failed to converge or to meet its residual bound."""

    def __init__(self, message, dimension=None, iterations=None):
        super().__init__(message)
        self.dimension = dimension
        self.iterations = iterations


class ResolutionError(SkinDefectError, ArithmeticError):
    """Twist-angle grid too coarse even after refinement."""

    def __init__(self, message, phi=None):
        super().__init__(message)
        self.phi = phi


class BandMatchingError(ResolutionError):
    """Eigenvalues of consecutive twist slices could not be paired uniquely."""


class ConfigError(SkinDefectError, ValueError):
    """Invalid run configuration file."""
