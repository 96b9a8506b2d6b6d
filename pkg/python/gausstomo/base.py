from __future__ import absolute_import, division, print_function

__all__ = ["SYMPLECTIC_TOL", "SQRT_TOL", "SQRT_MAX_ITER", "UNCERTAINTY_TOL",
           "GaussTomoError", "DimensionError", "DomainError", "RegularizationDomainError",
           "BoundDomainError", "ConvergenceError", "DecompositionError", "NumericError",
           "EnergyConstraintError", "PlanningError", "ConfigError", "ReportError"]

SYMPLECTIC_TOL = 1e-10
SQRT_TOL = 1e-12
SQRT_MAX_ITER = 100
UNCERTAINTY_TOL = 1e-8


class GaussTomoError(Exception):
    """Base class for all gausstomo errors

    ``code`` is a stable short name recorded as the failure code of a trial.
    """
    code = "error"


class DimensionError(GaussTomoError, ValueError):
    """Array shapes or mode counts are inconsistent"""
    code = "dimension"


class DomainError(GaussTomoError, ValueError):
    """An argument lies outside the domain of a function"""
    code = "domain"


class RegularizationDomainError(DomainError):
    """The estimate is too far from the symplectic group to be regularized

    Raised when ``||T - 1|| >= 1/2`` for ``T = -Omega S_hat^T Omega S_hat``.
    """
    code = "regularizationDomain"


class BoundDomainError(DomainError):
    """The precondition of an error bound is violated"""
    code = "boundDomain"


class ConvergenceError(GaussTomoError, RuntimeError):
    code = "convergence"


class DecompositionError(GaussTomoError, RuntimeError):
    code = "decomposition"


class NumericError(GaussTomoError, RuntimeError):
    """A factorization failed, even after regularization"""
    code = "numeric"


class EnergyConstraintError(GaussTomoError, RuntimeError):
    """A query would exceed the input photon budget of an oracle"""
    code = "energyConstraint"


class PlanningError(GaussTomoError, ValueError):
    """Protocol parameters cannot satisfy the planning constraints"""
    code = "planning"


class ConfigError(GaussTomoError, ValueError):
    code = "config"


class ReportError(GaussTomoError, RuntimeError):
    """A persisted report is missing or unreadable"""
    code = "report"
