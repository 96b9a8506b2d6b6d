"""Diamond-distance upper bounds, error budgets and query planning
"""
from __future__ import absolute_import, division, print_function

import logging
import math
from dataclasses import dataclass, asdict, fields

import numpy as np

from .base import BoundDomainError, DimensionError, DomainError, PlanningError
from .symplectic import SymplecticMatrix, operatorNorm

__all__ = ["SYM_VARIANTS", "DISP_VARIANTS", "displacementDiamondBound", "gFunction",
           "symplecticDiamondBound", "combinedBoundTerms", "combinedDiamondBound",
           "additiveToMultiplicative", "clampBound", "shotCount", "vacuumSharedShots", "symmetricShots",
           "regularizedVacuumSharedShots", "regularizedSymmetricShots", "tmsvShots", "singleModeShots",
           "plannedDisplacementShots", "singleModeSqueezing", "symplecticBudget", "displacementBudget",
           "QueryPlan", "planQueries"]

_log = logging.getLogger(__name__)

SYM_VARIANTS = ("vacuumShared", "symmetric")
DISP_VARIANTS = ("tmsv", "singleMode", "passive")


def displacementDiamondBound(r1, r2, nBar):
    """Bound on half the energy-constrained diamond distance of two displacements

    ``sin(min{(sqrt(nBar) + sqrt(nBar + 1)) / sqrt(2) * ||r1 - r2||, pi/2})``
    """
    if nBar < 0:
        raise DomainError("nBar must be non-negative; got {}".format(nBar))
    dist = float(np.linalg.norm(np.asarray(r1, dtype=float) - np.asarray(r2, dtype=float)))
    arg = (math.sqrt(nBar) + math.sqrt(nBar + 1.0))/math.sqrt(2.0)*dist
    return math.sin(min(arg, math.pi/2))


def gFunction(x):
    return math.sqrt(math.pi/(x + 1.0)) + math.sqrt(2.0*x)


def symplecticDiamondBound(S1, S2, nBar):
    """Bound on half the energy-constrained diamond distance of ``U_S1`` and ``U_S2``

    ``sqrt((sqrt(6) + sqrt(10) + 5 sqrt(2m)) (nBar + 1)) g(||X||) sqrt(||X - 1||_2)``
    with ``X = S2^{-1} S1``; ``||.||_2`` is the Frobenius norm and ``||.||``
    the operator norm.
    """
    S1 = S1 if isinstance(S1, SymplecticMatrix) else SymplecticMatrix(S1)
    S2 = S2 if isinstance(S2, SymplecticMatrix) else SymplecticMatrix(S2)
    if S1.m != S2.m:
        raise DimensionError("S1 has {} modes but S2 has {}".format(S1.m, S2.m))
    if np.array_equal(S1.data, S2.data):
        return 0.0
    m = S1.m
    rel = S2.inverted().data @ S1.data
    frob = float(np.linalg.norm(rel - np.eye(2*m), "fro"))
    const = math.sqrt(6.0) + math.sqrt(10.0) + 5.0*math.sqrt(2.0*m)
    return math.sqrt(const*(nBar + 1.0))*gFunction(operatorNorm(rel))*math.sqrt(frob)


def combinedBoundTerms(epsS, epsR, m, z, nBar):
    """Symplectic and displacement terms of the combined diamond bound

    The symplectic term ``6 sqrt(9 sqrt(2m)(nBar + 1)) sqrt(z sqrt(2m) epsS)``
    bounds half the diamond distance of the symplectic parts (it is half of
    the bound on the full distance); the displacement term
    ``sqrt(2) sqrt(z^2 nBar + 1) epsR`` bounds half the distance of the
    displacements at the energy ``z^2 nBar`` reachable after ``U_S``.

    Raises
    ------
    BoundDomainError
        If ``z * epsS >= 1/2``.
    """
    if epsS < 0 or epsR < 0:
        raise BoundDomainError("errors must be non-negative; got epsS={}, epsR={}".format(epsS, epsR))
    if not z*epsS < 0.5:
        raise BoundDomainError("combined bound needs z*epsS < 1/2; got {:.6g}".format(z*epsS))
    root2m = math.sqrt(2.0*m)
    symTerm = 6.0*math.sqrt(9.0*root2m*(nBar + 1.0))*math.sqrt(z*root2m*epsS)
    dispTerm = math.sqrt(2.0)*math.sqrt(z*z*nBar + 1.0)*epsR
    return symTerm, dispTerm


def combinedDiamondBound(epsS, epsR, m, z, nBar, form="proof"):
    """Bound on half the diamond distance of two Gaussian unitaries

    Parameters
    ----------
    epsS : `float`
        Operator-norm error of the symplectic part.
    epsR : `float`
        Euclidean error of the displacement.
    m : `int`
        Number of modes.
    z : `float`
        Bound on the operator norm of the true symplectic part.
    nBar : `float`
        Energy constraint of the diamond norm.
    form : `str`
        ``"proof"`` (default) adds the two terms of `combinedBoundTerms` and
        equals epsilon exactly at the planner's error budgets.
        ``"statement"`` uses twice the symplectic term; it is a valid but
        looser bound that exceeds epsilon at those budgets.

    Raises
    ------
    BoundDomainError
        If ``z * epsS >= 1/2``.
    """
    symTerm, dispTerm = combinedBoundTerms(epsS, epsR, m, z, nBar)
    if form == "proof":
        return symTerm + dispTerm
    elif form == "statement":
        return 2.0*symTerm + dispTerm
    raise DomainError("form must be 'proof' or 'statement'; got {!r}".format(form))


def additiveToMultiplicative(epsS, z, exact=False):
    """Bound ``||sTilde^{-1} S - 1||`` given ``||sTilde - S|| <= epsS`` and ``||S|| <= z``

    Returns ``2 z epsS`` (requires ``z epsS < 1/2``), or with exact=True
    ``z epsS / (1 - z epsS)`` (requires ``z epsS < 1``).
    """
    prod = z*epsS
    if exact:
        if not prod < 1.0:
            raise BoundDomainError("exact form needs z*epsS < 1; got {:.6g}".format(prod))
        return prod/(1.0 - prod)
    if not prod < 0.5:
        raise BoundDomainError("z*epsS must be below 1/2; got {:.6g}".format(prod))
    return 2.0*prod


def clampBound(value):
    """Clamp a distance bound to the trivial bound 1 for reporting"""
    return min(float(value), 1.0)


def shotCount(bound):
    """Smallest integer shot count satisfying a lower bound, at least 1"""
    return max(1, int(math.ceil(bound)))


def vacuumSharedShots(m, sNorm, eta, eps, delta):
    """Shots per probe for the vacuum-shared estimator to reach eps with probability 1 - delta"""
    tail = math.sqrt(2.0*m) + math.sqrt(2.0*math.log(2.0*m/delta))
    return 4.0*m*sNorm**2*tail**2/(eta**2*eps**2)


def symmetricShots(m, sNorm, eta, eps, delta):
    tail = 2.0*math.sqrt(2.0*m) + math.sqrt(2.0*math.log(1.0/delta))
    return sNorm**2*tail**2/(2.0*eta**2*eps**2)


def regularizedVacuumSharedShots(m, z, eta, tau, delta):
    tail = math.sqrt(2.0*m) + math.sqrt(2.0*math.log(2.0*m/delta))
    return 324.0*m*z**6*tail**2/(eta**2*tau**2)


def regularizedSymmetricShots(m, z, eta, tau, delta):
    tail = 2.0*math.sqrt(2.0*m) + math.sqrt(2.0*math.log(1.0/delta))
    return 81.0*z**6*tail**2/(2.0*eta**2*tau**2)


def tmsvShots(m, nu, deltaNorm, eps, delta):
    """Repetitions for the TMSV displacement learner with mismatch ``||Delta|| = deltaNorm``"""
    tail = math.sqrt(2.0*m) + math.sqrt(2.0*math.log(1.0/delta))
    growth = 1.0 + nu*deltaNorm + 1.5*(nu*deltaNorm)**2
    return growth*tail**2/(nu*eps**2)


def singleModeShots(m, zIn, deltaNorm, eps, delta):
    """Repetitions per quadrature pass for the single-mode squeezed displacement learner"""
    tail = math.sqrt(2.0*m) + math.sqrt(2.0*math.log(2.0/delta))
    noise = (1.0 + deltaNorm)**2/zIn + zIn*deltaNorm**2
    return 2.0*tail**2/eps**2*noise


def plannedDisplacementShots(m, nu, z, epsS, epsR, delta):
    """Repetitions of the TMSV learner when ``||Delta||`` is only known to be at most ``2 z epsS``"""
    tail = math.sqrt(2.0*m) + math.sqrt(math.log(2.0/delta))
    mix = nu*z*epsS
    return (1.0 + 2.0*mix + 6.0*mix**2)*tail**2/(nu*epsR**2)


def singleModeSqueezing(m, nBarIn):
    """Probe squeezing for the single-mode learner: ``sqrt(nBarIn)``, capped by the budget

    The cap is the largest z with ``m (z + 1/z - 2)/4 <= nBarIn``.
    """
    c = 2.0 + 4.0*nBarIn/m
    cap = 0.5*(c + math.sqrt(c*c - 4.0))
    return max(1.0, min(math.sqrt(nBarIn), cap))


def symplecticBudget(m, z, nBar, nBarIn, epsilon):
    return epsilon**2/(2592.0*m*z*(nBar + 1.0)*(nBarIn + 1.0)**0.25)


def displacementBudget(z, nBar, epsilon):
    return epsilon/(2.0*math.sqrt(2.0)*math.sqrt(z*z*nBar + 1.0))


@dataclass(frozen=True)
class QueryPlan:
    """Parameters and shot counts of one run of the learning algorithm

    ``nTot`` is ``(2m + 1) nS`` (vacuum-shared) or ``4m nS`` (symmetric),
    plus ``nR`` (TMSV or passive) or ``2 nR`` (single-mode).
    """
    m: int
    z: float
    nBar: float
    nBarIn: float
    epsilon: float
    delta: float
    eta: float
    nu: float
    epsS: float
    epsR: float
    nS: int
    nR: int
    nTot: int
    symVariant: str = "vacuumShared"
    dispVariant: str = "tmsv"
    zIn: float = None

    @property
    def symplecticQueries(self):
        return (2*self.m + 1)*self.nS if self.symVariant == "vacuumShared" else 4*self.m*self.nS

    @property
    def displacementQueries(self):
        return 2*self.nR if self.dispVariant == "singleMode" else self.nR

    def toDict(self):
        return asdict(self)

    @classmethod
    def fromDict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise PlanningError("unknown plan fields: {}".format(sorted(unknown)))
        return cls(**data)


def _checkPositive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise PlanningError("{} must be positive and finite; got {}".format(name, value))


def planQueries(m, z, nBar, nBarIn, epsilon, delta, symVariant="vacuumShared", dispVariant="tmsv"):
    """Choose probe energies, error budgets and shot counts

    Uses ``eta = sqrt(nBarIn)``, ``nu = nBarIn^(1/4) + 1``, the symplectic
    budget ``epsilon^2 / (2592 m z (nBar + 1)(nBarIn + 1)^(1/4))`` and the
    displacement budget ``epsilon / (2 sqrt(2) sqrt(z^2 nBar + 1))``; shot
    counts are the ceilings of the corresponding sufficient lower bounds.

    Raises
    ------
    PlanningError
        If a parameter is out of range, ``nBarIn < (2m)^(4/3)`` or a variant
        is unknown.
    """
    if int(m) != m or m < 1:
        raise PlanningError("m must be a positive integer; got {}".format(m))
    m = int(m)
    for name, value in (("z", z), ("nBar", nBar), ("nBarIn", nBarIn)):
        _checkPositive(name, value)
    if z < 1:
        raise PlanningError("z must be at least 1; got {}".format(z))
    for name, value in (("epsilon", epsilon), ("delta", delta)):
        if not 0 < value < 1:
            raise PlanningError("{} must lie in (0, 1); got {}".format(name, value))
    if symVariant not in SYM_VARIANTS:
        raise PlanningError("unknown symplectic variant {!r}".format(symVariant))
    if dispVariant not in DISP_VARIANTS:
        raise PlanningError("unknown displacement variant {!r}".format(dispVariant))
    if nBarIn < (2.0*m)**(4.0/3.0):
        raise PlanningError("nBarIn = {:.6g} is below (2m)^(4/3) = {:.6g}".format(nBarIn, (2.0*m)**(4.0/3.0)))

    eta = math.sqrt(nBarIn)
    nu = nBarIn**0.25 + 1.0
    if nu > (1.0 + nBarIn/(2.0*m))*(1.0 + 1e-12):
        raise PlanningError("nu = {:.6g} exceeds the TMSV energy limit".format(nu))
    epsS = symplecticBudget(m, z, nBar, nBarIn, epsilon)
    epsR = displacementBudget(z, nBar, epsilon)

    if symVariant == "vacuumShared":
        nS = shotCount(regularizedVacuumSharedShots(m, z, eta, epsS, delta))
    else:
        nS = shotCount(regularizedSymmetricShots(m, z, eta, epsS, delta))

    zIn = None
    if dispVariant == "singleMode":
        zIn = singleModeSqueezing(m, nBarIn)
        nR = shotCount(singleModeShots(m, zIn, 2.0*z*epsS, epsR, delta))
    else:
        nR = shotCount(plannedDisplacementShots(m, nu, z, epsS, epsR, delta))

    plan = QueryPlan(m=m, z=float(z), nBar=float(nBar), nBarIn=float(nBarIn), epsilon=float(epsilon),
                     delta=float(delta), eta=eta, nu=nu, epsS=epsS, epsR=epsR, nS=nS, nR=nR, nTot=0,
                     symVariant=symVariant, dispVariant=dispVariant, zIn=zIn)
    plan = QueryPlan(**dict(plan.toDict(), nTot=plan.symplecticQueries + plan.displacementQueries))
    _log.info("planned nS=%d nR=%d nTot=%d (eta=%.6g, nu=%.6g)", plan.nS, plan.nR, plan.nTot, eta, nu)
    return plan
