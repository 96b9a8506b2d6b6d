"""Query-counting oracle and the learners for Gaussian unitaries
"""
from __future__ import absolute_import, division, print_function

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .base import (SYMPLECTIC_TOL, SQRT_TOL, SQRT_MAX_ITER, GaussTomoError, DimensionError, DomainError,
                   EnergyConstraintError)
from .bounds import (SYM_VARIANTS, combinedDiamondBound, combinedBoundTerms, displacementDiamondBound,
                     symplecticDiamondBound, regularizedVacuumSharedShots, regularizedSymmetricShots,
                     shotCount)
from .measurement import (GaussianSampler, childSeed, makeRng, heterodyneMoments, homodyneMoments,
                          marginal, passiveHeterodyneMoments)
from .phaseSpace import (GaussianUnitary, coherent, vacuum, tmsv, tmsvSymplectic, singleModeSqueezed,
                         probePhotonNumber, meanPhotonNumber, passivePreparation)
from .symplectic import SymplecticMatrix, operatorNorm, regularize

__all__ = ["ACCOUNTING_MODES", "UnitaryOracle", "oracleQuery", "SymplecticEstimate", "DisplacementEstimate",
           "TrialReport", "learnSymplecticVacuumShared", "learnSymplecticSymmetric",
           "learnSymplecticRegularized", "learnDisplacementTmsv", "learnDisplacementPassive",
           "learnDisplacementSingleMode", "learnUnitary", "separateBoundTerms"]

_log = logging.getLogger(__name__)

ACCOUNTING_MODES = ("paper", "strict")

# relative slack on the photon budget, so that eta = sqrt(nBarIn) is admissible
_BUDGET_SLACK = 1e-12


class UnitaryOracle(object):
    """Black-box access to a hidden Gaussian unitary

    Parameters
    ----------
    hidden : `GaussianUnitary`
        The unitary to be learned.
    nBarIn : `float`
        Photon budget of each query's input.
    accounting : `str`
        ``"paper"`` charges the canonical probe passed with the query (the
        input itself if no probe is passed); ``"strict"`` charges the actual
        input with `meanPhotonNumber`. The probe is charged with
        `probePhotonNumber`, the unit of the query planner.
    """

    def __init__(self, hidden, nBarIn, accounting="paper"):
        if accounting not in ACCOUNTING_MODES:
            raise DomainError("accounting must be one of {}; got {!r}".format(ACCOUNTING_MODES, accounting))
        if not nBarIn > 0:
            raise DomainError("nBarIn must be positive; got {}".format(nBarIn))
        self._hidden = hidden
        self._nBarIn = float(nBarIn)
        self._accounting = accounting
        self._queryCount = 0

    @property
    def m(self):
        return self._hidden.m

    @property
    def nBarIn(self):
        return self._nBarIn

    @property
    def accounting(self):
        return self._accounting

    @property
    def queryCount(self):
        return self._queryCount

    @property
    def groundTruth(self):
        """The hidden unitary; only for scoring simulated runs"""
        return self._hidden

    def charge(self, state, probe=None):
        """Return the photon number charged for a query"""
        if self._accounting == "paper" and probe is not None:
            return probePhotonNumber(probe)
        if self._accounting == "strict":
            return meanPhotonNumber(state)
        return probePhotonNumber(state)

    def query(self, state, probe=None, copies=1):
        """Apply the hidden unitary to the first m modes of state

        Parameters
        ----------
        state : `GaussianState`
            Oracle input on n >= m modes.
        probe : `GaussianState`, optional
            Canonical probe the input was prepared from, charged under
            paper accounting.
        copies : `int`
            Number of identical queries; the output is the state of one copy.

        Raises
        ------
        EnergyConstraintError
            If the charged photon number exceeds the budget; nothing is counted.
        """
        if state.n < self.m:
            raise DimensionError("{}-mode input to a {}-mode oracle".format(state.n, self.m))
        if int(copies) != copies or copies < 1:
            raise DomainError("copies must be a positive integer; got {}".format(copies))
        charged = self.charge(state, probe)
        if charged > self._nBarIn*(1.0 + _BUDGET_SLACK):
            raise EnergyConstraintError("input carries {:.6g} photons; budget is {:.6g}".format(
                charged, self._nBarIn))
        output = self._hidden.embedded(state.n).applyForward(state)
        self._queryCount += int(copies)
        return output


def oracleQuery(oracle, state, extendedModes):
    if state.n != extendedModes:
        raise DimensionError("input has {} modes, expected {}".format(state.n, extendedModes))
    return oracle.query(state)


@dataclass(frozen=True)
class SymplecticEstimate:
    sHat: np.ndarray
    sTilde: SymplecticMatrix
    epsBudget: float
    queriesUsed: int
    nS: int


@dataclass(frozen=True)
class DisplacementEstimate:
    rTilde: np.ndarray
    epsBudget: float
    queriesUsed: int


def _sampler(sampler):
    return GaussianSampler() if sampler is None else sampler


def _checkShots(eta, nS):
    if not eta > 0:
        raise DomainError("eta must be positive; got {}".format(eta))
    if int(nS) != nS or nS < 1:
        raise DomainError("shot count must be a positive integer; got {}".format(nS))


def _heterodyneMean(oracle, state, probe, count, sampler, rng):
    output = oracle.query(state, probe=probe, copies=count)
    mean, cov = heterodyneMoments(output)
    return sampler.sampleMean(mean, cov, count, rng)


def learnSymplecticVacuumShared(oracle, eta, nS, seed, sampler=None):
    """Estimate the symplectic part from vacuum and coherent probes

    Probes the vacuum and ``|eta e_i>`` for each of the 2m phase-space
    directions with nS heterodyne shots each; column i of the estimate is
    ``(Ybar_i - Ybar_0) / eta``. Uses ``(2m + 1) nS`` queries.

    Returns
    -------
    sHat : `numpy.ndarray`
    """
    _checkShots(eta, nS)
    sampler = _sampler(sampler)
    dim = 2*oracle.m
    baseline = _heterodyneMean(oracle, vacuum(oracle.m), None, nS, sampler, makeRng(seed, 0))
    sHat = np.empty((dim, dim))
    for i in range(dim):
        probe = coherent(eta*np.eye(dim)[i])
        sHat[:, i] = (_heterodyneMean(oracle, probe, None, nS, sampler, makeRng(seed, i + 1)) - baseline)/eta
    return sHat


def learnSymplecticSymmetric(oracle, eta, nS, seed, sampler=None):
    """Estimate the symplectic part from antipodal coherent probes

    Column i is ``(Ybar_i^+ - Ybar_i^-) / (2 eta)`` with probes
    ``|+eta e_i>`` and ``|-eta e_i>``; columns are independent and the
    displacement cancels. Uses ``4m nS`` queries.
    """
    _checkShots(eta, nS)
    sampler = _sampler(sampler)
    dim = 2*oracle.m
    sHat = np.empty((dim, dim))
    for i in range(dim):
        unit = np.eye(dim)[i]
        plus = _heterodyneMean(oracle, coherent(eta*unit), None, nS, sampler, makeRng(seed, 2*i + 1))
        minus = _heterodyneMean(oracle, coherent(-eta*unit), None, nS, sampler, makeRng(seed, 2*i + 2))
        sHat[:, i] = (plus - minus)/(2.0*eta)
    return sHat


def learnSymplecticRegularized(oracle, variant, eta, tau, delta, z, seed, nS=None, sampler=None,
                               tol=SYMPLECTIC_TOL, sqrtTol=SQRT_TOL, maxIter=SQRT_MAX_ITER):
    """Estimate the symplectic part and round it to the symplectic group

    Parameters
    ----------
    oracle : `UnitaryOracle`
    variant : `str`
        ``"vacuumShared"`` or ``"symmetric"``.
    eta : `float`
        Coherent probe amplitude.
    tau : `float`
        Target operator-norm error of the regularized estimate.
    delta : `float`
        Failure probability.
    z : `float`
        Known bound on the operator norm of the hidden symplectic part.
    seed : `int` or `numpy.random.SeedSequence`
    nS : `int`, optional
        Shots per probe; by default the smallest count guaranteeing error
        tau with probability 1 - delta.

    Returns
    -------
    estimate : `SymplecticEstimate`

    Raises
    ------
    RegularizationDomainError
        If the raw estimate is too far from the symplectic group.
    """
    if variant not in SYM_VARIANTS:
        raise DomainError("unknown symplectic variant {!r}".format(variant))
    if not 0 < tau < 1:
        raise DomainError("tau must lie in (0, 1); got {}".format(tau))
    m = oracle.m
    if nS is None:
        if variant == "vacuumShared":
            nS = shotCount(regularizedVacuumSharedShots(m, z, eta, tau, delta))
        else:
            nS = shotCount(regularizedSymmetricShots(m, z, eta, tau, delta))
    before = oracle.queryCount
    if variant == "vacuumShared":
        sHat = learnSymplecticVacuumShared(oracle, eta, nS, seed, sampler=sampler)
    else:
        sHat = learnSymplecticSymmetric(oracle, eta, nS, seed, sampler=sampler)
    sTilde = regularize(sHat, tol=tol, sqrtTol=sqrtTol, maxIter=maxIter)
    return SymplecticEstimate(sHat=sHat, sTilde=sTilde, epsBudget=tau,
                              queriesUsed=oracle.queryCount - before, nS=int(nS))


def _checkRepetitions(oracle, sTilde, nR):
    sTilde = sTilde if isinstance(sTilde, SymplecticMatrix) else SymplecticMatrix(sTilde)
    if sTilde.m != oracle.m:
        raise DimensionError("{}-mode estimate for a {}-mode oracle".format(sTilde.m, oracle.m))
    if int(nR) != nR or nR < 1:
        raise DomainError("repetition count must be a positive integer; got {}".format(nR))
    return sTilde


def learnDisplacementTmsv(oracle, sTilde, nu, nR, seed, sampler=None, epsBudget=None):
    """Estimate the displacement with two-mode squeezed probes

    Each repetition prepares m two-mode squeezed vacua, applies
    ``sTilde^{-1}`` to the signal modes, queries the oracle on the signal
    modes, undoes the squeezing and heterodynes the signal modes. The
    estimate is the sample mean divided by ``sqrt(nu)``. Uses nR queries.
    """
    sTilde = _checkRepetitions(oracle, sTilde, nR)
    sampler = _sampler(sampler)
    m = oracle.m
    probe = tmsv(nu, m)
    pre = GaussianUnitary(np.zeros(2*m), sTilde.inverted()).embedded(2*m)
    output = oracle.query(pre.applyForward(probe), probe=probe, copies=nR)
    unsqueeze = GaussianUnitary(np.zeros(4*m), tmsvSymplectic(nu, m, inverse=True))
    signal = marginal(unsqueeze.applyForward(output), range(m))
    mean, cov = heterodyneMoments(signal)
    mu = sampler.sampleMean(mean, cov, nR, makeRng(seed, 0))
    return DisplacementEstimate(rTilde=mu/np.sqrt(nu), epsBudget=epsBudget, queriesUsed=int(nR))


def learnDisplacementPassive(oracle, sTilde, nu, nR, seed, sampler=None, epsBudget=None):
    """TMSV displacement learner using only squeezed vacua, passive optics and homodyne

    The probe ``U_{sTilde^{-1}} |nu>`` is prepared from single-mode squeezed
    vacua and an interferometer, and the final unsqueeze-and-heterodyne is
    realized by the passive heterodyne scheme. Same output law and query
    count as `learnDisplacementTmsv`.
    """
    sTilde = _checkRepetitions(oracle, sTilde, nR)
    sampler = _sampler(sampler)
    m = oracle.m
    pre = GaussianUnitary(np.zeros(2*m), sTilde.inverted()).embedded(2*m)
    prep = passivePreparation(tmsvSymplectic(nu, m).then(pre.S))
    output = oracle.query(prep.prepared(), probe=tmsv(nu, m), copies=nR)
    mean, cov = passiveHeterodyneMoments(output, tmsvSymplectic(nu, m, inverse=True))
    mu = sampler.sampleMean(mean[:2*m], cov[:2*m, :2*m], nR, makeRng(seed, 0))
    return DisplacementEstimate(rTilde=mu/np.sqrt(nu), epsBudget=epsBudget, queriesUsed=int(nR))


def learnDisplacementSingleMode(oracle, sTilde, zIn, nR, seed, sampler=None, epsBudget=None):
    """Estimate the displacement with single-mode squeezed probes

    The momentum pass sends ``U_{sTilde^{-1}}`` applied to momentum-squeezed
    vacua and homodynes momentum; the position pass uses position-squeezed
    vacua and homodynes position. Uses 2 nR queries.
    """
    sTilde = _checkRepetitions(oracle, sTilde, nR)
    sampler = _sampler(sampler)
    m = oracle.m
    pre = GaussianUnitary(np.zeros(2*m), sTilde.inverted())
    rTilde = np.empty(2*m)
    for stream, (orientation, quadrature, offset) in enumerate((("momentum", "momentum", 1),
                                                                ("position", "position", 0))):
        probe = singleModeSqueezed(zIn, m, orientation)
        output = oracle.query(pre.applyForward(probe), probe=probe, copies=nR)
        mean, cov = homodyneMoments(output, quadrature)
        rTilde[offset::2] = sampler.sampleMean(mean, cov, nR, makeRng(seed, stream))
    return DisplacementEstimate(rTilde=rTilde, epsBudget=epsBudget, queriesUsed=2*int(nR))


@dataclass
class TrialReport:
    """Outcome of one run of `learnUnitary` against a known ground truth

    ``success`` is the default criterion: the run finished and the combined
    diamond bound at the true errors is at most epsilon.
    """
    trialIndex: int = 0
    seed: list = field(default_factory=list)
    failure: str = None
    failureMessage: str = None
    epsS: float = None
    epsR: float = None
    epsSBudget: float = None
    epsRBudget: float = None
    combinedBound: float = None
    symplecticTerm: float = None
    displacementTerm: float = None
    deltaNorm: float = None
    deltaNormInverse: float = None
    success: bool = False
    successSymplectic: bool = False
    successDisplacement: bool = False
    queriesSymplectic: int = 0
    queriesDisplacement: int = 0
    queriesTotal: int = 0
    plannedTotal: int = 0
    rTilde: list = None
    sTilde: list = None
    wallTime: float = 0.0

    def toDict(self):
        return dict(self.__dict__)

    @classmethod
    def fromDict(cls, data):
        return cls(**data)


def learnUnitary(oracle, plan, seed, sampler=None, tol=SYMPLECTIC_TOL, sqrtTol=SQRT_TOL,
                 maxIter=SQRT_MAX_ITER):
    """Learn the hidden unitary with the protocols and shot counts of a plan

    Runs the regularized symplectic learner with ``tau = plan.epsS``, then the
    planned displacement learner using the regularized estimate. Stage errors
    are recorded in the report, not raised.

    Parameters
    ----------
    oracle : `UnitaryOracle`
    plan : `QueryPlan`
    seed : `int` or `numpy.random.SeedSequence`
        Stage 0 (symplectic) and stage 1 (displacement) use the child
        streams ``(seed, 0)`` and ``(seed, 1)``.
    sampler : optional
        `GaussianSampler` (default) or `ExactSampler`.

    Returns
    -------
    displacement : `DisplacementEstimate` or None
    symplectic : `SymplecticEstimate` or None
    report : `TrialReport`
    """
    if plan.m != oracle.m:
        raise DimensionError("plan for {} modes, oracle has {}".format(plan.m, oracle.m))
    start = time.perf_counter()
    report = TrialReport(epsSBudget=plan.epsS, epsRBudget=plan.epsR, plannedTotal=plan.nTot)
    symEst = dispEst = None
    before = oracle.queryCount
    try:
        symEst = learnSymplecticRegularized(oracle, plan.symVariant, plan.eta, plan.epsS, plan.delta, plan.z,
                                            childSeed(seed, 0), nS=plan.nS, sampler=sampler, tol=tol,
                                            sqrtTol=sqrtTol, maxIter=maxIter)
        report.queriesSymplectic = symEst.queriesUsed
        dispSeed = childSeed(seed, 1)
        if plan.dispVariant == "tmsv":
            dispEst = learnDisplacementTmsv(oracle, symEst.sTilde, plan.nu, plan.nR, dispSeed,
                                            sampler=sampler, epsBudget=plan.epsR)
        elif plan.dispVariant == "passive":
            dispEst = learnDisplacementPassive(oracle, symEst.sTilde, plan.nu, plan.nR, dispSeed,
                                               sampler=sampler, epsBudget=plan.epsR)
        else:
            dispEst = learnDisplacementSingleMode(oracle, symEst.sTilde, plan.zIn, plan.nR, dispSeed,
                                                  sampler=sampler, epsBudget=plan.epsR)
        report.queriesDisplacement = dispEst.queriesUsed
    except GaussTomoError as e:
        _log.warning("learning stage failed (%s): %s", e.code, e)
        report.failure = e.code
        report.failureMessage = str(e)
    report.queriesTotal = oracle.queryCount - before

    truth = oracle.groundTruth
    if symEst is not None:
        sTilde = symEst.sTilde
        report.sTilde = sTilde.data.tolist()
        report.epsS = operatorNorm(sTilde.data - truth.S.data)
        report.successSymplectic = report.epsS <= plan.epsS
        ident = np.eye(2*plan.m)
        report.deltaNorm = operatorNorm(truth.S.data @ sTilde.inverted().data - ident)
        report.deltaNormInverse = operatorNorm(sTilde.inverted().data @ truth.S.data - ident)
    if dispEst is not None:
        report.rTilde = dispEst.rTilde.tolist()
        report.epsR = float(np.linalg.norm(dispEst.rTilde - truth.r))
        report.successDisplacement = report.epsR <= plan.epsR
        try:
            report.symplecticTerm, report.displacementTerm = combinedBoundTerms(
                report.epsS, report.epsR, plan.m, plan.z, plan.nBar)
            report.combinedBound = combinedDiamondBound(report.epsS, report.epsR, plan.m, plan.z, plan.nBar)
        except GaussTomoError as e:
            _log.warning("combined bound not applicable (%s): %s", e.code, e)
            report.failure = e.code
            report.failureMessage = str(e)
    if report.failure is None:
        report.success = report.combinedBound <= plan.epsilon
    report.wallTime = time.perf_counter() - start
    return dispEst, symEst, report


def separateBoundTerms(truth, symEst, dispEst, plan):
    """Directly evaluated bounds on the symplectic and displacement distances

    Returns ``symplecticDiamondBound(S, sTilde, nBar)`` and
    ``displacementDiamondBound(rTilde, r, z^2 nBar)``, the quantities the
    combined bound dominates.
    """
    return (symplecticDiamondBound(truth.S, symEst.sTilde, plan.nBar),
            displacementDiamondBound(dispEst.rTilde, truth.r, plan.z**2*plan.nBar))
