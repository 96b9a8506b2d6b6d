"""Sampling models for heterodyne and homodyne detection of Gaussian states
"""
from __future__ import absolute_import, division, print_function

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .base import DimensionError, DomainError, NumericError
from .phaseSpace import GaussianState, reflection
from .symplectic import SymplecticMatrix

__all__ = ["EXPLICIT_SHOT_LIMIT", "childSeed", "makeRng", "SampleBatch", "drawGaussian",
           "heterodyneMoments", "homodyneMoments", "heterodyne", "homodyne", "marginal",
           "balancedBeamSplitter", "passiveAncilla", "passiveHeterodyneMoments", "passiveHeterodyne",
           "GaussianSampler", "ExactSampler"]

_log = logging.getLogger(__name__)

EXPLICIT_SHOT_LIMIT = 100000

_QUADRATURE_OFFSET = {"position": 0, "momentum": 1}


def childSeed(seed, *streams):
    """Return the `numpy.random.SeedSequence` of the stream (seed, *streams)

    An integer seed becomes the entropy ``[seed, *streams]``; trials use
    ``(masterSeed, trialIndex)``. A SeedSequence is extended by appending
    the streams to its spawn key, so stages of one trial stay independent.
    """
    streams = tuple(int(s) for s in streams)
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + streams)
    entropy = (int(seed),) + streams
    if min(entropy) < 0:
        raise DomainError("seeds and stream ids must be non-negative; got {}".format(list(entropy)))
    return np.random.SeedSequence(list(entropy))


def makeRng(seed, *streams):
    """Return a generator for the stream (seed, *streams); generators pass through"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(childSeed(seed, *streams))


@dataclass(frozen=True)
class SampleBatch:
    """Measurement outcomes, one row per shot"""
    dim: int
    count: int
    data: np.ndarray
    seedTrace: int

    def __post_init__(self):
        if self.count < 1 or self.data.shape != (self.count, self.dim):
            raise DimensionError("sample data shape {} does not match count={} dim={}".format(
                self.data.shape, self.count, self.dim))
        if not np.all(np.isfinite(self.data)):
            raise NumericError("sample data has non-finite entries")

    def mean(self):
        return self.data.mean(axis=0)

    def covariance(self):
        return np.atleast_2d(np.cov(self.data, rowvar=False))

    def project(self, columns):
        return SampleBatch(dim=len(columns), count=self.count, data=self.data[:, list(columns)],
                           seedTrace=self.seedTrace)

    def writeCsv(self, path):
        header = ",".join("q{}".format(i) for i in range(self.dim))
        np.savetxt(path, self.data, delimiter=",", header=header, comments="", fmt="%.17g")


def drawGaussian(mean, cov, count, rng):
    """Draw count samples of N(mean, cov) as a (count, dim) array

    Uses the Cholesky factor of the symmetrized covariance; a near-singular
    covariance is retried once with a diagonal jitter of 1e-12 times its
    largest diagonal entry.

    Raises
    ------
    NumericError
        If the covariance cannot be factored.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    cov = 0.5*(cov + cov.T)
    try:
        lower = scipy.linalg.cholesky(cov, lower=True)
    except np.linalg.LinAlgError:
        jitter = 1e-12*max(np.max(np.abs(np.diag(cov))), np.finfo(float).tiny)
        _log.warning("covariance not positive definite; retrying Cholesky with jitter %.3g", jitter)
        try:
            lower = scipy.linalg.cholesky(cov + jitter*np.eye(cov.shape[0]), lower=True)
        except np.linalg.LinAlgError as e:
            raise NumericError("covariance factorization failed: {}".format(e))
    return mean + rng.standard_normal((int(count), mean.shape[0])) @ lower.T


def heterodyneMoments(state):
    """Mean and covariance of heterodyne outcomes: ``(m, (V + 1)/2)``"""
    return state.mean.copy(), 0.5*(state.cov + np.eye(2*state.n))


def homodyneMoments(state, quadrature):
    """Mean and covariance of homodyne outcomes of every mode

    Position homodyne keeps the even (0-based) quadrature indices and
    momentum homodyne the odd ones; the covariance block is halved.
    """
    try:
        offset = _QUADRATURE_OFFSET[quadrature]
    except KeyError:
        raise DomainError("quadrature must be 'position' or 'momentum'; got {!r}".format(quadrature))
    idx = np.arange(offset, 2*state.n, 2)
    return state.mean[idx].copy(), 0.5*state.cov[np.ix_(idx, idx)]


def _batch(mean, cov, count, seed):
    if count < 1:
        raise DomainError("count must be at least 1; got {}".format(count))
    rng = makeRng(seed)
    data = drawGaussian(mean, cov, count, rng)
    trace = int(seed) if isinstance(seed, (int, np.integer)) else -1
    return SampleBatch(dim=data.shape[1], count=int(count), data=data, seedTrace=trace)


def heterodyne(state, count, seed):
    """Draw count heterodyne shots, distributed as N(m, (V + 1)/2)"""
    mean, cov = heterodyneMoments(state)
    return _batch(mean, cov, count, seed)


def homodyne(state, quadrature, count, seed):
    """Draw count homodyne shots of the given quadrature on every mode"""
    mean, cov = homodyneMoments(state, quadrature)
    return _batch(mean, cov, count, seed)


def marginal(state, modeIndices):
    return state.reduced(modeIndices)


def balancedBeamSplitter(n):
    """Balanced beam splitters coupling mode k with mode n + k, for k < n

    Outputs are ``(a + b)/sqrt(2)`` on the first n modes and
    ``(a - b)/sqrt(2)`` on the last n, identically for both quadratures.
    """
    ident = np.eye(2*n)
    return SymplecticMatrix(np.block([[ident, ident], [ident, -ident]])/np.sqrt(2.0), check=False)


def passiveAncilla(S):
    """Squeezed vacuum consumed by the passive heterodyne scheme

    Its covariance is ``Z S^{-1} S^{-T} Z`` with Z the momentum reflection:
    the difference port of the beam splitter reads the ancilla momentum with
    the opposite sign, and the reflection compensates for it.
    """
    S = S if isinstance(S, SymplecticMatrix) else SymplecticMatrix(S)
    zmat = reflection(S.m)
    sInv = S.inverted().data
    cov = zmat @ sInv @ sInv.T @ zmat
    return GaussianState(np.zeros(2*S.m), 0.5*(cov + cov.T), check=False)


def _passiveSelection(state, S):
    """Joint homodyne law of the passive scheme and the map from outcomes to output

    Returns the mean and covariance of the selected homodyne outcomes
    (x of every sum port, p of every difference port, interleaved per mode)
    and the matrix turning one outcome vector into ``S q``.
    """
    S = S if isinstance(S, SymplecticMatrix) else SymplecticMatrix(S)
    n = state.n
    if S.m != n:
        raise DimensionError("{}-mode symplectic applied to {}-mode state".format(S.m, n))
    ancilla = passiveAncilla(S)
    jointMean = np.concatenate([state.mean, ancilla.mean])
    jointCov = scipy.linalg.block_diag(state.cov, ancilla.cov)
    mixer = balancedBeamSplitter(n).data
    outMean = mixer @ jointMean
    outCov = mixer @ jointCov @ mixer.T
    select = np.ravel([[2*k, 2*n + 2*k + 1] for k in range(n)])
    selMean = outMean[select]
    selCov = 0.5*outCov[np.ix_(select, select)]
    return selMean, 0.5*(selCov + selCov.T), np.sqrt(2.0)*S.data


def passiveHeterodyneMoments(state, S):
    """Analytic law of the passive scheme's output ``S q``

    Equals the heterodyne law of ``U_S`` applied to state,
    ``(S m, (S V S^T + 1)/2)``.
    """
    selMean, selCov, post = _passiveSelection(state, S)
    cov = post @ selCov @ post.T
    return post @ selMean, 0.5*(cov + cov.T)


def passiveHeterodyne(state, S, count, seed):
    """Heterodyne after ``U_S`` using only passive optics and homodyne detection

    Each shot interferes the state with an ancilla squeezed vacuum on
    balanced beam splitters, measures position on the sum ports and
    momentum on the difference ports, rescales ``q = sqrt(2) (x, p)`` and
    outputs ``S q``.
    """
    selMean, selCov, post = _passiveSelection(state, S)
    outcomes = _batch(selMean, selCov, count, seed)
    return SampleBatch(dim=outcomes.dim, count=outcomes.count, data=outcomes.data @ post.T,
                       seedTrace=outcomes.seedTrace)


class GaussianSampler(object):
    """Sample means of Gaussian measurement outcomes

    Up to ``explicitShotLimit`` shots are drawn one by one; larger batches
    draw the sample mean directly from ``N(mean, cov/count)``, which has the
    same law.
    """

    def __init__(self, explicitShotLimit=EXPLICIT_SHOT_LIMIT):
        self.explicitShotLimit = explicitShotLimit

    def sampleMean(self, mean, cov, count, rng):
        if count < 1:
            raise DomainError("count must be at least 1; got {}".format(count))
        if count <= self.explicitShotLimit:
            return drawGaussian(mean, cov, count, rng).mean(axis=0)
        return drawGaussian(mean, np.asarray(cov)/count, 1, rng)[0]


class ExactSampler(object):
    """Replace every sample mean by the distribution mean"""

    def sampleMean(self, mean, cov, count, rng):
        return np.array(mean, dtype=float)
