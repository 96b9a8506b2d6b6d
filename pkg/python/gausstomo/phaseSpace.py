"""Gaussian states and unitaries as first and second moments

Multi-register states are ordered (signal block | ancilla block), with
interleaved quadratures inside each block.
"""
from __future__ import absolute_import, division, print_function

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .base import UNCERTAINTY_TOL, DimensionError, DomainError
from .symplectic import SymplecticMatrix, omega, operatorNorm, eulerDecompose

__all__ = ["GaussianState", "GaussianUnitary", "ProtocolMoments", "PassivePreparation",
           "vacuum", "coherent", "singleModeSqueezed", "tmsv", "tmsvSymplectic", "reflection",
           "applyUnitary", "embedOnFirstModes", "meanPhotonNumber", "probePhotonNumber",
           "tmsvProtocolMoments", "closedFormProtocolBlocks", "passivePreparation"]

_log = logging.getLogger(__name__)


def _asVector(vec, name="vector"):
    arr = np.array(vec, dtype=float)
    if arr.ndim != 1:
        raise DimensionError("{} must be 1-dimensional; got shape {}".format(name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise DomainError("{} has non-finite entries".format(name))
    return arr


def _readOnly(arr):
    arr.setflags(write=False)
    return arr


class GaussianState(object):
    """A Gaussian state of n modes, described by its mean and covariance

    Parameters
    ----------
    mean : array-like
        Mean vector of length 2n.
    cov : array-like
        Covariance matrix of shape (2n, 2n).
    check : `bool`
        Validate symmetry and the uncertainty relation ``cov + i Omega >= 0``.
        States derived from valid states by symplectic maps skip the check.
    tol : `float`
        Tolerance of the uncertainty check, relative to ``max(1, ||cov||)``.

    Raises
    ------
    DimensionError
        If shapes are inconsistent.
    DomainError
        If the moments are not finite or violate the uncertainty relation.
    """

    def __init__(self, mean, cov, check=True, tol=UNCERTAINTY_TOL):
        mean = _asVector(mean, "mean")
        cov = np.array(cov, dtype=float)
        dim = mean.shape[0]
        if dim == 0 or dim % 2 != 0:
            raise DimensionError("mean must have positive even length; got {}".format(dim))
        if cov.shape != (dim, dim):
            raise DimensionError("covariance shape {} does not match mean length {}".format(cov.shape, dim))
        if not np.all(np.isfinite(cov)):
            raise DomainError("covariance has non-finite entries")
        if check:
            scale = max(1.0, operatorNorm(cov))
            asym = np.max(np.abs(cov - cov.T))
            if asym > 1e-10*scale:
                raise DomainError("covariance is not symmetric (max asymmetry {:.3g})".format(asym))
            cov = 0.5*(cov + cov.T)
            if np.linalg.eigvalsh(cov).min() <= -1e-10*scale:
                raise DomainError("covariance is not positive definite")
            lowest = np.linalg.eigvalsh(cov + 1j*omega(dim // 2)).min()
            if lowest < -tol*scale:
                raise DomainError("covariance violates the uncertainty relation "
                                  "(min eigenvalue of V + i Omega is {:.3g})".format(lowest))
        self._mean = _readOnly(mean)
        self._cov = _readOnly(cov)

    @property
    def n(self):
        """Number of modes"""
        return self._mean.shape[0] // 2

    @property
    def mean(self):
        return self._mean

    @property
    def cov(self):
        return self._cov

    def __repr__(self):
        return "GaussianState(n={})".format(self.n)

    def reduced(self, modeIndices):
        """Return the marginal state of the listed modes, in the listed order

        Raises
        ------
        DimensionError
            If an index is out of range or repeated.
        """
        modeIndices = [int(k) for k in modeIndices]
        if not modeIndices:
            raise DimensionError("at least one mode must be selected")
        if len(set(modeIndices)) != len(modeIndices):
            raise DimensionError("mode indices must be distinct; got {}".format(modeIndices))
        for k in modeIndices:
            if not 0 <= k < self.n:
                raise DimensionError("mode index {} out of range for {} modes".format(k, self.n))
        quads = np.ravel([[2*k, 2*k + 1] for k in modeIndices])
        return GaussianState(self._mean[quads], self._cov[np.ix_(quads, quads)], check=False)

    def toDict(self):
        return {"n": self.n, "mean": self._mean.tolist(), "cov": self._cov.tolist()}

    @classmethod
    def fromDict(cls, data):
        state = cls(data["mean"], data["cov"])
        if state.n != data["n"]:
            raise DimensionError("record says n={} but moments have {} modes".format(data["n"], state.n))
        return state


class GaussianUnitary(object):
    """The Gaussian unitary that applies symplectic S, then displaces by r

    Acting on moments: ``mean -> S mean + r``, ``cov -> S cov S^T``.
    """

    def __init__(self, r, S):
        self._S = S if isinstance(S, SymplecticMatrix) else SymplecticMatrix(S)
        r = _asVector(r, "displacement")
        if r.shape[0] != 2*self._S.m:
            raise DimensionError("displacement length {} does not match {}-mode symplectic".format(
                r.shape[0], self._S.m))
        self._r = _readOnly(r)

    @classmethod
    def identity(cls, m):
        return cls(np.zeros(2*m), SymplecticMatrix(np.eye(2*m), check=False))

    @property
    def m(self):
        return self._S.m

    @property
    def r(self):
        return self._r

    @property
    def S(self):
        return self._S

    def __repr__(self):
        return "GaussianUnitary(m={})".format(self.m)

    def applyForward(self, state):
        if state.n != self.m:
            raise DimensionError("{}-mode unitary applied to {}-mode state".format(self.m, state.n))
        sdata = self._S.data
        cov = sdata @ state.cov @ sdata.T
        return GaussianState(sdata @ state.mean + self._r, 0.5*(cov + cov.T), check=False)

    def then(self, other):
        """Return the unitary that applies self first, then other"""
        if other.m != self.m:
            raise DimensionError("cannot compose {}-mode and {}-mode unitaries".format(self.m, other.m))
        return GaussianUnitary(other.r + other.S.data @ self._r, self._S.then(other.S))

    def inverted(self):
        sInv = self._S.inverted()
        return GaussianUnitary(-sInv.data @ self._r, sInv)

    def embedded(self, n):
        """Return this unitary acting on the first m of n modes

        Raises
        ------
        DimensionError
            If n < m.
        """
        if n < self.m:
            raise DimensionError("cannot embed {} modes into {}".format(self.m, n))
        extra = 2*(n - self.m)
        sdata = scipy.linalg.block_diag(self._S.data, np.eye(extra))
        return GaussianUnitary(np.concatenate([self._r, np.zeros(extra)]),
                               SymplecticMatrix(sdata, check=False))

    def toDict(self):
        return {"m": self.m, "r": self._r.tolist(), "S": self._S.data.tolist()}

    @classmethod
    def fromDict(cls, data):
        unitary = cls(data["r"], data["S"])
        if unitary.m != data["m"]:
            raise DimensionError("record says m={} but S has {} modes".format(data["m"], unitary.m))
        return unitary


def vacuum(n):
    return GaussianState(np.zeros(2*n), np.eye(2*n), check=False)


def coherent(mvec):
    mvec = _asVector(mvec, "coherent amplitude")
    if mvec.shape[0] % 2 != 0:
        raise DimensionError("coherent amplitude must have even length; got {}".format(mvec.shape[0]))
    return GaussianState(mvec, np.eye(mvec.shape[0]), check=False)


def singleModeSqueezed(zIn, n, orientation="momentum"):
    """Return n copies of a single-mode squeezed vacuum

    Parameters
    ----------
    zIn : `float`
        Squeezing, at least 1.
    n : `int`
        Number of modes.
    orientation : `str`
        ``"momentum"``: covariance ``diag(zIn, 1/zIn)`` per mode (momentum
        squeezed); ``"position"``: ``diag(1/zIn, zIn)``.
    """
    if zIn < 1:
        raise DomainError("squeezing must be at least 1; got {}".format(zIn))
    if orientation == "momentum":
        block = [zIn, 1.0/zIn]
    elif orientation == "position":
        block = [1.0/zIn, zIn]
    else:
        raise DomainError("orientation must be 'momentum' or 'position'; got {!r}".format(orientation))
    return GaussianState(np.zeros(2*n), np.diag(np.tile(block, n)), check=False)


def reflection(m):
    """The momentum reflection ``diag(1, -1, ..., 1, -1)`` on m modes"""
    return np.diag(np.tile([1.0, -1.0], m))


def tmsvSymplectic(nu, m, inverse=False):
    """Symplectic matrix preparing m two-mode squeezed vacua from vacuum

    In (signal | ancilla) block form ``[[a, b Z], [b Z, a]]`` with
    ``a = sqrt(nu)``, ``b = sqrt(nu - 1)`` and Z the momentum reflection;
    the inverse flips the sign of b.
    """
    if nu < 1:
        raise DomainError("nu must be at least 1; got {}".format(nu))
    a = np.sqrt(nu)
    b = -np.sqrt(nu - 1.0) if inverse else np.sqrt(nu - 1.0)
    ident = np.eye(2*m)
    zmat = reflection(m)
    return SymplecticMatrix(np.block([[a*ident, b*zmat], [b*zmat, a*ident]]), check=False)


def tmsv(nu, m):
    """Return m two-mode squeezed vacua in (signal | ancilla) order

    Each signal/ancilla pair has diagonal blocks ``(2 nu - 1) 1`` and
    off-diagonal block ``2 sqrt(nu (nu - 1)) sigma_z``; its mean photon
    number is ``2 (nu - 1)``.
    """
    sNu = tmsvSymplectic(nu, m).data
    cov = sNu @ sNu.T
    return GaussianState(np.zeros(4*m), 0.5*(cov + cov.T), check=False)


def applyUnitary(G, state):
    return G.applyForward(state)


def embedOnFirstModes(G, n):
    return G.embedded(n)


def meanPhotonNumber(state):
    """Mean photon number ``Tr[V - 1]/4 + ||m||^2/2``"""
    return float((np.trace(state.cov) - 2*state.n)/4.0 + state.mean @ state.mean/2.0)


def probePhotonNumber(state):
    """Photon number charged to a probe by the query planner

    ``Tr[V - 1]/4 + ||m||^2``: a coherent probe of amplitude eta is charged
    eta^2, the unit the planner's energy constraints are stated in.
    """
    return float((np.trace(state.cov) - 2*state.n)/4.0 + state.mean @ state.mean)


@dataclass(frozen=True)
class ProtocolMoments:
    """Moments of the displacement-learning register before measurement

    The full covariance is ``[[A, C], [C^T, B]]`` in (signal | ancilla) order.
    """
    meanSignal: np.ndarray
    meanAncilla: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def covariance(self):
        return np.block([[self.A, self.C], [self.C.T, self.B]])

    def state(self):
        return GaussianState(np.concatenate([self.meanSignal, self.meanAncilla]), self.covariance())


def _symplectic(S):
    return S if isinstance(S, SymplecticMatrix) else SymplecticMatrix(S)


def tmsvProtocolMoments(r, S, sTilde, nu):
    """Moments of the TMSV displacement-learning register before measurement

    The register is prepared as m two-mode squeezed vacua, the signal block
    is pre-processed by ``sTilde^{-1}``, passed through the unitary (r, S),
    and the squeezing is undone. The net symplectic is
    ``W = S_nu^{-1} (S + 1)(sTilde^{-1} + 1) S_nu`` (direct sums) and the
    moments are ``(S_nu^{-1} (r, 0), W W^T)``.

    Returns
    -------
    moments : `ProtocolMoments`
    """
    S = _symplectic(S)
    sTilde = _symplectic(sTilde)
    if S.m != sTilde.m:
        raise DimensionError("S has {} modes but sTilde has {}".format(S.m, sTilde.m))
    m = S.m
    r = _asVector(r, "displacement")
    if r.shape[0] != 2*m:
        raise DimensionError("displacement length {} does not match {} modes".format(r.shape[0], m))
    ident = np.eye(2*m)
    sNu = tmsvSymplectic(nu, m).data
    sNuInv = tmsvSymplectic(nu, m, inverse=True).data
    net = (sNuInv @ scipy.linalg.block_diag(S.data, ident)
           @ scipy.linalg.block_diag(sTilde.inverted().data, ident) @ sNu)
    mean = sNuInv @ np.concatenate([r, np.zeros(2*m)])
    cov = net @ net.T
    cov = 0.5*(cov + cov.T)
    return ProtocolMoments(meanSignal=mean[:2*m], meanAncilla=mean[2*m:],
                           A=cov[:2*m, :2*m], B=cov[2*m:, 2*m:], C=cov[:2*m, 2*m:])


def closedFormProtocolBlocks(delta, nu, coefficients="derived"):
    """Closed-form covariance blocks of the TMSV protocol

    Parameters
    ----------
    delta : array-like
        ``S sTilde^{-1} - 1``.
    nu : `float`
        TMSV parameter.
    coefficients : `str`
        ``"derived"`` uses ``nu (2 nu - 1)`` and ``(nu - 1)(2 nu - 1)``,
        which reproduce ``W W^T`` exactly. ``"printed"`` uses
        ``nu (2 nu + 1)`` and ``(nu + 1)(2 nu + 1)``, only for reporting
        how far that variant is from the composed moments.

    Returns
    -------
    A, B, C : `numpy.ndarray`
    """
    delta = np.asarray(delta, dtype=float)
    m = delta.shape[0] // 2
    if coefficients == "derived":
        coefA, coefB = nu*(2*nu - 1), (nu - 1)*(2*nu - 1)
    elif coefficients == "printed":
        coefA, coefB = nu*(2*nu + 1), (nu + 1)*(2*nu + 1)
    else:
        raise DomainError("coefficients must be 'derived' or 'printed'; got {!r}".format(coefficients))
    ident = np.eye(2*m)
    zmat = reflection(m)
    sym = delta + delta.T
    outer = delta @ delta.T
    A = ident + nu*sym + coefA*outer
    B = ident - (nu - 1)*zmat @ sym @ zmat + coefB*zmat @ outer @ zmat
    C = np.sqrt(nu*(nu - 1))*(delta @ zmat - delta.T @ zmat - (2*nu - 1)*outer @ zmat)
    return A, B, C


@dataclass(frozen=True)
class PassivePreparation:
    """``U_S |0> = U_O1 |Z>``: a product of squeezed vacua and an interferometer"""
    squeezedState: GaussianState
    interferometer: GaussianUnitary

    def prepared(self):
        return self.interferometer.applyForward(self.squeezedState)


def passivePreparation(S):
    """Factor the preparation of ``U_S |0>`` into squeezing and passive optics

    With the Euler decomposition ``S = O1 Z O2``, the orthogonal O2 leaves
    the vacuum invariant, so the state is ``U_O1`` applied to single-mode
    squeezed vacua with covariance ``Z^2``.
    """
    factors = eulerDecompose(S)
    squeeze = factors.squeezingMatrix()
    dim = squeeze.shape[0]
    state = GaussianState(np.zeros(dim), squeeze @ squeeze, check=False)
    return PassivePreparation(squeezedState=state,
                              interferometer=GaussianUnitary(np.zeros(dim), factors.O1))
