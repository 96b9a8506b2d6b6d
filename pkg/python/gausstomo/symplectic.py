"""Real symplectic group arithmetic

Phase-space vectors use interleaved quadratures (x1, p1, ..., xm, pm), so the
symplectic form is a direct sum of ``[[0, 1], [-1, 0]]`` blocks.
"""
from __future__ import absolute_import, division, print_function

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .base import (SYMPLECTIC_TOL, SQRT_TOL, SQRT_MAX_ITER, DimensionError, DomainError,
                   RegularizationDomainError, ConvergenceError, DecompositionError)

__all__ = ["omega", "isSymplectic", "symplecticResidual", "operatorNorm", "asRealMatrix",
           "SymplecticMatrix", "EulerFactors", "eulerDecompose", "randomSymplectic",
           "haarSymplecticOrthogonal", "principalSqrt", "regularize", "REGULARIZATION_GAP"]

_log = logging.getLogger(__name__)

REGULARIZATION_GAP = 0.5

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def omega(m):
    """Return the canonical symplectic form on m modes

    Parameters
    ----------
    m : `int`
        Number of modes; must be at least 1.

    Returns
    -------
    omega : `numpy.ndarray`
        2m x 2m block-diagonal matrix of m copies of ``[[0, 1], [-1, 0]]``.
    """
    if int(m) != m or m < 1:
        raise DomainError("number of modes must be a positive integer; got {}".format(m))
    return np.kron(np.eye(int(m)), _J2)


def asRealMatrix(M, name="matrix"):
    """Convert M to a finite 2-d float array, copying SymplecticMatrix data
    """
    if isinstance(M, SymplecticMatrix):
        return M.data
    arr = np.array(M, dtype=float)
    if arr.ndim != 2:
        raise DimensionError("{} must be 2-dimensional; got shape {}".format(name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise DomainError("{} has non-finite entries".format(name))
    return arr


def _asEvenSquare(M, name="matrix"):
    arr = asRealMatrix(M, name)
    nrow, ncol = arr.shape
    if nrow != ncol or nrow % 2 != 0 or nrow == 0:
        raise DimensionError("{} must be square with even dimension; got shape {}".format(name, arr.shape))
    return arr


def operatorNorm(M):
    """Largest singular value of M"""
    return float(np.linalg.norm(np.asarray(M, dtype=float), 2))


def symplecticResidual(M):
    """Return ``||M^T Omega M - Omega||`` in operator norm"""
    arr = _asEvenSquare(M)
    om = omega(arr.shape[0] // 2)
    return operatorNorm(arr.T @ om @ arr - om)


def isSymplectic(M, tol=SYMPLECTIC_TOL):
    """Return True if ``||M^T Omega M - Omega|| <= tol``

    Raises
    ------
    DimensionError
        If M is not square with even dimension.
    """
    return symplecticResidual(M) <= tol


class SymplecticMatrix(object):
    """An immutable 2m x 2m real symplectic matrix

    Parameters
    ----------
    data : array-like
        The matrix entries.
    tol : `float`
        Bound on the residual ``||S^T Omega S - Omega||``.
    check : `bool`
        Skip validation if False; only for matrices that are symplectic
        by construction.
    scaleTol : `bool`
        Compare the residual against ``tol * max(1, ||S||^2)`` instead, the
        attainable accuracy for a product of matrices of norm ``||S||``.

    Raises
    ------
    DimensionError
        If data is not square with even dimension.
    DomainError
        If data is not symplectic within tolerance.
    """

    def __init__(self, data, tol=SYMPLECTIC_TOL, check=True, scaleTol=False):
        if isinstance(data, SymplecticMatrix):
            arr = data.data.copy()
        else:
            arr = _asEvenSquare(data, "symplectic matrix").copy()
        if check:
            resid = symplecticResidual(arr)
            scale = max(1.0, operatorNorm(arr)**2) if scaleTol else 1.0
            if resid > tol*scale:
                raise DomainError("matrix is not symplectic: residual {:.3g} > {:.3g}".format(
                    resid, tol*scale))
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self):
        """Read-only matrix entries"""
        return self._data

    @property
    def m(self):
        """Number of modes"""
        return self._data.shape[0] // 2

    @property
    def shape(self):
        return self._data.shape

    def __array__(self, dtype=None, copy=None):
        arr = self._data if dtype is None else self._data.astype(dtype)
        return arr.copy() if copy else arr

    def __repr__(self):
        return "SymplecticMatrix(m={}, norm={:.6g})".format(self.m, self.operatorNorm())

    def operatorNorm(self):
        return operatorNorm(self._data)

    def inverted(self):
        """Return the inverse, computed exactly as ``-Omega S^T Omega``"""
        om = omega(self.m)
        return SymplecticMatrix(-om @ self._data.T @ om, check=False)

    def then(self, other):
        """Return the composition that applies self first, then other

        The result is the matrix product ``other @ self``.
        """
        other = SymplecticMatrix(other) if not isinstance(other, SymplecticMatrix) else other
        if other.m != self.m:
            raise DimensionError("cannot compose {}-mode and {}-mode matrices".format(self.m, other.m))
        return SymplecticMatrix(other.data @ self._data, check=False)

    def isOrthogonal(self, tol=SYMPLECTIC_TOL):
        return operatorNorm(self._data.T @ self._data - np.eye(2*self.m)) <= tol


@dataclass(frozen=True)
class EulerFactors:
    """Factors of ``S = O1 @ diag(z1, 1/z1, ..., zm, 1/zm) @ O2``

    O1 and O2 are symplectic and orthogonal; z is sorted in descending order
    with every entry at least 1.
    """
    O1: SymplecticMatrix
    O2: SymplecticMatrix
    z: np.ndarray

    def squeezingMatrix(self):
        return np.diag(np.column_stack([self.z, 1.0/self.z]).ravel())

    def reconstructed(self):
        return self.O1.data @ self.squeezingMatrix() @ self.O2.data


def eulerDecompose(S, tol=1e-8):
    """Compute the Euler decomposition of a symplectic matrix

    The polar decomposition ``S = O P`` gives a symplectic orthogonal O and a
    symmetric positive symplectic P. The eigenvectors of P are paired as
    ``(v, Omega^T v)``, which carry the reciprocal eigenvalues ``(z, 1/z)``;
    inside the ``z = 1`` eigenspace the pairs are built by symplectic
    Gram-Schmidt.

    Parameters
    ----------
    S : `SymplecticMatrix` or array-like
        Matrix to decompose.
    tol : `float`
        Reconstruction tolerance, relative to ``max(1, ||S||)``.

    Returns
    -------
    factors : `EulerFactors`

    Raises
    ------
    DecompositionError
        If the factors do not reproduce S within tolerance.
    """
    S = S if isinstance(S, SymplecticMatrix) else SymplecticMatrix(S)
    m = S.m
    om = omega(m)
    orth, pos = scipy.linalg.polar(S.data)
    pos = 0.5*(pos + pos.T)
    evals, evecs = np.linalg.eigh(pos)
    order = np.argsort(evals)[::-1]

    basis = np.zeros((2*m, 0))
    zvals = []
    unused = list(order)
    while len(zvals) < m:
        best = None
        bestResidual = 0.0
        for idx in unused:
            cand = evecs[:, idx] - basis @ (basis.T @ evecs[:, idx])
            resid = np.linalg.norm(cand)
            if resid > 0.5:
                best = (idx, cand/resid)
                break
            if resid > bestResidual:
                best = (idx, cand/resid)
                bestResidual = resid
        if best is None:
            raise DecompositionError("could not build a symplectic eigenbasis")
        idx, vec = best
        unused.remove(idx)
        # re-project after normalization to keep the basis orthonormal to rounding
        vec = vec - basis @ (basis.T @ vec)
        vec /= np.linalg.norm(vec)
        partner = om.T @ vec
        basis = np.column_stack([basis, vec, partner])
        zvals.append(max(1.0, float(vec @ pos @ vec)))

    zArr = np.array(zvals)
    order = np.argsort(-zArr, kind="stable")
    zArr = zArr[order]
    cols = np.ravel([[2*j, 2*j + 1] for j in order])
    basis = basis[:, cols]

    factors = EulerFactors(O1=SymplecticMatrix(orth @ basis, check=False),
                           O2=SymplecticMatrix(basis.T, check=False),
                           z=zArr)
    err = operatorNorm(factors.reconstructed() - S.data)
    if err > tol*max(1.0, S.operatorNorm()):
        raise DecompositionError("Euler reconstruction error {:.3g} exceeds tolerance".format(err))
    return factors


def haarSymplecticOrthogonal(m, rng):
    """Draw a Haar-random m-mode symplectic orthogonal matrix

    A Haar-random unitary ``U = X + iY`` (QR of a complex Ginibre matrix with
    the phases of R's diagonal removed) maps to the interleaved real matrix
    with 2x2 blocks ``[[X, -Y], [Y, X]]``.
    """
    ginibre = (rng.standard_normal((m, m)) + 1j*rng.standard_normal((m, m)))/np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diag = np.diag(r)
    q = q*(diag/np.abs(diag))
    return np.kron(q.real, np.eye(2)) + np.kron(q.imag, _J2.T)


def randomSymplectic(m, zMax, seed):
    """Draw a random symplectic matrix with operator norm exactly zMax

    Parameters
    ----------
    m : `int`
        Number of modes.
    zMax : `float`
        Largest squeezing value; at least 1. The first squeezing value is
        pinned to zMax and the others are log-uniform on ``[1, zMax]``.
    seed : `int` or `numpy.random.SeedSequence`
        Seed; the result is a deterministic function of it.

    Returns
    -------
    S : `SymplecticMatrix`
    """
    if zMax < 1:
        raise DomainError("zMax must be at least 1; got {}".format(zMax))
    rng = np.random.default_rng(seed)
    o1 = haarSymplecticOrthogonal(m, rng)
    o2 = haarSymplecticOrthogonal(m, rng)
    logz = rng.uniform(0.0, 1.0, size=m)*np.log(zMax)
    logz[0] = np.log(zMax)
    z = np.exp(logz)
    squeeze = np.diag(np.column_stack([z, 1.0/z]).ravel())
    return SymplecticMatrix(o1 @ squeeze @ o2)


def _denmanBeavers(T, tol, maxIter):
    n = T.shape[0]
    ident = np.eye(n)
    y = T.copy()
    zmat = ident.copy()
    scaling = True
    for i in range(maxIter):
        yInv = np.linalg.inv(y)
        zInv = np.linalg.inv(zmat)
        if scaling:
            _, logDetY = np.linalg.slogdet(y)
            _, logDetZ = np.linalg.slogdet(zmat)
            mu = np.exp(-(logDetY + logDetZ)/(2*n))
        else:
            mu = 1.0
        yNext = 0.5*(mu*y + zInv/mu)
        zNext = 0.5*(mu*zmat + yInv/mu)
        change = np.linalg.norm(yNext - y, "fro")/max(1.0, np.linalg.norm(yNext, "fro"))
        y, zmat = yNext, zNext
        if change < 1e-2:
            scaling = False
        if change <= tol:
            _log.debug("Denman-Beavers converged after %d iterations", i + 1)
            break
    else:
        raise ConvergenceError("square root iteration did not converge in {} iterations".format(maxIter))
    # one Newton step cleans up the accumulated rounding of the coupled iteration
    return 0.5*(y + np.linalg.solve(y, T))


def _eigSqrt(T):
    evals, evecs = np.linalg.eig(T)
    root = evecs @ np.diag(np.sqrt(evals.astype(complex))) @ np.linalg.inv(evecs)
    return root.real if np.isrealobj(T) else root


def principalSqrt(T, tol=SQRT_TOL, maxIter=SQRT_MAX_ITER, method="denmanBeavers", checkDomain=True):
    """Compute the principal square root of a matrix near the identity

    Parameters
    ----------
    T : array-like
        Square matrix with ``||T - 1|| < 1``.
    tol : `float`
        Required residual ``||Q @ Q - T|| <= tol * max(1, ||T||)``.
    maxIter : `int`
        Iteration limit of the Denman-Beavers backend.
    method : `str`
        ``"denmanBeavers"`` (determinant-scaled coupled iteration),
        ``"eig"`` (dense eigendecomposition) or ``"schur"``
        (`scipy.linalg.sqrtm`).
    checkDomain : `bool`
        Enforce ``||T - 1|| < 1``; disable only to exercise the backends
        away from the identity.

    Returns
    -------
    Q : `numpy.ndarray`
        Principal square root; real when T is real.

    Raises
    ------
    DomainError
        If ``||T - 1|| >= 1`` and checkDomain is True, or method is unknown.
    ConvergenceError
        If the iteration does not converge or the residual exceeds tol.
    """
    T = asRealMatrix(T, "T")
    n = T.shape[0]
    if T.shape[1] != n:
        raise DimensionError("T must be square; got shape {}".format(T.shape))
    if checkDomain:
        gap = operatorNorm(T - np.eye(n))
        if not gap < 1.0:
            raise DomainError("||T - 1|| = {:.6g} is not below 1".format(gap))

    if method == "denmanBeavers":
        root = _denmanBeavers(T, tol, maxIter)
    elif method == "eig":
        root = _eigSqrt(T)
    elif method == "schur":
        root = scipy.linalg.sqrtm(T)
        root = np.real_if_close(root, tol=1000)
        if np.iscomplexobj(root):
            raise ConvergenceError("Schur square root has a significant imaginary part")
    else:
        raise DomainError("unknown square root method {!r}".format(method))

    resid = operatorNorm(root @ root - T)
    if resid > tol*max(1.0, operatorNorm(T)):
        raise ConvergenceError("square root residual {:.3g} exceeds tolerance".format(resid))
    return root


def regularize(sHat, tol=SYMPLECTIC_TOL, sqrtTol=SQRT_TOL, maxIter=SQRT_MAX_ITER, method="denmanBeavers"):
    """Round an approximately symplectic matrix to an exactly symplectic one

    Computes ``T = -Omega sHat^T Omega sHat``, its principal square root Q,
    and returns ``sHat Q^{-1}``, which satisfies
    ``(sHat Q^{-1})^T Omega (sHat Q^{-1}) = Omega`` because Q, like T, satisfies
    ``Q^T Omega = Omega Q``.

    Parameters
    ----------
    sHat : array-like
        Raw 2m x 2m estimate.

    Returns
    -------
    sTilde : `SymplecticMatrix`

    Raises
    ------
    RegularizationDomainError
        If ``||T - 1|| >= 1/2``.
    """
    sHat = _asEvenSquare(sHat, "sHat")
    dim = sHat.shape[0]
    om = omega(dim // 2)
    T = -om @ sHat.T @ om @ sHat
    gap = operatorNorm(T - np.eye(dim))
    if not gap < REGULARIZATION_GAP:
        raise RegularizationDomainError(
            "||T - 1|| = {:.6g} is not below {}; the estimate must be improved first".format(
                gap, REGULARIZATION_GAP))
    root = principalSqrt(T, tol=sqrtTol, maxIter=maxIter, method=method)
    sTilde = np.linalg.solve(root.T, sHat.T).T
    return SymplecticMatrix(sTilde, tol=tol)
