import json
import pickle
import unittest

import numpy as np
from numpy.testing import assert_allclose

from .harness import acceptanceThreshold
from .phaseSpace import GaussianState, GaussianUnitary
from .symplectic import omega, randomSymplectic


class PhaseSpaceTestCase(unittest.TestCase):
    """Base class for unit tests of phase-space objects
    """

    def assertSymplectic(self, S, atol=1e-10):
        """Assert that ``S^T Omega S = Omega`` to within atol, entrywise"""
        data = np.asarray(S, dtype=float)
        om = omega(data.shape[0] // 2)
        assert_allclose(data.T @ om @ data, om, rtol=0, atol=atol)

    def assertStatesClose(self, state1, state2, rtol=1e-10, atol=1e-10):
        self.assertEqual(state1.n, state2.n)
        assert_allclose(state1.mean, state2.mean, rtol=rtol, atol=atol)
        assert_allclose(state1.cov, state2.cov, rtol=rtol, atol=atol)

    def checkRoundTrip(self, unitary, state, rtol=1e-10, atol=1e-10):
        """Check that a unitary's inverse undoes it

        Checks ``inverted().applyForward``, the composition
        ``then(inverted())`` and the composition in the other order.
        """
        forward = unitary.applyForward(state)
        inverse = unitary.inverted()
        self.assertStatesClose(inverse.applyForward(forward), state, rtol=rtol, atol=atol)

        composed = unitary.then(inverse)
        self.assertStatesClose(composed.applyForward(state), state, rtol=rtol, atol=atol)
        assert_allclose(composed.S.data, np.eye(2*unitary.m), rtol=0, atol=atol)
        assert_allclose(composed.r, np.zeros(2*unitary.m), rtol=0, atol=atol)

        reverse = inverse.then(unitary)
        self.assertStatesClose(reverse.applyForward(state), state, rtol=rtol, atol=atol)

    def checkPersistence(self, obj):
        """Check that an object survives toDict/fromDict through JSON, and pickle

        Float values must come back bit-identical.
        """
        cls = type(obj)
        restored = cls.fromDict(json.loads(json.dumps(obj.toDict())))
        self.assertEqual(restored.toDict(), obj.toDict())
        self.assertEqual(pickle.loads(pickle.dumps(obj)).toDict(), obj.toDict())

    def checkSuccessRate(self, successes, trials, delta):
        """Assert that a success count is compatible with failure probability at most delta

        The threshold is ``1 - delta`` minus three binomial standard errors.
        """
        threshold = acceptanceThreshold(delta, trials)
        rate = successes/trials
        self.assertGreaterEqual(rate, threshold, "success rate {}/{} below {:.4f}".format(
            successes, trials, threshold))

    def checkSampleMoments(self, batch, mean, cov, nSigma=6.0):
        """Check sample mean and covariance of a batch against the expected law

        Entries are compared in units of their standard errors.
        """
        mean = np.asarray(mean, dtype=float)
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        var = np.diag(cov)
        count = batch.count
        meanErr = np.abs(batch.mean() - mean)/np.sqrt(var/count)
        self.assertLess(np.max(meanErr), nSigma)
        covSigma = np.sqrt((np.outer(var, var) + cov**2)/count)
        covErr = np.abs(batch.covariance() - cov)/covSigma
        self.assertLess(np.max(covErr), nSigma)


def makeRandomUnitary(m, zMax=2.0, seed=0, rScale=1.0):
    """Make a `GaussianUnitary` suitable for testing

    S has operator norm exactly zMax; r is standard normal times rScale.
    """
    rng = np.random.default_rng(seed)
    S = randomSymplectic(m, zMax, rng.integers(2**32))
    return GaussianUnitary(rScale*rng.standard_normal(2*m), S)


def makeUnitPerturbation(dim, seed=0):
    """Make a random dim x dim matrix with operator norm 1"""
    mat = np.random.default_rng(seed).standard_normal((dim, dim))
    return mat/np.linalg.norm(mat, 2)


def makeRandomState(n, seed=0, zMax=2.0, thermalMax=1.0):
    """Make a mixed Gaussian state suitable for testing

    A thermal state with occupations up to thermalMax/2 per quadrature,
    squeezed and rotated by a random symplectic of norm zMax, with a
    standard normal mean.
    """
    rng = np.random.default_rng(seed)
    thermal = np.repeat(rng.uniform(1.0, 1.0 + thermalMax, size=n), 2)
    S = randomSymplectic(n, zMax, rng.integers(2**32))
    cov = S.data @ np.diag(thermal) @ S.data.T
    return GaussianState(rng.standard_normal(2*n), 0.5*(cov + cov.T))
