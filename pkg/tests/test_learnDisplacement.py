from __future__ import absolute_import, division, print_function
import unittest

import numpy as np
from numpy.testing import assert_allclose

import gausstomo as gt
from gausstomo.test import PhaseSpaceTestCase, makeRandomUnitary


class TestLearnDisplacement(PhaseSpaceTestCase):

    def test_ExactSamples(self):
        """Without shot noise and with sTilde = S every learner returns r"""
        hidden = makeRandomUnitary(2, zMax=2.0, seed=1, rScale=2.0)
        exact = gt.ExactSampler()
        for learner, arg, queries in ((gt.learnDisplacementTmsv, 50.0, 5),
                                      (gt.learnDisplacementPassive, 50.0, 5),
                                      (gt.learnDisplacementSingleMode, 8.0, 10)):
            oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
            est = learner(oracle, hidden.S, arg, 5, seed=1, sampler=exact, epsBudget=0.1)
            assert_allclose(est.rTilde, hidden.r, atol=1e-9)
            self.assertEqual(est.queriesUsed, queries)
            self.assertEqual(oracle.queryCount, queries)
            self.assertEqual(est.epsBudget, 0.1)

    def test_TmsvShotCount(self):
        self.assertEqual(gt.shotCount(gt.tmsvShots(2, 100.0, 0.0, 0.05, 0.1)), 69)

    def test_TmsvGuarantee(self):
        """||rTilde - r|| <= eps over 200 trials at m=2, nu=100, eps=0.05, delta=0.1"""
        m, nu, eps, delta = 2, 100.0, 0.05, 0.1
        nR = gt.shotCount(gt.tmsvShots(m, nu, 0.0, eps, delta))
        successes = 0
        for trial in range(200):
            hidden = makeRandomUnitary(m, zMax=2.0, seed=trial)
            oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
            est = gt.learnDisplacementTmsv(oracle, hidden.S, nu, nR, seed=gt.childSeed(7, trial))
            self.assertEqual(oracle.queryCount, nR)
            successes += np.linalg.norm(est.rTilde - hidden.r) <= eps
        self.checkSuccessRate(successes, 200, delta)

    def test_SingleModeGuarantee(self):
        """Same target with squeezed probes and 2 nR homodyne queries"""
        m, zIn, eps, delta = 2, 10.0, 0.05, 0.1
        nR = gt.shotCount(gt.singleModeShots(m, zIn, 0.0, eps, delta))
        successes = 0
        for trial in range(200):
            hidden = makeRandomUnitary(m, zMax=2.0, seed=trial)
            oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
            est = gt.learnDisplacementSingleMode(oracle, hidden.S, zIn, nR, seed=gt.childSeed(8, trial))
            self.assertEqual(oracle.queryCount, 2*nR)
            successes += np.linalg.norm(est.rTilde - hidden.r) <= eps
        self.checkSuccessRate(successes, 200, delta)

    def test_PassiveMatchesTmsv(self):
        """The passive learner has the TMSV learner's output law"""
        hidden = makeRandomUnitary(2, zMax=2.0, seed=3)
        sTilde = gt.regularize(hidden.S.data + 1e-3*np.eye(4))
        oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
        tmsvEst = gt.learnDisplacementTmsv(oracle, sTilde, 20.0, 30, seed=4)
        passiveEst = gt.learnDisplacementPassive(oracle, sTilde, 20.0, 30, seed=4)
        assert_allclose(passiveEst.rTilde, tmsvEst.rTilde, atol=1e-6)
        self.assertEqual(oracle.queryCount, 60)

    def test_MismatchBias(self):
        """An imperfect sTilde leaves the mean unbiased but inflates the noise"""
        hidden = makeRandomUnitary(1, zMax=2.0, seed=5)
        sTilde = gt.regularize(hidden.S.data + 1e-2*np.eye(2))
        oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
        est = gt.learnDisplacementTmsv(oracle, sTilde, 10.0, 1, seed=1, sampler=gt.ExactSampler())
        assert_allclose(est.rTilde, hidden.r, atol=1e-9)

    def test_InvalidArguments(self):
        hidden = makeRandomUnitary(2, seed=1)
        oracle = gt.UnitaryOracle(hidden, nBarIn=1e4)
        with self.assertRaises(gt.DimensionError):
            gt.learnDisplacementTmsv(oracle, gt.randomSymplectic(1, 2.0, seed=1), 10.0, 5, seed=1)
        with self.assertRaises(gt.DomainError):
            gt.learnDisplacementTmsv(oracle, hidden.S, 10.0, 0, seed=1)
        small = gt.UnitaryOracle(hidden, nBarIn=10.0)
        with self.assertRaises(gt.EnergyConstraintError):
            gt.learnDisplacementTmsv(small, hidden.S, 10.0, 5, seed=1)
        self.assertEqual(small.queryCount, 0)


if __name__ == "__main__":
    unittest.main()
