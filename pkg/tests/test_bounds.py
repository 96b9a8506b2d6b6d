from __future__ import absolute_import, division, print_function
import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

import gausstomo as gt
from gausstomo.test import makeRandomUnitary, makeUnitPerturbation


class TestDiamondBounds(unittest.TestCase):

    def test_DisplacementBound(self):
        r = np.array([0.5, -1.0])
        self.assertEqual(gt.displacementDiamondBound(r, r, 3.0), 0.0)
        # nBar = 0: sin(||r1 - r2|| / sqrt(2))
        assert_allclose(gt.displacementDiamondBound([0.2, 0.0], [0.0, 0.0], 0.0), math.sin(0.2/math.sqrt(2)))
        self.assertEqual(gt.displacementDiamondBound([100.0, 0.0], [0.0, 0.0], 1.0), 1.0)
        values = [gt.displacementDiamondBound(r + t*np.array([1.0, 2.0]), r, 1.0)
                  for t in np.linspace(0.0, 2.0, 41)]
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertLess(gt.displacementDiamondBound([0.1, 0.0], [0.0, 0.0], 1.0),
                        gt.displacementDiamondBound([0.1, 0.0], [0.0, 0.0], 4.0))
        with self.assertRaises(gt.DomainError):
            gt.displacementDiamondBound(r, r, -1.0)

    def test_GFunction(self):
        assert_allclose(gt.gFunction(2.0), math.sqrt(math.pi/3) + 2.0)
        self.assertLessEqual(gt.gFunction(2.0), 4.0)

    def test_SymplecticBound(self):
        S = gt.randomSymplectic(2, 2.0, seed=1)
        self.assertEqual(gt.symplecticDiamondBound(S, S, 1.0), 0.0)
        values = []
        for t in np.linspace(0.0, 1.0, 21):
            squeeze = np.diag([math.exp(t), math.exp(-t), 1.0, 1.0])
            values.append(gt.symplecticDiamondBound(gt.SymplecticMatrix(S.data @ squeeze), S, 1.0))
        self.assertTrue(np.all(np.diff(values) >= -1e-12))
        self.assertGreater(values[-1], 0.0)
        with self.assertRaises(gt.DimensionError):
            gt.symplecticDiamondBound(S, np.eye(2), 1.0)

    def test_CombinedAtBudgets(self):
        """The planner's error budgets give a combined bound of exactly epsilon"""
        for m in (1, 2, 4):
            for z in (1.0, 2.0, 3.0, 4.0):
                for nBar in (0.5, 1.0, 10.0):
                    for nBarIn in (1e3, 1e6, 1e12):
                        for eps in (0.05, 0.5):
                            epsS = gt.symplecticBudget(m, z, nBar, nBarIn, eps)
                            epsR = gt.displacementBudget(z, nBar, eps)
                            bound = gt.combinedDiamondBound(epsS, epsR, m, z, nBar)
                            self.assertLessEqual(bound, eps*(1 + 1e-12))
                            statement = gt.combinedDiamondBound(epsS, epsR, m, z, nBar, form="statement")
                            self.assertGreater(statement, bound)

    def test_CombinedDominatesSeparateBounds(self):
        for m, seed in ((1, 1), (2, 2), (3, 3)):
            hidden = makeRandomUnitary(m, zMax=2.0, seed=seed)
            z = hidden.S.operatorNorm()
            sTilde = gt.regularize(hidden.S.data + 1e-6*makeUnitPerturbation(2*m, seed=seed))
            rTilde = hidden.r + 1e-4*np.ones(2*m)
            nBar = 2.0
            epsS = gt.operatorNorm(sTilde.data - hidden.S.data)
            epsR = float(np.linalg.norm(rTilde - hidden.r))
            separate = (gt.symplecticDiamondBound(hidden.S, sTilde, nBar)
                        + gt.displacementDiamondBound(rTilde, hidden.r, z*z*nBar))
            self.assertLessEqual(separate, gt.combinedDiamondBound(epsS, epsR, m, z, nBar))

    def test_CombinedDomain(self):
        with self.assertRaises(gt.BoundDomainError):
            gt.combinedDiamondBound(0.3, 0.0, 1, 2.0, 1.0)
        with self.assertRaises(gt.BoundDomainError):
            gt.combinedDiamondBound(-0.1, 0.0, 1, 2.0, 1.0)
        with self.assertRaises(gt.DomainError):
            gt.combinedDiamondBound(0.01, 0.0, 1, 2.0, 1.0, form="sharp")
        symTerm, dispTerm = gt.combinedBoundTerms(0.0, 0.1, 1, 1.0, 0.0)
        self.assertEqual(symTerm, 0.0)
        assert_allclose(dispTerm, math.sqrt(2)*0.1)

    def test_AdditiveToMultiplicative(self):
        assert_allclose(gt.additiveToMultiplicative(0.01, 2.0), 0.04)
        assert_allclose(gt.additiveToMultiplicative(0.01, 2.0, exact=True), 0.02/0.98)
        self.assertLess(gt.additiveToMultiplicative(0.1, 2.0, exact=True),
                        gt.additiveToMultiplicative(0.1, 2.0))
        with self.assertRaises(gt.BoundDomainError):
            gt.additiveToMultiplicative(0.25, 2.0)
        assert_allclose(gt.additiveToMultiplicative(0.25, 2.0, exact=True), 1.0)
        with self.assertRaises(gt.BoundDomainError):
            gt.additiveToMultiplicative(0.5, 2.0, exact=True)

    def test_AdditiveToMultiplicativeHolds(self):
        """||sTilde^{-1} S - 1|| stays below 2 z epsS on 500 instances"""
        rng = np.random.default_rng(4)
        for i in range(500):
            m = (1, 2, 4)[i % 3]
            z = (1.0, 2.0, 4.0)[(i // 3) % 3]
            S = gt.randomSymplectic(m, z, rng.integers(2**32))
            eps = rng.uniform(1e-8, 1e-4)
            sTilde = gt.regularize(S.data + eps*makeUnitPerturbation(2*m, seed=i))
            actual = gt.operatorNorm(sTilde.data - S.data)
            rel = gt.operatorNorm(sTilde.inverted().data @ S.data - np.eye(2*m))
            self.assertLessEqual(rel, gt.additiveToMultiplicative(actual, z))

    def test_ShotCount(self):
        self.assertEqual(gt.shotCount(0.2), 1)
        self.assertEqual(gt.shotCount(3.0), 3)
        self.assertEqual(gt.shotCount(3.01), 4)
        self.assertEqual(gt.clampBound(1.7), 1.0)
        self.assertEqual(gt.clampBound(0.25), 0.25)


if __name__ == "__main__":
    unittest.main()
