from __future__ import absolute_import, division, print_function
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

import gausstomo as gt
from gausstomo.test import PhaseSpaceTestCase, makeRandomState, makeRandomUnitary


class TestGaussianState(PhaseSpaceTestCase):

    def test_StandardStates(self):
        vac = gt.vacuum(2)
        assert_array_equal(vac.mean, np.zeros(4))
        assert_array_equal(vac.cov, np.eye(4))
        self.assertEqual(gt.meanPhotonNumber(vac), 0.0)

        coh = gt.coherent([3.0, 4.0])
        self.assertEqual(coh.n, 1)
        assert_allclose(gt.meanPhotonNumber(coh), 12.5)
        # the planner charges a coherent probe of amplitude eta with eta^2 photons
        assert_allclose(gt.probePhotonNumber(coh), 25.0)

        sq = gt.singleModeSqueezed(4.0, 2, "momentum")
        assert_array_equal(sq.cov, np.diag([4.0, 0.25, 4.0, 0.25]))
        assert_array_equal(gt.singleModeSqueezed(4.0, 1, "position").cov, np.diag([0.25, 4.0]))
        assert_allclose(gt.meanPhotonNumber(sq), 2*(4.0 + 0.25 - 2.0)/4.0)
        with self.assertRaises(gt.DomainError):
            gt.singleModeSqueezed(0.5, 1)
        with self.assertRaises(gt.DomainError):
            gt.singleModeSqueezed(2.0, 1, "diagonal")

    def test_Tmsv(self):
        nu, m = 3.0, 2
        state = gt.tmsv(nu, m)
        self.assertEqual(state.n, 2*m)
        cov = state.cov
        assert_allclose(cov[:4, :4], (2*nu - 1)*np.eye(4), atol=1e-12)
        assert_allclose(cov[4:, 4:], (2*nu - 1)*np.eye(4), atol=1e-12)
        assert_allclose(cov[:4, 4:], 2*np.sqrt(nu*(nu - 1))*gt.reflection(m), atol=1e-12)
        assert_allclose(gt.meanPhotonNumber(state), 2*m*(nu - 1), rtol=1e-12)
        # a valid state, although the constructor was not asked to check
        gt.GaussianState(state.mean, state.cov)

        S = gt.tmsvSymplectic(nu, m)
        Sinv = gt.tmsvSymplectic(nu, m, inverse=True)
        assert_allclose(Sinv.data @ S.data, np.eye(8), atol=1e-12)
        assert_allclose(Sinv.data, S.inverted().data, atol=1e-12)
        with self.assertRaises(gt.DomainError):
            gt.tmsvSymplectic(0.5, 1)

    def test_Validation(self):
        with self.assertRaises(gt.DomainError):
            gt.GaussianState(np.zeros(2), 0.5*np.eye(2))
        with self.assertRaises(gt.DomainError):
            gt.GaussianState(np.zeros(2), [[1.0, 0.5], [0.0, 1.0]])
        with self.assertRaises(gt.DomainError):
            gt.GaussianState([np.nan, 0.0], np.eye(2))
        with self.assertRaises(gt.DimensionError):
            gt.GaussianState(np.zeros(2), np.eye(4))
        with self.assertRaises(gt.DimensionError):
            gt.GaussianState(np.zeros(3), np.eye(3))
        with self.assertRaises(ValueError):
            gt.vacuum(1).mean[0] = 1.0
        # squeezed vacuum saturates the uncertainty relation
        gt.GaussianState(np.zeros(2), np.diag([10.0, 0.1]))

    def test_Reduced(self):
        state = makeRandomState(3, seed=4)
        sub = state.reduced([2, 0])
        assert_array_equal(sub.mean, state.mean[[4, 5, 0, 1]])
        assert_array_equal(sub.cov, state.cov[np.ix_([4, 5, 0, 1], [4, 5, 0, 1])])
        assert_array_equal(gt.marginal(state, [1]).cov, state.cov[2:4, 2:4])
        for bad in ([], [3], [0, 0], [-1]):
            with self.assertRaises(gt.DimensionError):
                state.reduced(bad)

    def test_Persistence(self):
        self.checkPersistence(makeRandomState(2, seed=7))
        self.checkPersistence(makeRandomUnitary(2, seed=7))
        record = makeRandomState(1, seed=1).toDict()
        record["n"] = 2
        with self.assertRaises(gt.DimensionError):
            gt.GaussianState.fromDict(record)


class TestGaussianUnitary(PhaseSpaceTestCase):

    def test_ApplyForward(self):
        G = makeRandomUnitary(2, seed=3)
        state = makeRandomState(2, seed=3)
        out = G.applyForward(state)
        assert_allclose(out.mean, G.S.data @ state.mean + G.r)
        assert_allclose(out.cov, G.S.data @ state.cov @ G.S.data.T)
        self.assertStatesClose(gt.applyUnitary(G, state), out, rtol=0, atol=0)
        with self.assertRaises(gt.DimensionError):
            G.applyForward(gt.vacuum(1))

    def test_EnergyGrowth(self):
        """A squeezer of norm z multiplies the energy n + m/2 by at most z^2"""
        for m in (1, 2, 4):
            for seed in range(10):
                S = gt.randomSymplectic(m, 1.0 + seed/2.0, seed=seed)
                state = makeRandomState(m, seed=100 + seed)
                out = gt.applyUnitary(gt.GaussianUnitary(np.zeros(2*m), S), state)
                bound = S.operatorNorm()**2*(gt.meanPhotonNumber(state) + m/2.0) - m/2.0
                self.assertLessEqual(gt.meanPhotonNumber(out), bound + 1e-8)

    def test_RoundTrip(self):
        for m, seed in ((1, 1), (2, 2), (3, 3)):
            self.checkRoundTrip(makeRandomUnitary(m, zMax=3.0, seed=seed), makeRandomState(m, seed=seed),
                                atol=1e-9)

    def test_Then(self):
        """then applies self first"""
        G1 = makeRandomUnitary(2, seed=1)
        G2 = makeRandomUnitary(2, seed=2)
        state = makeRandomState(2, seed=5)
        self.assertStatesClose(G1.then(G2).applyForward(state), G2.applyForward(G1.applyForward(state)))
        with self.assertRaises(gt.DimensionError):
            G1.then(gt.GaussianUnitary.identity(1))

    def test_Inverted(self):
        G = makeRandomUnitary(2, seed=8)
        inv = G.inverted()
        assert_allclose(inv.S.data, np.linalg.inv(G.S.data), atol=1e-10)
        assert_allclose(inv.r, -np.linalg.solve(G.S.data, G.r), atol=1e-10)

    def test_Embedded(self):
        G = makeRandomUnitary(2, seed=6)
        big = G.embedded(3)
        self.assertEqual(big.m, 3)
        state = makeRandomState(3, seed=6)
        out = big.applyForward(state)
        self.assertStatesClose(out.reduced([0, 1]), G.applyForward(state.reduced([0, 1])))
        self.assertStatesClose(out.reduced([2]), state.reduced([2]), rtol=0, atol=0)
        self.assertStatesClose(gt.embedOnFirstModes(G, 3).applyForward(state), out, rtol=0, atol=0)
        with self.assertRaises(gt.DimensionError):
            G.embedded(1)

    def test_Identity(self):
        ident = gt.GaussianUnitary.identity(2)
        state = makeRandomState(2, seed=9)
        self.assertStatesClose(ident.applyForward(state), state, rtol=0, atol=0)


class TestPassivePreparation(PhaseSpaceTestCase):

    def test_Preparation(self):
        """U_S |0> equals an interferometer applied to squeezed vacua"""
        for m, seed in ((1, 1), (2, 2), (3, 3)):
            S = gt.randomSymplectic(m, 3.0, seed=seed)
            prep = gt.passivePreparation(S)
            self.assertTrue(prep.interferometer.S.isOrthogonal(tol=1e-9))
            cov = prep.squeezedState.cov
            assert_allclose(cov, np.diag(np.diag(cov)))
            target = gt.GaussianUnitary(np.zeros(2*m), S).applyForward(gt.vacuum(m))
            self.assertStatesClose(prep.prepared(), target, atol=1e-9)


if __name__ == "__main__":
    unittest.main()
