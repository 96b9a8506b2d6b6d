from __future__ import absolute_import, division, print_function
import dataclasses
import json
import unittest

import numpy as np

import gausstomo as gt
from gausstomo.test import PhaseSpaceTestCase, makeRandomUnitary


class TestLearnUnitary(PhaseSpaceTestCase):

    def test_EndToEnd(self):
        """Combined bound within epsilon at the planned query count"""
        plan = gt.planQueries(2, 2.0, 1.0, 1e6, 0.5, 0.1)
        trials = 100
        successes = 0
        for trial in range(trials):
            oracle = gt.UnitaryOracle(makeRandomUnitary(2, zMax=2.0, seed=trial), plan.nBarIn)
            dispEst, symEst, report = gt.learnUnitary(oracle, plan, gt.childSeed(2024, trial))
            self.assertIsNone(report.failure)
            self.assertEqual(report.queriesTotal, plan.nTot)
            self.assertEqual(oracle.queryCount, plan.nTot)
            self.assertEqual(report.queriesSymplectic, plan.symplecticQueries)
            self.assertEqual(report.queriesDisplacement, plan.displacementQueries)
            self.assertSymplectic(symEst.sTilde)
            successes += report.success
        self.checkSuccessRate(successes, trials, plan.delta)

    def test_Report(self):
        plan = gt.planQueries(1, 2.0, 1.0, 1e6, 0.5, 0.1)
        hidden = makeRandomUnitary(1, zMax=2.0, seed=3)
        oracle = gt.UnitaryOracle(hidden, plan.nBarIn)
        dispEst, symEst, report = gt.learnUnitary(oracle, plan, 11)
        self.assertAlmostEqual(report.epsS, gt.operatorNorm(symEst.sTilde.data - hidden.S.data))
        self.assertAlmostEqual(report.epsR, float(np.linalg.norm(dispEst.rTilde - hidden.r)))
        self.assertEqual(report.epsSBudget, plan.epsS)
        self.assertEqual(report.epsRBudget, plan.epsR)
        self.assertEqual(report.plannedTotal, plan.nTot)
        self.assertAlmostEqual(report.combinedBound, report.symplecticTerm + report.displacementTerm)
        self.assertEqual(report.success, report.combinedBound <= plan.epsilon)
        self.assertEqual(report.successSymplectic, report.epsS <= plan.epsS)
        self.assertGreaterEqual(report.deltaNorm, 0.0)
        self.assertGreaterEqual(report.deltaNormInverse, 0.0)

        sym, disp = gt.separateBoundTerms(hidden, symEst, dispEst, plan)
        self.assertLessEqual(sym + disp, report.combinedBound)

        restored = gt.TrialReport.fromDict(json.loads(json.dumps(report.toDict())))
        self.assertEqual(restored, report)

    def test_Determinism(self):
        plan = gt.planQueries(1, 2.0, 1.0, 1e4, 0.5, 0.1)
        hidden = makeRandomUnitary(1, zMax=2.0, seed=4)
        reports = []
        for i in range(2):
            _, _, report = gt.learnUnitary(gt.UnitaryOracle(hidden, plan.nBarIn), plan, gt.childSeed(5, 1))
            report.wallTime = 0.0
            reports.append(report.toDict())
        self.assertEqual(reports[0], reports[1])

    def test_Variants(self):
        for symVariant in gt.SYM_VARIANTS:
            for dispVariant in gt.DISP_VARIANTS:
                plan = gt.planQueries(1, 1.5, 1.0, 1e6, 0.5, 0.1, symVariant, dispVariant)
                oracle = gt.UnitaryOracle(makeRandomUnitary(1, zMax=1.5, seed=6), plan.nBarIn)
                _, _, report = gt.learnUnitary(oracle, plan, 6)
                self.assertIsNone(report.failure)
                self.assertEqual(report.queriesTotal, plan.nTot)

    def test_InfiniteEnergyLimit(self):
        """2m + 2 queries in total"""
        # 1e12 leaves nS near 6e9; the shot counts only reach 1 around 1e36
        for m in (1, 2, 4):
            plan = gt.planQueries(m, 2.0, 1.0, 1e36, 0.5, 0.1)
            for trial in range(3):
                oracle = gt.UnitaryOracle(makeRandomUnitary(m, zMax=2.0, seed=trial), plan.nBarIn)
                _, _, report = gt.learnUnitary(oracle, plan, trial)
                self.assertEqual(report.queriesTotal, 2*m + 2)

    def test_StageFailure(self):
        """A failing stage is recorded, not raised"""
        plan = gt.planQueries(1, 2.0, 1.0, 1e6, 0.5, 0.1)
        noisy = dataclasses.replace(plan, eta=1e-3, nS=1)
        oracle = gt.UnitaryOracle(makeRandomUnitary(1, zMax=2.0, seed=7), plan.nBarIn)
        with self.assertLogs("gausstomo.tomography", level="WARNING"):
            dispEst, symEst, report = gt.learnUnitary(oracle, noisy, 7)
        self.assertIsNone(dispEst)
        self.assertIsNone(symEst)
        self.assertEqual(report.failure, "regularizationDomain")
        self.assertFalse(report.success)
        self.assertIsNone(report.combinedBound)
        self.assertEqual(report.queriesTotal, 3)

        with self.assertRaises(gt.DimensionError):
            gt.learnUnitary(gt.UnitaryOracle(makeRandomUnitary(2, seed=1), 1e6), plan, 1)


if __name__ == "__main__":
    unittest.main()
