from __future__ import absolute_import, division, print_function
import json
import unittest

import gausstomo as gt


class TestVerifySuites(unittest.TestCase):

    def checkSuite(self, name):
        report = gt.verifySuite(name, seed=0)
        self.assertEqual(report.name, name)
        self.assertGreater(len(report.rows), 0)
        failed = [row.toDict() for row in report.rows if not row.passed]
        self.assertTrue(report.passed, "suite {} failed: {}".format(name, failed))
        doc = json.loads(json.dumps(report.toDict()))
        self.assertTrue(doc["passed"])
        for row in doc["rows"]:
            self.assertGreaterEqual(row["margin"], 0.0)

    def test_Symplectic(self):
        self.checkSuite("symplectic")

    def test_Sqrt(self):
        self.checkSuite("sqrt")

    def test_Regularize(self):
        self.checkSuite("regularize")

    def test_Moments(self):
        with self.assertLogs("gausstomo.suites", level="WARNING"):
            self.checkSuite("moments")

    def test_Passive(self):
        self.checkSuite("passive")

    def test_Heterodyne(self):
        self.checkSuite("heterodyne")

    def test_Bounds(self):
        self.checkSuite("bounds")

    def test_Names(self):
        self.assertEqual(set(gt.SUITE_NAMES),
                         {"symplectic", "sqrt", "regularize", "moments", "passive", "heterodyne", "bounds"})
        with self.assertRaises(gt.DomainError):
            gt.verifySuite("everything")

    def test_SuiteRow(self):
        row = gt.SuiteRow("check", 0.5, 1.0)
        self.assertTrue(row.passed)
        self.assertEqual(row.margin, 0.5)
        row = gt.SuiteRow("check", 0.5, 1.0, atLeast=True)
        self.assertFalse(row.passed)
        self.assertEqual(row.margin, -0.5)
        report = gt.SuiteReport("demo", 0)
        report.add("a", 1.0, 2.0)
        self.assertTrue(report.passed)
        report.add("b", 3.0, 2.0)
        self.assertFalse(report.passed)


if __name__ == "__main__":
    unittest.main()
