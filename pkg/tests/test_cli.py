from __future__ import absolute_import, division, print_function
import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

import gausstomo as gt
from gausstomo.cli import main


class TestCli(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmpdir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def runMain(self, *argv):
        """Run the command line; return the exit code and captured stdout"""
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = main([str(arg) for arg in argv])
        return code, out.getvalue()

    def checkError(self, code, *argv):
        with self.assertLogs("gausstomo.cli", level="ERROR"):
            self.assertEqual(self.runMain(*argv)[0], code)

    def writeConfig(self, instance, trials=3):
        path = self.tmpdir/"experiment.json"
        path.write_text(json.dumps({
            "schema": gt.CONFIG_SCHEMA,
            "problem": {"m": 1, "z": 2.0, "nBar": 1.0, "nBarIn": 1e4, "epsilon": 0.5, "delta": 0.1},
            "instance": instance,
            "trials": trials,
            "output": {"reportsDir": str(self.tmpdir/"reports")},
        }, indent=2))
        return path

    def test_Plan(self):
        code, out = self.runMain("plan", "--m", 2, "--z", 2, "--n-bar", 1, "--n-bar-in", 1e6,
                                 "--epsilon", 0.5, "--delta", 0.1)
        self.assertEqual(code, 0)
        plan = gt.QueryPlan.fromDict(json.loads(out))
        self.assertEqual(plan, gt.planQueries(2, 2.0, 1.0, 1e6, 0.5, 0.1))
        self.assertEqual(plan.nR, 69)

        code, out = self.runMain("plan", "--config", self.writeConfig({"random": {"seed": 1}}))
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["m"], 1)

        self.checkError(2, "plan", "--m", 2, "--z", 2)
        self.checkError(2, "plan", "--m", 2, "--z", 2, "--n-bar", 1, "--n-bar-in", 5, "--epsilon", 0.5,
                        "--delta", 0.1)

    def test_RunAndTables(self):
        code, out = self.runMain("gen-instance", "--m", 1, "--z", 2, "--seed", 4, "--out", self.tmpdir)
        self.assertEqual(code, 0)
        self.assertEqual([Path(p).name for p in out.split()], ["r.json", "S.json"])

        config = self.writeConfig({"explicit": {"r": "r.json", "S": "S.json"}})
        code, out = self.runMain("run", "--config", config)
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertEqual(summary["trials"], 3)
        self.assertTrue(summary["accepted"])
        self.assertTrue(summary["queryCountsMatch"])

        code, out = self.runMain("run", "--config", config, "--trials", 2, "--seed", 9, "--threads", 2)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["trials"], 2)
        self.assertEqual(len(list((self.tmpdir/"reports").glob("*/summary.json"))), 2)

        code, out = self.runMain("tables", "--out", self.tmpdir/"reports")
        self.assertEqual(code, 0)
        self.assertEqual([Path(p).name for p in out.split()], ["trials.csv", "summary.csv"])
        with open(self.tmpdir/"reports"/"trials.csv") as f:
            self.assertEqual(len(f.readlines()), 1 + 3 + 2)

        code, out = self.runMain("tables", "--out", self.tmpdir/"reports", "--format", "json")
        self.assertEqual(code, 0)
        self.assertTrue((self.tmpdir/"reports"/"tables.json").exists())

    def test_Errors(self):
        self.checkError(2, "run", "--config", self.tmpdir/"missing.json")
        bad = self.tmpdir/"bad.json"
        bad.write_text('{"schema": "gausstomo.experiment/1", "problem": {}}')
        self.checkError(2, "run", "--config", bad)
        empty = self.tmpdir/"empty"
        empty.mkdir()
        self.checkError(3, "tables", "--out", empty)
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["run", "--config", str(bad), "--threads", "0"])
        self.assertEqual(cm.exception.code, 2)

    def test_Verify(self):
        outPath = self.tmpdir/"verify"/"bounds.json"
        code, out = self.runMain("verify", "bounds", "--seed", 3, "--out", outPath)
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertTrue(doc["passed"])
        self.assertEqual(doc["seed"], 3)
        self.assertEqual([s["suite"] for s in doc["suites"]], ["bounds"])
        with open(outPath) as f:
            self.assertEqual(json.load(f), doc)

        self.checkError(2, "verify", "bounds", "everything")


if __name__ == "__main__":
    unittest.main()
