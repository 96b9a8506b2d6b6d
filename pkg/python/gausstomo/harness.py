"""Experiment configuration, parallel Monte-Carlo trials and result tables
"""
from __future__ import absolute_import, division, print_function

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import multiprocessing
import os
import re
import tempfile
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.stats

from .base import SYMPLECTIC_TOL, SQRT_TOL, SQRT_MAX_ITER, ConfigError, ReportError, PlanningError
from .bounds import SYM_VARIANTS, DISP_VARIANTS, QueryPlan, planQueries
from .measurement import ExactSampler, GaussianSampler, childSeed
from .phaseSpace import GaussianUnitary
from .symplectic import SymplecticMatrix, isSymplectic, operatorNorm, randomSymplectic
from .tomography import ACCOUNTING_MODES, TrialReport, UnitaryOracle, learnUnitary

__all__ = ["CONFIG_SCHEMA", "SUMMARY_SCHEMA", "TABLES_SCHEMA", "ProblemParameters", "ExperimentConfig",
           "readArray", "writeArray", "writeInstance", "runTrial", "runExperiment", "summarize",
           "clopperPearson", "acceptanceThreshold", "emitTables"]

_log = logging.getLogger(__name__)

CONFIG_SCHEMA = "gausstomo.experiment/1"
SUMMARY_SCHEMA = "gausstomo.summary/1"
TABLES_SCHEMA = "gausstomo.tables/1"

_TOP_KEYS = ("schema", "problem", "instance", "protocol", "trials", "masterSeed", "accounting",
             "output", "tolerances", "sampler")
_PROBLEM_KEYS = ("m", "z", "nBar", "nBarIn", "epsilon", "delta")
_SAMPLERS = ("shots", "exact")


def _lineOf(text, key):
    """1-based line of the first occurrence of key as a JSON object key, or None"""
    if text is None:
        return None
    match = re.search(r'"{}"\s*:'.format(re.escape(key)), text)
    return None if match is None else text.count("\n", 0, match.start()) + 1


class _Validator(object):
    """Build line-precise ConfigErrors for one JSON document"""

    def __init__(self, text, source):
        self.text = text
        self.source = source

    def error(self, key, message):
        line = _lineOf(self.text, key) if key is not None else None
        where = self.source if line is None else "{}:{}".format(self.source, line)
        return ConfigError("{}: {}".format(where, message))

    def mapping(self, data, key, allowed, required=()):
        if not isinstance(data, dict):
            raise self.error(key, "{!r} must be a JSON object".format(key))
        for name in data:
            if name not in allowed:
                raise self.error(name, "unknown key {!r} in {!r}".format(name, key))
        for name in required:
            if name not in data:
                raise self.error(key, "missing required key {!r} in {!r}".format(name, key))
        return data

    def number(self, data, key, low=None, high=None, integer=False, lowOpen=False, highOpen=False):
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise self.error(key, "{!r} must be a finite number".format(key))
        if integer and int(value) != value:
            raise self.error(key, "{!r} must be an integer".format(key))
        if low is not None and (value < low or (lowOpen and value == low)):
            raise self.error(key, "{!r} = {} is below its lower limit {}".format(key, value, low))
        if high is not None and (value > high or (highOpen and value == high)):
            raise self.error(key, "{!r} = {} is above its upper limit {}".format(key, value, high))
        return int(value) if integer else float(value)

    def choice(self, data, key, choices):
        value = data[key]
        if value not in choices:
            raise self.error(key, "{!r} must be one of {}; got {!r}".format(key, list(choices), value))
        return value


@dataclass(frozen=True)
class ProblemParameters:
    m: int
    z: float
    nBar: float
    nBarIn: float
    epsilon: float
    delta: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a Monte-Carlo experiment

    Load with `fromJson` or `fromDict`; `toDict` gives the canonical JSON
    layout, and `configHash` keys the persisted reports.
    """
    problem: ProblemParameters
    instanceKind: str = "random"
    instanceSeed: int = 0
    rScale: float = 1.0
    rPath: str = None
    sPath: str = None
    symVariant: str = "vacuumShared"
    dispVariant: str = "tmsv"
    trials: int = 1
    masterSeed: int = 0
    accounting: str = "paper"
    reportsDir: str = "reports"
    symplecticTol: float = SYMPLECTIC_TOL
    sqrtTol: float = SQRT_TOL
    sqrtMaxIter: int = SQRT_MAX_ITER
    sampler: str = "shots"

    @classmethod
    def fromJson(cls, path):
        """Load and validate a configuration file

        Raises
        ------
        ConfigError
            On I/O or syntax errors, unknown keys, missing keys or
            out-of-range values; the message names the line.
        """
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError("cannot read config {}: {}".format(path, e))
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("{}:{}:{}: {}".format(path, e.lineno, e.colno, e.msg))
        return cls.fromDict(data, text=text, source=str(path), baseDir=path.parent)

    @classmethod
    def fromDict(cls, data, text=None, source="<config>", baseDir=None):
        check = _Validator(text, source)
        check.mapping(data, "config", _TOP_KEYS, required=("schema", "problem", "instance"))
        if data["schema"] != CONFIG_SCHEMA:
            raise check.error("schema", "unsupported schema {!r}; expected {!r}".format(
                data["schema"], CONFIG_SCHEMA))

        prob = check.mapping(data["problem"], "problem", _PROBLEM_KEYS, required=_PROBLEM_KEYS)
        problem = ProblemParameters(
            m=check.number(prob, "m", low=1, integer=True),
            z=check.number(prob, "z", low=1),
            nBar=check.number(prob, "nBar", low=0, lowOpen=True),
            nBarIn=check.number(prob, "nBarIn", low=0, lowOpen=True),
            epsilon=check.number(prob, "epsilon", low=0, high=1, lowOpen=True, highOpen=True),
            delta=check.number(prob, "delta", low=0, high=1, lowOpen=True, highOpen=True),
        )
        kwargs = {"problem": problem}

        inst = check.mapping(data["instance"], "instance", ("random", "explicit"))
        if len(inst) != 1:
            raise check.error("instance", "'instance' must hold exactly one of 'random' or 'explicit'")
        if "random" in inst:
            rand = check.mapping(inst["random"], "random", ("seed", "rScale"), required=("seed",))
            kwargs.update(instanceKind="random", instanceSeed=check.number(rand, "seed", low=0, integer=True))
            if "rScale" in rand:
                kwargs["rScale"] = check.number(rand, "rScale", low=0)
        else:
            expl = check.mapping(inst["explicit"], "explicit", ("r", "S"), required=("r", "S"))
            base = Path(baseDir) if baseDir is not None else Path(".")
            kwargs.update(instanceKind="explicit",
                          rPath=str((base/expl["r"]).resolve()), sPath=str((base/expl["S"]).resolve()))

        if "protocol" in data:
            proto = check.mapping(data["protocol"], "protocol", ("symVariant", "dispVariant"))
            if "symVariant" in proto:
                kwargs["symVariant"] = check.choice(proto, "symVariant", SYM_VARIANTS)
            if "dispVariant" in proto:
                kwargs["dispVariant"] = check.choice(proto, "dispVariant", DISP_VARIANTS)
        if "trials" in data:
            kwargs["trials"] = check.number(data, "trials", low=1, integer=True)
        if "masterSeed" in data:
            kwargs["masterSeed"] = check.number(data, "masterSeed", low=0, integer=True)
        if "accounting" in data:
            kwargs["accounting"] = check.choice(data, "accounting", ACCOUNTING_MODES)
        if "sampler" in data:
            kwargs["sampler"] = check.choice(data, "sampler", _SAMPLERS)
        if "output" in data:
            out = check.mapping(data["output"], "output", ("reportsDir",))
            if "reportsDir" in out:
                kwargs["reportsDir"] = str(out["reportsDir"])
        if "tolerances" in data:
            tols = check.mapping(data["tolerances"], "tolerances",
                                 ("symplecticTol", "sqrtTol", "sqrtMaxIter"))
            for key in ("symplecticTol", "sqrtTol"):
                if key in tols:
                    kwargs[key] = check.number(tols, key, low=0, lowOpen=True)
            if "sqrtMaxIter" in tols:
                kwargs["sqrtMaxIter"] = check.number(tols, "sqrtMaxIter", low=1, integer=True)

        config = cls(**kwargs)
        if config.instanceKind == "explicit":
            try:
                config.loadInstance()
            except (OSError, ValueError) as e:
                raise check.error("explicit", str(e))
        return config

    def toDict(self):
        if self.instanceKind == "random":
            instance = {"random": {"seed": self.instanceSeed, "rScale": self.rScale}}
        else:
            instance = {"explicit": {"r": self.rPath, "S": self.sPath}}
        return {
            "schema": CONFIG_SCHEMA,
            "problem": dataclasses.asdict(self.problem),
            "instance": instance,
            "protocol": {"symVariant": self.symVariant, "dispVariant": self.dispVariant},
            "trials": self.trials,
            "masterSeed": self.masterSeed,
            "accounting": self.accounting,
            "output": {"reportsDir": self.reportsDir},
            "tolerances": {"symplecticTol": self.symplecticTol, "sqrtTol": self.sqrtTol,
                           "sqrtMaxIter": self.sqrtMaxIter},
            "sampler": self.sampler,
        }

    def configHash(self):
        """Short digest of everything except the output location"""
        canon = self.toDict()
        del canon["output"]
        return hashlib.sha256(json.dumps(canon, sort_keys=True).encode()).hexdigest()[:16]

    def withOverrides(self, **overrides):
        """Return a copy with the non-None overrides applied"""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def plan(self):
        p = self.problem
        return planQueries(p.m, p.z, p.nBar, p.nBarIn, p.epsilon, p.delta, self.symVariant, self.dispVariant)

    def loadInstance(self):
        """Read and check an explicit instance

        Raises
        ------
        ConfigError
            If the shapes are wrong or S is not symplectic at symplecticTol.
        """
        r = np.asarray(readArray(self.rPath), dtype=float)
        S = np.asarray(readArray(self.sPath), dtype=float)
        dim = 2*self.problem.m
        if r.shape != (dim,) or S.shape != (dim, dim):
            raise ConfigError("explicit instance has shapes r{} S{}; expected ({},) and ({}, {})".format(
                r.shape, S.shape, dim, dim, dim))
        if not isSymplectic(S, self.symplecticTol):
            raise ConfigError("explicit S in {} is not symplectic at tolerance {}".format(
                self.sPath, self.symplecticTol))
        if operatorNorm(S) > self.problem.z*(1.0 + 1e-12):
            _log.warning("explicit S has norm %.6g above z = %.6g", operatorNorm(S), self.problem.z)
        return GaussianUnitary(r, SymplecticMatrix(S, check=False))

    def makeInstance(self, trialIndex):
        """Hidden unitary of one trial

        Random instances draw S from stream ``(instanceSeed, trialIndex, 0)``
        and r from ``(instanceSeed, trialIndex, 1)``.
        """
        if self.instanceKind == "explicit":
            return self.loadInstance()
        seq = childSeed(self.instanceSeed, trialIndex)
        S = randomSymplectic(self.problem.m, self.problem.z, childSeed(seq, 0))
        r = self.rScale*np.random.default_rng(childSeed(seq, 1)).standard_normal(2*self.problem.m)
        return GaussianUnitary(r, S)

    def makeSampler(self):
        return ExactSampler() if self.sampler == "exact" else GaussianSampler()


def readArray(path):
    """Read a row-major array from JSON (nested lists) or CSV"""
    path = Path(path)
    if path.suffix == ".csv":
        return np.loadtxt(path, delimiter=",", ndmin=1)
    with open(path) as f:
        return np.array(json.load(f), dtype=float)


def writeArray(path, arr):
    """Write an array as nested JSON lists; floats use their shortest exact repr"""
    _writeTextAtomic(Path(path), json.dumps(np.asarray(arr, dtype=float).tolist()))


def _writeTextAtomic(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmpName = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmpName, str(path))
    except BaseException:
        if os.path.exists(tmpName):
            os.unlink(tmpName)
        raise


def _writeJsonAtomic(path, obj):
    _writeTextAtomic(Path(path), json.dumps(obj, indent=2, sort_keys=True) + "\n")


def writeInstance(outDir, m, zMax, seed, rScale=1.0):
    """Draw a random instance and write ``r.json`` and ``S.json`` into outDir"""
    outDir = Path(outDir)
    S = randomSymplectic(m, zMax, childSeed(seed, 0))
    r = rScale*np.random.default_rng(childSeed(seed, 1)).standard_normal(2*m)
    rPath, sPath = outDir/"r.json", outDir/"S.json"
    writeArray(rPath, r)
    writeArray(sPath, S.data)
    return rPath, sPath


def runTrial(config, trialIndex, plan=None):
    """Run one trial: build the instance and oracle, learn, and score

    The trial's stream is ``(masterSeed, trialIndex)``, so the result does
    not depend on which worker runs it.
    """
    plan = config.plan() if plan is None else plan
    hidden = config.makeInstance(trialIndex)
    oracle = UnitaryOracle(hidden, config.problem.nBarIn, accounting=config.accounting)
    _, _, report = learnUnitary(oracle, plan, childSeed(config.masterSeed, trialIndex),
                                sampler=config.makeSampler(), tol=config.symplecticTol,
                                sqrtTol=config.sqrtTol, maxIter=config.sqrtMaxIter)
    report.trialIndex = int(trialIndex)
    report.seed = [config.masterSeed, int(trialIndex)]
    _log.info("trial %d: success=%s epsS=%s epsR=%s queries=%d", trialIndex, report.success,
              report.epsS, report.epsR, report.queriesTotal)
    return report


def _trialPath(outDir, trialIndex):
    return Path(outDir)/"trial-{:06d}.json".format(trialIndex)


def _executeTrial(args):
    config, plan, trialIndex, outDir = args
    report = runTrial(config, trialIndex, plan=plan)
    if outDir is not None:
        _writeJsonAtomic(_trialPath(outDir, trialIndex), report.toDict())
    return report


def runExperiment(config, threads=1, write=True):
    """Run all trials of an experiment and return the summary

    Trials are distributed over ``threads`` worker processes; the summary
    is independent of the number of workers. With write=True the config,
    every trial report and the summary are written under
    ``reportsDir/<configHash>/``.

    Returns
    -------
    summary : `dict`
    """
    plan = config.plan()
    outDir = Path(config.reportsDir)/config.configHash() if write else None
    if outDir is not None:
        _writeJsonAtomic(outDir/"config.json", {"configHash": config.configHash(), "config": config.toDict(),
                                                "plan": plan.toDict()})
    tasks = [(config, plan, i, outDir) for i in range(config.trials)]
    _log.info("running %d trials on %d worker(s); nTot=%d per trial", config.trials, threads, plan.nTot)
    if threads > 1 and config.trials > 1:
        with multiprocessing.Pool(processes=min(threads, config.trials)) as pool:
            reports = pool.map(_executeTrial, tasks, chunksize=1)
    else:
        reports = [_executeTrial(task) for task in tasks]
    summary = summarize(config, plan, reports)
    if outDir is not None:
        _writeJsonAtomic(outDir/"summary.json", summary)
    return summary


def clopperPearson(successes, trials, confidence=0.95):
    """Exact binomial confidence interval for a success probability"""
    alpha = 1.0 - confidence
    lower = 0.0 if successes == 0 else float(scipy.stats.beta.ppf(alpha/2, successes, trials - successes + 1))
    upper = 1.0 if successes == trials else float(scipy.stats.beta.ppf(1 - alpha/2, successes + 1,
                                                                        trials - successes))
    return lower, upper


def acceptanceThreshold(delta, trials):
    """``1 - delta`` minus three binomial standard errors"""
    return 1.0 - delta - 3.0*math.sqrt(delta*(1.0 - delta)/trials)


def _stats(values):
    values = [v for v in values if v is not None]
    if not values:
        return None
    arr = np.asarray(values, dtype=float)
    return {"mean": float(arr.mean()), "p50": float(np.percentile(arr, 50)),
            "p90": float(np.percentile(arr, 90)), "p99": float(np.percentile(arr, 99)),
            "max": float(arr.max())}


def summarize(config, plan, reports):
    """Aggregate trial reports into a summary dictionary"""
    n = len(reports)
    k = sum(1 for r in reports if r.success)
    lower, upper = clopperPearson(k, n)
    threshold = acceptanceThreshold(config.problem.delta, n)
    finished = [r for r in reports if r.failure is None]
    return {
        "schema": SUMMARY_SCHEMA,
        "configHash": config.configHash(),
        "trials": n,
        "successes": k,
        "successRate": k/n,
        "confidenceLevel": 0.95,
        "confidenceInterval": [lower, upper],
        "acceptanceThreshold": threshold,
        "accepted": k/n >= threshold,
        "successSymplecticRate": sum(1 for r in reports if r.successSymplectic)/n,
        "successDisplacementRate": sum(1 for r in reports if r.successDisplacement)/n,
        "epsS": _stats(r.epsS for r in reports),
        "epsR": _stats(r.epsR for r in reports),
        "combinedBound": _stats(r.combinedBound for r in reports),
        "failures": dict(sorted(Counter(r.failure for r in reports if r.failure).items())),
        "totalQueries": sum(r.queriesTotal for r in reports),
        "plannedTotalPerTrial": plan.nTot,
        "queryCountsMatch": all(r.queriesTotal == plan.nTot for r in finished),
        "plan": plan.toDict(),
    }


_TRIAL_COLUMNS = ("configHash", "trialIndex", "seed", "failure", "success", "successSymplectic",
                  "successDisplacement", "epsS", "epsR", "epsSBudget", "epsRBudget", "combinedBound",
                  "symplecticTerm", "displacementTerm", "deltaNorm", "deltaNormInverse", "queriesSymplectic",
                  "queriesDisplacement", "queriesTotal", "plannedTotal", "wallTime")
_SUMMARY_COLUMNS = ("configHash", "trials", "successes", "successRate", "ciLower", "ciUpper",
                    "acceptanceThreshold", "accepted", "epsSMean", "epsSP90", "epsRMean", "epsRP90",
                    "totalQueries", "plannedTotalPerTrial", "queryCountsMatch")


def _loadJson(path):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, ValueError) as e:
        raise ReportError("cannot read report {}: {}".format(path, e))


def _loadRun(runDir):
    meta = _loadJson(runDir/"config.json")
    try:
        config = ExperimentConfig.fromDict(meta["config"], source=str(runDir/"config.json"))
        plan = QueryPlan.fromDict(meta["plan"])
    except (KeyError, ConfigError, PlanningError, TypeError) as e:
        raise ReportError("corrupt run metadata in {}: {}".format(runDir, e))
    reports = []
    for i in range(config.trials):
        path = _trialPath(runDir, i)
        if not path.exists():
            raise ReportError("missing trial report {}".format(path))
        try:
            reports.append(TrialReport.fromDict(_loadJson(path)))
        except TypeError as e:
            raise ReportError("corrupt trial report {}: {}".format(path, e))
    return config, plan, reports


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, list):
        return ":".join(str(v) for v in value)
    return value


def emitTables(reportsDir, format="csv"):
    """Aggregate persisted trial reports into flat tables

    Writes ``trials.csv`` (one row per trial) and ``summary.csv`` (one row
    per config hash), or a single ``tables.json``, into reportsDir.
    Re-emission from the same reports is byte-identical.

    Returns
    -------
    paths : `list` of `pathlib.Path`

    Raises
    ------
    ReportError
        If no runs are found or a report is missing or corrupt.
    """
    reportsDir = Path(reportsDir)
    runDirs = sorted(p.parent for p in reportsDir.glob("*/config.json"))
    if not runDirs:
        raise ReportError("no experiment runs found under {}".format(reportsDir))
    runs = []
    for runDir in runDirs:
        config, plan, reports = _loadRun(runDir)
        runs.append((config, plan, reports, summarize(config, plan, reports)))

    if format == "json":
        doc = {"schema": TABLES_SCHEMA, "runs": [
            {"configHash": summary["configHash"], "config": config.toDict(), "summary": summary,
             "trials": [dict(r.toDict(), configHash=summary["configHash"]) for r in reports]}
            for config, plan, reports, summary in runs]}
        path = reportsDir/"tables.json"
        _writeJsonAtomic(path, doc)
        return [path]
    if format != "csv":
        raise ConfigError("format must be 'csv' or 'json'; got {!r}".format(format))

    trialBuf = io.StringIO()
    writer = csv.writer(trialBuf, lineterminator="\n")
    writer.writerow(_TRIAL_COLUMNS)
    summaryBuf = io.StringIO()
    summaryWriter = csv.writer(summaryBuf, lineterminator="\n")
    summaryWriter.writerow(_SUMMARY_COLUMNS)
    for config, plan, reports, summary in runs:
        for r in reports:
            row = dict(r.toDict(), configHash=summary["configHash"])
            writer.writerow([_cell(row[c]) for c in _TRIAL_COLUMNS])
        epsS = summary["epsS"] or {}
        epsR = summary["epsR"] or {}
        summaryWriter.writerow([_cell(v) for v in (
            summary["configHash"], summary["trials"], summary["successes"], summary["successRate"],
            summary["confidenceInterval"][0], summary["confidenceInterval"][1],
            summary["acceptanceThreshold"],
            summary["accepted"], epsS.get("mean"), epsS.get("p90"), epsR.get("mean"), epsR.get("p90"),
            summary["totalQueries"], summary["plannedTotalPerTrial"], summary["queryCountsMatch"])])
    trialPath, summaryPath = reportsDir/"trials.csv", reportsDir/"summary.csv"
    _writeTextAtomic(trialPath, trialBuf.getvalue())
    _writeTextAtomic(summaryPath, summaryBuf.getvalue())
    return [trialPath, summaryPath]
