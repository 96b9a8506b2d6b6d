"""Command-line interface: plan, run, verify, tables, gen-instance
"""
from __future__ import absolute_import, division, print_function

import argparse
import json
import logging
import sys
from pathlib import Path

from .base import ConfigError, GaussTomoError, PlanningError
from .bounds import DISP_VARIANTS, SYM_VARIANTS, planQueries
from .harness import ExperimentConfig, emitTables, runExperiment, writeInstance
from .suites import SUITE_NAMES, verifySuite
from .tomography import ACCOUNTING_MODES

__all__ = ["makeParser", "main"]

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer; got {}".format(text))
    return value


def _positiveInt(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1; got {}".format(text))
    return value


def makeParser():
    parser = argparse.ArgumentParser(
        prog="gausstomo", description="Simulate learning of Gaussian unitaries from oracle queries")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level")
    parser.add_argument("--debug", action="store_true", help="log numerical detail at DEBUG level")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    plan = sub.add_parser("plan", help="print the query plan for a set of parameters")
    plan.add_argument("--config", type=Path, help="take the parameters from an experiment config")
    plan.add_argument("--m", type=int)
    plan.add_argument("--z", type=float)
    plan.add_argument("--n-bar", type=float, dest="nBar")
    plan.add_argument("--n-bar-in", type=float, dest="nBarIn")
    plan.add_argument("--epsilon", type=float)
    plan.add_argument("--delta", type=float)
    plan.add_argument("--sym-variant", choices=SYM_VARIANTS, default="vacuumShared", dest="symVariant")
    plan.add_argument("--disp-variant", choices=DISP_VARIANTS, default="tmsv", dest="dispVariant")

    run = sub.add_parser("run", help="run the trials of an experiment config")
    run.add_argument("--config", type=Path, required=True)
    run.add_argument("--seed", type=_seed, help="override masterSeed")
    run.add_argument("--trials", type=_positiveInt)
    run.add_argument("--threads", type=_positiveInt, default=1)
    run.add_argument("--out", type=Path, help="override output.reportsDir")
    run.add_argument("--accounting", choices=ACCOUNTING_MODES)

    verify = sub.add_parser("verify", help="run property suites")
    verify.add_argument("suites", nargs="*", metavar="suite",
                        help="suites to run (default: all of {})".format(", ".join(SUITE_NAMES)))
    verify.add_argument("--seed", type=_seed, default=0)
    verify.add_argument("--out", type=Path, help="write the pass/fail table as JSON to this file")

    tables = sub.add_parser("tables", help="aggregate persisted trial reports")
    tables.add_argument("--out", type=Path, required=True, help="reports directory")
    tables.add_argument("--format", choices=("csv", "json"), default="csv")

    gen = sub.add_parser("gen-instance", help="write a random (r, S) instance")
    gen.add_argument("--m", type=_positiveInt, required=True)
    gen.add_argument("--z", type=float, required=True)
    gen.add_argument("--seed", type=_seed, default=0)
    gen.add_argument("--r-scale", type=float, default=1.0, dest="rScale")
    gen.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _runPlan(args):
    if args.config is not None:
        config = ExperimentConfig.fromJson(args.config)
        plan = config.plan()
    else:
        missing = [name for name in ("m", "z", "nBar", "nBarIn", "epsilon", "delta")
                   if getattr(args, name) is None]
        if missing:
            raise ConfigError("plan needs --config or all of the problem parameters; missing {}".format(
                missing))
        plan = planQueries(args.m, args.z, args.nBar, args.nBarIn, args.epsilon, args.delta,
                           args.symVariant, args.dispVariant)
    _emit(plan.toDict())
    return EXIT_OK


def _runRun(args):
    config = ExperimentConfig.fromJson(args.config).withOverrides(
        masterSeed=args.seed, trials=args.trials, accounting=args.accounting,
        reportsDir=None if args.out is None else str(args.out))
    summary = runExperiment(config, threads=args.threads)
    _emit(summary)
    return EXIT_OK if summary["accepted"] else EXIT_FAILED


def _runVerify(args):
    names = args.suites or list(SUITE_NAMES)
    unknown = [name for name in names if name not in SUITE_NAMES]
    if unknown:
        raise ConfigError("unknown suites {}; expected some of {}".format(unknown, list(SUITE_NAMES)))
    reports = [verifySuite(name, args.seed) for name in names]
    doc = {"seed": args.seed, "passed": all(r.passed for r in reports),
           "suites": [r.toDict() for r in reports]}
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _emit(doc)
    return EXIT_OK if doc["passed"] else EXIT_FAILED


def _runTables(args):
    for path in emitTables(args.out, args.format):
        print(path)
    return EXIT_OK


def _runGenInstance(args):
    for path in writeInstance(args.out, args.m, args.z, args.seed, rScale=args.rScale):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "plan": _runPlan,
    "run": _runRun,
    "verify": _runVerify,
    "tables": _runTables,
    "gen-instance": _runGenInstance,
}


def main(argv=None):
    """Run the command line; return the process exit code

    0 on success, 1 when a suite or the acceptance check fails, 2 for
    configuration and planning errors, 3 for other runtime errors.
    """
    args = makeParser().parse_args(argv)
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, PlanningError) as e:
        _log.error("%s", e)
        return EXIT_CONFIG
    except (GaussTomoError, OSError) as e:
        _log.error("%s: %s", type(e).__name__, e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
