"""Command line entry point: ``morop run | analyze | scenarios bin-normal | report``.

Exit codes: 0 ok, 2 configuration/input error, 3 model failure,
4 no feasible solution.  Errors are also printed to stderr as one JSON
object.  ``MOROP_SEED``, ``MOROP_SAMPLES``, ``MOROP_THREADS`` and
``MOROP_OUT`` override the configuration file; command line flags override
both.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .core import ModelError
from .nsga2 import NoFeasibleSolution
from .pipeline import ConfigError, analyze_archive, load_config, rederive_summary, run_pipeline
from .robustness import RobustnessError, bin_normal

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_INFEASIBLE = 0, 2, 3, 4
ENV_PREFIX = "MOROP_"


def _env(name: str, cast):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"environment variable {ENV_PREFIX + name}={raw!r} is not a valid {cast.__name__}")


def _overrides(args) -> dict:
    def pick(flag, env_name, cast):
        return flag if flag is not None else _env(env_name, cast)

    ov = {
        "seed": pick(args.seed, "SEED", int),
        "samples": pick(args.samples, "SAMPLES", int),
        "threads": pick(args.threads, "THREADS", int),
        "out": pick(args.out, "OUT", str),
    }
    if args.no_figures:
        ov["figures"] = False
    return ov


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, help="base seed for the optimizer and the noise samples")
    p.add_argument("--samples", type=int, help="LHS samples per solution (default 1000)")
    p.add_argument("--threads", type=int, help="worker cap for the sampling stage")
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="optimize, then assess robustness")
    _add_run_flags(p_run)

    p_an = sub.add_parser("analyze", help="assess robustness of an existing archive")
    p_an.add_argument("archive", help="CSV with an id column and one column per design variable")
    _add_run_flags(p_an)

    p_sc = sub.add_parser("scenarios", help="scenario helpers")
    sc_sub = p_sc.add_subparsers(dest="scenario_command", required=True)
    p_bin = sc_sub.add_parser("bin-normal", help="discretize a normal distribution onto equal cells")
    p_bin.add_argument("--mean", type=float, required=True)
    p_bin.add_argument("--std", type=float, required=True)
    p_bin.add_argument("--lo", type=float, required=True, help="centre of the first cell")
    p_bin.add_argument("--hi", type=float, required=True, help="centre of the last cell")
    p_bin.add_argument("--width", type=float, default=1.0)
    p_bin.add_argument("--method", choices=("density", "mass"), default="density")
    p_bin.add_argument("--parameter", help="emit a JSON scenarios block for this parameter")
    p_bin.add_argument("--decimals", type=int, help="round probabilities (renormalization is not redone)")

    p_rep = sub.add_parser("report", help="re-derive summary.json and the RF figure from CSVs")
    p_rep.add_argument("--out", required=True, help="directory holding a previous run's outputs")
    return parser


def _error(code: int, kind: str, exc: Exception) -> int:
    payload = {"error": kind, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _bin_normal(args) -> int:
    centres, h = bin_normal(args.mean, args.std, args.lo, args.hi, args.width, args.method)
    if args.decimals is not None:
        h = h.round(args.decimals)
    if args.parameter:
        block = {"scenarios": {"parameter": args.parameter, "values": centres.tolist(), "probabilities": h.tolist()}}
        print(json.dumps(block, indent=2))
    else:
        print("value,probability")
        for c, p in zip(centres, h):
            print(f"{c:.17g},{p:.17g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "scenarios":
            return _bin_normal(args)
        if args.command == "report":
            summary = rederive_summary(args.out)
            print(json.dumps({"robust_pareto": summary["robust_pareto"]}))
            return EXIT_OK
        config = load_config(args.config, **_overrides(args))
        if args.command == "run":
            report = run_pipeline(config)
        else:
            report = analyze_archive(args.archive, config)
        print(json.dumps({"out": str(report.out), "n_solutions": len(report.records),
                          "robust_pareto": report.robust_ids}))
        return EXIT_OK
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "config-error", exc)
    except NoFeasibleSolution as exc:
        return _error(EXIT_INFEASIBLE, "no-feasible-solution", exc)
    except RobustnessError as exc:
        return _error(EXIT_CONFIG, "input-error", exc)
    except ModelError as exc:
        return _error(EXIT_MODEL, getattr(exc, "code", "model-failure"), exc)


if __name__ == "__main__":
    sys.exit(main())
