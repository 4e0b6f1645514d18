"""Command-line front end.

    ttp-bench --instance FILE [--algo cosolver2b|rls|ea|oracle] [--fit first|best] ...
    ttp-bench --dir DIR [--both-fits] [--out PREFIX] ...
    ttp-bench verify [--tiny-count N]

Exit codes: 0 success, 2 input error, 3 capability error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (ALGORITHMS, default_time_budget, format_solution, records_to_csv,
                    records_to_json, render, run_instance, run_suite, verify)
from .construction import parse_tour
from .cosolver import BEST_FIT, FIRST_FIT, SolverConfig
from .errors import ExternalTourInvalid, InstanceFormatError, InstanceTooLarge
from .instance import load_instance
from .neighborhoods import DEFAULT_KNN_K

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPABILITY = 3
EXIT_VERIFY = 4

log = logging.getLogger("ttp_cosolver")


def _run_parser():
    p = argparse.ArgumentParser(prog="ttp-bench", description="Travelling Thief Problem solver")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", type=Path, help="single TTP instance file")
    src.add_argument("--dir", type=Path, help="directory of .ttp instances to run as a suite")
    p.add_argument("--algo", choices=ALGORITHMS, default="cosolver2b")
    p.add_argument("--fit", choices=(FIRST_FIT, BEST_FIT), default=BEST_FIT)
    p.add_argument("--both-fits", action="store_true",
                   help="suite mode: run Cosolver2B with first and best fit side by side")
    p.add_argument("--time-budget", type=float, default=None,
                   help="seconds per run (default 600, or $TTP_TIME_BUDGET)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--candidates", choices=("delaunay", "knn"), default="delaunay")
    p.add_argument("--knn-k", type=int, default=DEFAULT_KNN_K)
    p.add_argument("--tour-file", type=Path, help="initial tour (single-instance mode)")
    p.add_argument("--max-steps", type=int, default=None, help="step cap for rls/ea")
    p.add_argument("--repeats", type=int, default=1,
                   help="seeds per randomized baseline run; best is reported")
    p.add_argument("--jobs", type=int, default=1, help="suite mode: parallel worker processes")
    p.add_argument("--out", type=Path,
                   help="solution file (single run) or report prefix (suite: PREFIX.csv/.json)")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _verify_parser():
    p = argparse.ArgumentParser(prog="ttp-bench verify",
                                description="run the solver's property suites")
    p.add_argument("--tiny-count", type=int, default=50,
                   help="random tiny instances checked against the exhaustive oracle")
    p.add_argument("--probes", type=int, default=1000, help="delta-evaluation probes")
    p.add_argument("--seed", type=int, default=0)
    return p


def _config(args, fit=None, tour=None):
    budget = args.time_budget if args.time_budget is not None else default_time_budget()
    return SolverConfig(fit=fit or args.fit, time_budget=budget, seed=args.seed,
                        candidates=args.candidates, knn_k=args.knn_k,
                        max_steps=args.max_steps, external_tour=tour)


def run_single(args, stdout=None):
    stdout = stdout or sys.stdout
    inst = load_instance(args.instance)
    tour = None
    if args.tour_file is not None:
        tour = parse_tour(args.tour_file.read_text(), inst.n)
    record, result = run_instance(inst, args.algo, _config(args, tour=tour), args.repeats)
    if not record.instance:
        record.instance = args.instance.stem
    solution = format_solution(result)
    if args.out is not None:
        args.out.write_text(solution)
    else:
        stdout.write(solution)
    stdout.write(render([record], args.format))
    return record, result


def run_dir(args, stdout=None):
    stdout = stdout or sys.stdout
    fits = (FIRST_FIT, BEST_FIT) if args.both_fits else (args.fit,)
    configs = [_config(args, fit=f) for f in fits]
    records = run_suite(args.dir, (args.algo,), configs, args.repeats, args.jobs)
    prefix = args.out if args.out is not None else Path("ttp_report")
    Path(f"{prefix}.csv").write_text(records_to_csv(records))
    Path(f"{prefix}.json").write_text(records_to_json(records))
    stdout.write(render(records, args.format))
    return records


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "verify":
        args = _verify_parser().parse_args(argv[1:])
        outcomes = verify(args.tiny_count, args.probes, args.seed)
        return EXIT_OK if all(o.passed for o in outcomes) else EXIT_VERIFY

    parser = _run_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.instance is not None:
            run_single(args)
        else:
            records = run_dir(args)
            if all(r.status != "ok" for r in records):
                log.error("every instance in %s failed", args.dir)
                return EXIT_INPUT
    except InstanceTooLarge as exc:
        log.error("%s", exc)
        return EXIT_CAPABILITY
    except (OSError, InstanceFormatError, ExternalTourInvalid, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
