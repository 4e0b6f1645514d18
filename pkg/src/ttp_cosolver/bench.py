"""Benchmark harness: single runs, instance-directory suites, report files and
the self-verification property suites."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .construction import best_initial_plan, canonical_tour, elimination_pass, initial_tour
from .cosolver import SolverConfig, brute_force_oracle, cosolver2b, ea_baseline, rls_baseline
from .errors import InfeasiblePlan
from .evaluation import (BITFLIP, commit, delta_bitflip, delta_two_opt, evaluate_full)
from .instance import format_instance, load_instance, random_instance
from .neighborhoods import delaunay_candidates
from .verification import delaunay_edge_witness, naive_evaluate

log = logging.getLogger(__name__)

ALGORITHMS = ("cosolver2b", "rls", "ea", "oracle")
RANDOMIZED = ("rls", "ea")


def default_time_budget():
    return float(os.environ.get("TTP_TIME_BUDGET", 600.0))


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    fit: str
    objective: float | None
    runtime: float
    rounds: int
    exit_reason: str
    status: str = "ok"
    error: str = ""


def solve(inst, algo, config):
    """Dispatch a single run of ``algo``."""
    if algo == "cosolver2b":
        return cosolver2b(inst, config)
    if algo == "oracle":
        return brute_force_oracle(inst)
    if algo in RANDOMIZED:
        run = rls_baseline if algo == "rls" else ea_baseline
        return run(inst, config)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_instance(inst, algo, config, repeats=1):
    """Run ``algo`` on a parsed instance; returns ``(RunRecord, SolveResult)``."""
    if algo in RANDOMIZED and repeats > 1:
        results = [solve(inst, algo, replace(config, seed=config.seed + r))
                   for r in range(repeats)]
        result = max(results, key=lambda r: r.gain)
    else:
        result = solve(inst, algo, config)
    fit = config.fit if algo == "cosolver2b" else "-"
    record = RunRecord(inst.name, algo, fit, result.gain, result.runtime, result.rounds,
                       result.exit_reason)
    return record, result


def format_solution(result):
    """Solution artifact: 1-based tour, 0/1 plan, and the gain."""
    return (" ".join(map(str, result.tour_ids())) + "\n"
            + " ".join(map(str, result.plan_bits())) + "\n"
            + f"GAIN {result.gain:.6f}\n")


def _run_file(path, algos, configs, repeats):
    path = Path(path)
    try:
        inst = load_instance(path)
    except Exception as exc:  # noqa: BLE001 - recorded in the report
        name = path.stem
        return [RunRecord(name, algo, cfg.fit if algo == "cosolver2b" else "-", None, 0.0, 0,
                          "error", "error", f"{type(exc).__name__}: {exc}")
                for algo in algos for cfg in (configs if algo == "cosolver2b" else configs[:1])]
    name = inst.name or path.stem
    records = []
    for algo in algos:
        for cfg in (configs if algo == "cosolver2b" else configs[:1]):
            try:
                record, _ = run_instance(inst, algo, cfg, repeats)
                record.instance = name
            except Exception as exc:  # noqa: BLE001 - recorded in the report
                record = RunRecord(name, algo, cfg.fit if algo == "cosolver2b" else "-",
                                   None, 0.0, 0, "error", "error", f"{type(exc).__name__}: {exc}")
            records.append(record)
    return records


def run_suite(directory, algos=("cosolver2b",), configs=None, repeats=1, jobs=1):
    """Run every ``*.ttp`` file of ``directory``; records sorted by instance name.

    Passing two configs (first and best fit) reproduces a side-by-side
    fit comparison for Cosolver2B.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such directory: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix == ".ttp" and p.is_file())
    if not files:
        raise FileNotFoundError(f"no .ttp instances in {directory}")
    configs = list(configs or [SolverConfig()])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_run_file, files, [algos] * len(files),
                                    [configs] * len(files), [repeats] * len(files)))
    else:
        batches = [_run_file(p, algos, configs, repeats) for p in files]
    records = [r for batch in batches for r in batch]
    order = {a: i for i, a in enumerate(ALGORITHMS)}
    records.sort(key=lambda r: (r.instance, order.get(r.algorithm, 99), r.fit))
    return records


CSV_FIELDS = [f.name for f in fields(RunRecord)]


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        row = asdict(r)
        row["objective"] = "" if r.objective is None else repr(float(r.objective))
        row["runtime"] = repr(float(r.runtime))
        writer.writerow(row)
    return buf.getvalue()


def records_from_csv(text):
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(RunRecord(row["instance"], row["algorithm"], row["fit"],
                             float(row["objective"]) if row["objective"] else None,
                             float(row["runtime"]), int(row["rounds"]), row["exit_reason"],
                             row["status"], row["error"]))
    return out


def records_to_json(records):
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def records_from_json(text):
    return [RunRecord(**row) for row in json.loads(text)]


def records_to_table(records):
    """Instance rows with one objective/time column pair per algorithm and fit."""
    columns = []
    for r in records:
        key = r.algorithm if r.fit == "-" else f"{r.algorithm}-{r.fit}fit"
        if key not in columns:
            columns.append(key)
    rows = {}
    for r in records:
        key = r.algorithm if r.fit == "-" else f"{r.algorithm}-{r.fit}fit"
        rows.setdefault(r.instance, {})[key] = r
    name_w = max([len("instance")] + [len(n) for n in rows])
    head = f"{'instance':<{name_w}}" + "".join(f" | {c + ' objective':>26} {'time':>8}"
                                                for c in columns)
    lines = [head, "-" * len(head)]
    for name in sorted(rows):
        line = f"{name:<{name_w}}"
        for c in columns:
            r = rows[name].get(c)
            if r is None or r.objective is None:
                line += f" | {'n/a':>26} {'':>8}"
            else:
                line += f" | {r.objective:>26.2f} {r.runtime:>8.2f}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def render(records, fmt):
    if fmt == "csv":
        return records_to_csv(records)
    if fmt == "json":
        return records_to_json(records)
    return records_to_table(records)


# --- property suites -------------------------------------------------------

@dataclass
class CheckOutcome:
    name: str
    checked: int
    failures: int
    detail: str = ""
    counterexample: str = ""

    @property
    def passed(self):
        return self.failures == 0


def random_feasible_plan(rng, inst):
    plan = rng.random(inst.m) < 0.5
    order = rng.permutation(inst.m)
    total = float(inst.weights[plan].sum())
    for k in order:
        if total <= inst.capacity:
            break
        if plan[k]:
            plan[k] = False
            total -= inst.weights[k]
    return plan


def random_tour(rng, n):
    return canonical_tour(rng.permutation(n), n)


def _same_state(a, b):
    return (a.gain == b.gain and a.total_time == b.total_time
            and a.total_weight == b.total_weight and a.total_profit == b.total_profit
            and np.array_equal(a.tour, b.tour) and np.array_equal(a.plan, b.plan)
            and all(np.array_equal(getattr(a, f), getattr(b, f))
                    for f in ("w_reg", "w_acc", "t_reg", "t_acc", "p_reg", "p_acc", "legs")))


def check_delta_exactness(probes=1000, seed=0):
    """Previews and commits versus full re-evaluation of the mutated solution.

    Instance size grows with the probe index, so the first counterexample
    found is also a small one.
    """
    rng = np.random.default_rng(seed)
    failures = 0
    first = ""
    for t in range(probes):
        n = 2 + (t * 11) // probes
        m = (t * 17) // probes
        inst = random_instance(rng, n, m, capacity_fraction=rng.uniform(0.2, 0.8))
        state = evaluate_full(inst, random_tour(rng, n), random_feasible_plan(rng, inst))
        if m and (n < 3 or rng.random() < 0.5):
            k = int(rng.integers(m))
            pv = delta_bitflip(inst, state, k)
            plan = state.plan.copy()
            plan[k] = not plan[k]
            tour = state.tour
        elif n >= 3:
            i = int(rng.integers(1, n))
            j = int(rng.integers(i, n))
            pv = delta_two_opt(inst, state, i, j)
            tour = state.tour.copy()
            tour[i:j + 1] = tour[i:j + 1][::-1]
            plan = state.plan
        else:
            continue
        try:
            ref = evaluate_full(inst, tour, plan)
        except InfeasiblePlan:
            ok = not pv.feasible
        else:
            ok = pv.feasible and pv.gain == ref.gain
            if ok:
                commit(state, pv)
                ok = _same_state(state, ref)
        if not ok:
            failures += 1
            if not first:
                kind = "bit-flip" if pv.kind == BITFLIP else "2-opt"
                first = (f"{kind} {pv.move} on tour {[c + 1 for c in tour]} "
                         f"plan {plan.astype(int).tolist()}\n" + format_instance(inst))
    return CheckOutcome("delta-vs-full", probes, failures, counterexample=first)


def check_naive_equivalence(instances=100, seed=1, max_n=100, max_m=500):
    """Items-per-city evaluator versus the O(m*n) reference evaluator, exact."""
    rng = np.random.default_rng(seed)
    failures = 0
    first = ""
    for t in range(instances):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(0, max_m + 1))
        inst = random_instance(rng, n, m, capacity_fraction=rng.uniform(0.1, 0.9))
        tour = random_tour(rng, n)
        plan = random_feasible_plan(rng, inst)
        fast = evaluate_full(inst, tour, plan)
        gain, t_tot, p_tot, w_tot = naive_evaluate(inst, tour, plan)
        if (fast.gain, fast.total_time, fast.total_profit, fast.total_weight) != \
                (gain, t_tot, p_tot, w_tot):
            failures += 1
            if not first:
                first = f"fast gain {fast.gain!r} vs naive {gain!r}\n" + format_instance(inst)
    return CheckOutcome("fast-vs-naive", instances, failures, counterexample=first)


def check_delaunay(point_sets=20, seed=2, max_n=50):
    """Empty-circumcircle witness for every emitted edge, and at most 3n-6 edges."""
    rng = np.random.default_rng(seed)
    failures = 0
    first = ""
    for t in range(point_sets):
        n = int(rng.integers(3, max_n + 1))
        pts = rng.uniform(0.0, 1000.0, size=(n, 2))
        graph = delaunay_candidates(pts)
        edges = graph.edges()
        bad = [e for e in edges if delaunay_edge_witness(pts, *e) is None]
        if graph.source != "delaunay" or bad or len(edges) > 3 * n - 6:
            failures += 1
            if not first:
                first = f"n={n} source={graph.source} bad edges={bad[:5]}\n{pts.tolist()}"
    return CheckOutcome("delaunay-circumcircle", point_sets, failures, counterexample=first)


def tiny_instances(count, seed=0):
    rng = np.random.default_rng(seed)
    for t in range(count):
        n = int(rng.integers(4, 8))
        m = int(rng.integers(2, 9))
        yield random_instance(rng, n, m, capacity_fraction=0.5, name=f"tiny{t:03d}_n{n}_m{m}")


def check_oracle(count=50, seed=0, fit="best", time_budget=60.0):
    """Oracle sandwich on tiny instances; ``detail`` reports how often the optimum is hit."""
    failures = 0
    hits = 0
    first = ""
    config = SolverConfig(fit=fit, time_budget=time_budget)
    for inst in tiny_instances(count, seed):
        best = brute_force_oracle(inst)
        res = cosolver2b(inst, config)
        ok = (res.gain <= best.gain and res.gain >= res.initial_gain
              and evaluate_full(inst, res.tour, res.plan).gain == res.gain)
        hits += res.gain == best.gain
        if not ok:
            failures += 1
            if not first:
                first = (f"cosolver {res.gain!r} oracle {best.gain!r} "
                         f"initial {res.initial_gain!r}\n" + format_instance(inst))
    return CheckOutcome("oracle-sandwich", count, failures,
                        detail=f"optimum attained on {hits}/{count}", counterexample=first)


def verify(tiny_count=50, probes=1000, seed=0, out=print):
    """Run every property suite; returns the list of outcomes."""
    outcomes = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for check in (lambda: check_oracle(tiny_count, seed),
                      lambda: check_delta_exactness(probes, seed),
                      lambda: check_naive_equivalence(100, seed + 1),
                      lambda: check_delaunay(20, seed + 2)):
            start = time.perf_counter()
            res = check()
            outcomes.append(res)
            status = "PASS" if res.passed else "FAIL"
            extra = f" ({res.detail})" if res.detail else ""
            out(f"{status} {res.name}: {res.checked} checked, {res.failures} failed"
                f"{extra} [{time.perf_counter() - start:.2f}s]")
            if not res.passed:
                out("first counterexample:\n" + res.counterexample)
    return outcomes


def construction_report(inst, cand=None):
    """Gains of the empty plan and the constructed plan on the initial tour, and
    whether elimination is idempotent there."""
    cand = cand if cand is not None else delaunay_candidates(inst)
    tour = initial_tour(inst, cand)
    empty = evaluate_full(inst, tour, np.zeros(inst.m, dtype=bool)).gain
    plan = best_initial_plan(inst, tour)
    gain = evaluate_full(inst, tour, plan).gain
    again = elimination_pass(inst, tour, plan)
    return {"empty_gain": empty, "initial_gain": gain,
            "elimination_idempotent": bool(np.array_equal(again, plan)),
            "finite": math.isfinite(gain)}

