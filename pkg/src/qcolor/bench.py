"""Seeded experiment grids over graph families and coloring algorithms.

Every trial gets a private :class:`OracleSession` and a seed derived from
``(base_seed, family, n, epsilon, algorithm, trial)``, so a grid can be
rerun, or fanned out over worker processes, and still produce the same CSV
byte for byte.  Wall-clock time is only written when ``timing`` is on.
"""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._random import derive_seed
from .graph import (
    Coloring,
    GenerationError,
    Graph,
    complete_graph,
    empty_graph,
    gen_gnp,
    gen_regular_like,
    gen_single_edge,
    load_graph,
    path_graph,
    star_graph,
    validate_coloring,
)
from .greedy import discover_max_degree, greedy_color
from .grover import composite_success, find_conflict
from .oracle import BudgetExhausted, OracleSession
from .quantum import QuantumBudget, quantum_color, quantum_color_auto
from .randomized import EpsilonParams, ParameterError, as_fraction, color_auto, lv_color, mc_color

SCHEMA = "qcolor-v1"
COLUMNS = (
    "schema", "algo", "family", "n", "delta", "epsilon", "seed",
    "pair_q", "nbr_q", "quantum_q", "paper_charge", "valid", "failed", "elapsed_ms",
)
ALGORITHMS = ("greedy", "lv", "mc", "quantum", "auto-classical", "auto-quantum")
CALIBRATION_COLUMNS = (
    "schema", "schedule", "N", "k", "trials", "successes", "empirical",
    "predicted", "gap", "sigma", "false_positives", "flagged",
)
SUCCESS_TARGET = 2 / 3


# -- families -------------------------------------------------------------------


def parse_family(spec: str) -> tuple[str, dict]:
    """``"name"`` or ``"name:key=value,key=value"``."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"family parameter {item!r} is not key=value")
        params[key.strip()] = float(value)
    return name.strip(), params


def family_delta(params: dict, n: int) -> int:
    if "delta" in params:
        return int(params["delta"])
    if "frac" in params:
        return max(1, round(params["frac"] * n))
    if "power" in params:
        return max(1, math.ceil(n ** params["power"]))
    raise ValueError("regular family needs one of delta=, frac=, power=")


def make_graph(family: str, n: int, seed: int) -> Graph:
    """Instantiate a family at size ``n``.

    Families: ``empty``, ``path``, ``star``, ``complete``,
    ``single-edge[:i=..,j=..]`` (random endpoints unless given),
    ``gnp:p=..``, ``regular:delta=..|frac=..|power=..``.
    """
    name, params = parse_family(family)
    if name == "empty":
        return empty_graph(n)
    if name == "path":
        return path_graph(n)
    if name == "star":
        return star_graph(n)
    if name == "complete":
        return complete_graph(n)
    if name == "single-edge":
        if "i" in params and "j" in params:
            return gen_single_edge(n, int(params["i"]), int(params["j"]))
        rng = np.random.default_rng(seed)
        i, j = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        return gen_single_edge(n, i, j)
    if name == "gnp":
        return gen_gnp(n, params.get("p", 0.5), seed)
    if name == "regular":
        return gen_regular_like(n, family_delta(params, n), seed)
    raise ValueError(f"unknown graph family {name!r}")


@lru_cache(maxsize=4)
def _cached_graph(family: str, n: int, seed: int) -> Graph:
    return make_graph(family, n, seed)


# -- records ----------------------------------------------------------------------


def format_epsilon(epsilon) -> str:
    eps = as_fraction(epsilon)
    return str(eps.numerator) if eps.denominator == 1 else repr(float(eps))


@dataclass
class TrialRecord:
    algorithm: str
    family: str
    n: int
    delta: int
    epsilon: str
    seed: int
    pair_queries: int = 0
    neighbor_queries: int = 0
    quantum_queries: int = 0
    paper_charge: float = 0.0
    valid: bool = False
    failed: bool = False
    elapsed: Optional[float] = None

    @property
    def total_queries(self) -> int:
        return self.pair_queries + self.neighbor_queries + self.quantum_queries

    def to_row(self) -> list:
        return [
            SCHEMA, self.algorithm, self.family, self.n, self.delta, self.epsilon, self.seed,
            self.pair_queries, self.neighbor_queries, self.quantum_queries,
            f"{self.paper_charge:.6f}", int(self.valid), int(self.failed),
            "" if self.elapsed is None else f"{self.elapsed * 1000:.3f}",
        ]


def _color(s: OracleSession, algorithm: str, eps, seed: int, qb_out: list) -> Optional[Coloring]:
    if algorithm == "auto-classical":
        return color_auto(s, eps, seed)
    if algorithm == "auto-quantum":
        delta = discover_max_degree(s)
        qb = _quantum_ledger(s.n, delta, eps)
        if qb is not None:
            qb_out.append(qb)
        return quantum_color_auto(s, eps, seed, delta=delta, budget=qb)
    delta = discover_max_degree(s)
    if algorithm == "greedy":
        return greedy_color(s, delta)
    params = EpsilonParams(eps, delta, s.n)
    if algorithm == "lv":
        return lv_color(s, params, seed)
    if algorithm == "mc":
        return mc_color(s, params, seed)
    if algorithm == "quantum":
        qb = QuantumBudget.for_params(params)
        qb_out.append(qb)
        return quantum_color(s, params, seed, budget=qb)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def _quantum_ledger(n, delta, eps) -> Optional[QuantumBudget]:
    # only exists when the quantum route is defined for these parameters
    try:
        return QuantumBudget.for_params(EpsilonParams(eps, delta, n))
    except ParameterError:
        return None


def run_trial(
    graph: Graph,
    family: str,
    algorithm: str,
    epsilon,
    seed: int,
    budget: Optional[int] = None,
    timing: bool = False,
) -> tuple[TrialRecord, Optional[Coloring]]:
    """One algorithm run on its own session.  Parameter errors propagate."""
    s = OracleSession(graph, budget=budget, log_charges=False)
    qb_out: list = []
    t0 = time.perf_counter()
    try:
        col = _color(s, algorithm, epsilon, seed, qb_out)
    except BudgetExhausted:
        col = None
    elapsed = time.perf_counter() - t0
    rec = TrialRecord(
        algorithm, family, graph.n, graph.max_degree, format_epsilon(epsilon), seed,
        s.pair_queries, s.neighbor_queries, s.quantum_queries,
        elapsed=elapsed if timing else None,
    )
    if qb_out:
        rec.paper_charge = qb_out[0].paper_charge_accrued
    rec.valid = col is not None and validate_coloring(graph, col).proper
    rec.failed = col is None or col.method == "greedy-fallback"
    return rec, col


# -- experiment grids -------------------------------------------------------------


@dataclass
class ExperimentConfig:
    family: str
    sizes: list
    epsilons: list = field(default_factory=lambda: [1])
    algorithms: list = field(default_factory=lambda: ["auto-classical"])
    trials_per_cell: int = 1
    base_seed: int = 0
    output_path: Optional[str] = None
    budget: Optional[int] = None
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("sizes must be non-empty")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be at least 1")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
        parse_family(self.family)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """``key = value`` lines; list values are comma-separated; ``#`` starts a comment."""
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ValueError(f"config line {lineno}: expected key = value")
            raw[key.strip()] = value.strip()

        def ints(v):
            return [int(x) for x in v.split(",") if x.strip()]

        def words(v):
            return [x.strip() for x in v.split(",") if x.strip()]

        known = {
            "family": str,
            "sizes": ints,
            "epsilons": words,
            "algorithms": words,
            "trials_per_cell": int,
            "base_seed": int,
            "output_path": str,
            "budget": int,
            "timing": lambda v: v.lower() in ("1", "true", "yes", "on"),
            "workers": int,
        }
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[key] = known[key](value)
        if "family" not in kwargs or "sizes" not in kwargs:
            raise ValueError("config needs at least family and sizes")
        return cls(**kwargs)


def trial_seed(base_seed: int, family: str, n: int, epsilon, algorithm: str, trial: int) -> int:
    return derive_seed(base_seed, family, n, format_epsilon(epsilon), algorithm, trial)


def graph_seed(base_seed: int, family: str, n: int) -> int:
    return derive_seed(base_seed, "graph", family, n)


def _run_task(task) -> TrialRecord:
    family, n, gseed, algo, eps, seed, budget, timing = task
    rec, _ = run_trial(_cached_graph(family, n, gseed), family, algo, eps, seed, budget, timing)
    return rec


def _feasible(algo: str, n: int, delta: int, eps) -> Optional[str]:
    if algo in ("lv", "mc", "quantum"):
        e = as_fraction(eps)
        if e * delta < 1:
            return f"{algo} needs epsilon * delta >= 1 (delta={delta}, epsilon={eps})"
        if algo == "quantum" and n < 2:
            return "quantum needs n >= 2"
    return None


@dataclass
class ExperimentResult:
    records: list
    summary: list
    errors: list


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the grid; write the CSV (and ``<out>.summary.csv``) if ``output_path`` is set.

    Infeasible cells (generator failure, ``εΔ < 1`` for the randomized
    algorithms) are listed in ``errors`` and produce no rows.
    """
    tasks = []
    errors = []
    for n in cfg.sizes:
        gseed = graph_seed(cfg.base_seed, cfg.family, n)
        try:
            g = _cached_graph(cfg.family, n, gseed)
        except (ValueError, GenerationError) as exc:
            errors.append({"family": cfg.family, "n": n, "error": str(exc)})
            continue
        for eps in cfg.epsilons:
            for algo in cfg.algorithms:
                why = _feasible(algo, n, g.max_degree, eps)
                if why:
                    errors.append({"family": cfg.family, "n": n, "epsilon": format_epsilon(eps),
                                   "algo": algo, "error": why})
                    continue
                for trial in range(cfg.trials_per_cell):
                    seed = trial_seed(cfg.base_seed, cfg.family, n, eps, algo, trial)
                    tasks.append((cfg.family, n, gseed, algo, eps, seed, cfg.budget, cfg.timing))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    else:
        records = [_run_task(t) for t in tasks]

    summary = summarize(records)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            write_records(records, fh)
        with open(summary_path(cfg.output_path), "w", newline="") as fh:
            write_summary(summary, fh)
    return ExperimentResult(records, summary, errors)


def summary_path(path: str) -> str:
    stem = path[:-4] if path.endswith(".csv") else path
    return stem + ".summary.csv"


def write_records(records: Sequence[TrialRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in records:
        w.writerow(rec.to_row())


def records_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def read_records(fh) -> list[TrialRecord]:
    out = []
    for row in csv.DictReader(fh):
        if row["schema"] != SCHEMA:
            raise ValueError(f"unsupported schema {row['schema']!r}")
        out.append(TrialRecord(
            row["algo"], row["family"], int(row["n"]), int(row["delta"]), row["epsilon"],
            int(row["seed"]), int(row["pair_q"]), int(row["nbr_q"]), int(row["quantum_q"]),
            float(row["paper_charge"]), row["valid"] == "1", row["failed"] == "1",
            float(row["elapsed_ms"]) / 1000 if row["elapsed_ms"] else None,
        ))
    return out


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    if len(xs) < 2:
        raise ValueError("need at least two points to fit a slope")
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)
    return float(slope)


def _p95(values):
    return float(np.percentile(values, 95, method="nearest"))


def summarize(records: Sequence[TrialRecord]) -> list[dict]:
    """Per-cell statistics, plus a log-log slope row per (algo, epsilon) when several sizes exist."""
    cells: dict = {}
    for rec in records:
        cells.setdefault((rec.family, rec.algorithm, rec.epsilon, rec.n), []).append(rec)
    rows = []
    for (family, algo, eps, n), recs in cells.items():
        totals = [r.total_queries for r in recs]
        rows.append({
            "family": family, "algo": algo, "epsilon": eps, "n": n, "delta": recs[0].delta,
            "trials": len(recs),
            "mean_total": statistics.fmean(totals),
            "median_total": statistics.median(totals),
            "p95_total": _p95(totals),
            "valid_rate": sum(r.valid for r in recs) / len(recs),
            "failed_rate": sum(r.failed for r in recs) / len(recs),
            "slope": "",
        })
    groups: dict = {}
    for row in rows:
        groups.setdefault((row["family"], row["algo"], row["epsilon"]), []).append(row)
    for (family, algo, eps), grp in groups.items():
        if len(grp) >= 2 and all(r["mean_total"] > 0 for r in grp):
            slope = fit_loglog_slope([r["n"] for r in grp], [r["mean_total"] for r in grp])
            rows.append({
                "family": family, "algo": algo, "epsilon": eps, "n": "all", "delta": "",
                "trials": sum(r["trials"] for r in grp), "mean_total": "", "median_total": "",
                "p95_total": "", "valid_rate": "", "failed_rate": "", "slope": f"{slope:.4f}",
            })
    return rows


SUMMARY_COLUMNS = ("family", "algo", "epsilon", "n", "delta", "trials", "mean_total",
                   "median_total", "p95_total", "valid_rate", "failed_rate", "slope")


def write_summary(rows: Sequence[dict], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in row.items()})


# -- single runs -----------------------------------------------------------------------


def write_coloring(col: Coloring) -> str:
    return "".join(f"{v} {'-' if c is None else c}\n" for v, c in enumerate(col.assignment))


def run_single(
    graph_path: str,
    algorithm: str,
    epsilon,
    seed: int,
    out: Optional[str] = None,
    budget: Optional[int] = None,
) -> tuple[TrialRecord, Optional[Coloring]]:
    """Color one graph file; optionally write ``vertex color`` lines to ``out``."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    g = load_graph(graph_path)
    rec, col = run_trial(g, graph_path, algorithm, epsilon, seed, budget=budget, timing=True)
    if out is not None and col is not None:
        with open(out, "w") as fh:
            fh.write(write_coloring(col))
    return rec, col


def stats_line(rec: TrialRecord) -> str:
    return (f"algo={rec.algorithm} n={rec.n} delta={rec.delta} epsilon={rec.epsilon} seed={rec.seed} "
            f"pair={rec.pair_queries} neighbor={rec.neighbor_queries} quantum={rec.quantum_queries} "
            f"paper_charge={rec.paper_charge:.3f} valid={int(rec.valid)} failed={int(rec.failed)}")


# -- Grover calibration -------------------------------------------------------------------


@dataclass
class CalibrationRow:
    schedule: str
    N: int
    k: int
    trials: int
    successes: int
    predicted: float
    false_positives: int

    @property
    def empirical(self) -> float:
        return self.successes / self.trials

    @property
    def gap(self) -> float:
        return abs(self.empirical - self.predicted)

    @property
    def sigma(self) -> float:
        """Binomial standard error at the predicted rate."""
        p = self.predicted
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def flagged(self) -> bool:
        """Below the 2/3 target by more than three standard errors (only when k >= 1)."""
        if self.k == 0:
            return False
        sd = math.sqrt(SUCCESS_TARGET * (1 - SUCCESS_TARGET) / self.trials)
        return self.empirical < SUCCESS_TARGET - 3 * sd

    def to_row(self) -> list:
        return [SCHEMA, self.schedule, self.N, self.k, self.trials, self.successes,
                f"{self.empirical:.6f}", f"{self.predicted:.6f}", f"{self.gap:.6f}",
                f"{self.sigma:.6f}", self.false_positives, int(self.flagged)]


def calibration_instance(N: int, k: int, seed: int) -> tuple[Graph, list]:
    """Vertex 0 plus a searched set ``1..N`` of which ``k`` random members are neighbors."""
    rng = np.random.default_rng(seed)
    marked = sorted(int(x) + 1 for x in rng.choice(N, size=k, replace=False)) if k else []
    return Graph.from_edges(N + 1, [(0, u) for u in marked]), list(range(1, N + 1))


def calibrate_cell(N: int, k: int, trials: int, seed: int, schedule: str = "doubling") -> CalibrationRow:
    g, members = calibration_instance(N, k, derive_seed(seed, "instance", N, k))
    s = OracleSession(g, log_charges=False)
    rng = random.Random(derive_seed(seed, "trials", N, k, schedule))
    hits = false_pos = 0
    for _ in range(trials):
        u = find_conflict(s, 0, members, rng, schedule)
        if u is not None:
            if g.has_edge(0, u):
                hits += 1
            else:
                false_pos += 1
    return CalibrationRow(schedule, N, k, trials, hits, composite_success(N, k, schedule), false_pos)


def run_grover_calibration(
    Ns: Sequence[int],
    ks: Sequence[int],
    trials: int,
    seed: int,
    schedule: str = "doubling",
    out: Optional[str] = None,
) -> list[CalibrationRow]:
    """Empirical vs predicted base Find-Conflict success per ``(N, k)``, ``k <= N``."""
    if not Ns or not ks:
        raise ValueError("N and k lists must be non-empty")
    rows = [calibrate_cell(N, k, trials, seed, schedule) for N in Ns for k in ks if k <= N]
    if out is not None:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CALIBRATION_COLUMNS)
            for row in rows:
                w.writerow(row.to_row())
    return rows
