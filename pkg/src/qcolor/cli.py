"""``qcolor`` command line: ``gen``, ``color``, ``bench``, ``calibrate-grover``."""

from __future__ import annotations

import argparse
import sys

from . import bench
from .graph import EdgeListError, GenerationError, write_edge_list
from .grover import SCHEDULES
from .randomized import ParameterError

EX_DATAERR = 65
EX_IOERR = 74


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _word_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _cmd_gen(args) -> int:
    try:
        g = bench.make_graph(args.family, args.n, args.seed)
    except (ValueError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR
    text = write_edge_list(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_color(args) -> int:
    try:
        rec, col = bench.run_single(args.graph, args.algo, args.epsilon, args.seed,
                                    out=args.out, budget=args.budget)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_IOERR
    except (EdgeListError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR
    print(bench.stats_line(rec))
    return 0 if rec.valid else 1


def _cmd_bench(args) -> int:
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = bench.ExperimentConfig.from_text(fh.read())
        else:
            if not args.family or not args.n:
                print("error: bench needs --config or --family and --n", file=sys.stderr)
                return 2
            cfg = bench.ExperimentConfig(
                family=args.family,
                sizes=_int_list(args.n),
                epsilons=_word_list(args.epsilon),
                algorithms=_word_list(args.algo),
                trials_per_cell=args.trials,
                base_seed=args.seed,
            )
        for key in ("out", "budget", "workers"):
            value = getattr(args, key)
            if value is not None:
                setattr(cfg, "output_path" if key == "out" else key, value)
        if args.timing:
            cfg.timing = True
        result = bench.run_experiment(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_IOERR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR
    for err in result.errors:
        print("skipped: " + ", ".join(f"{k}={v}" for k, v in err.items()), file=sys.stderr)
    if not cfg.output_path:
        sys.stdout.write(bench.records_csv(result.records))
    bench.write_summary(result.summary, sys.stderr if not cfg.output_path else sys.stdout)
    return 0


def _cmd_calibrate(args) -> int:
    try:
        rows = bench.run_grover_calibration(_int_list(args.N), _int_list(args.k), args.trials,
                                            args.seed, schedule=args.schedule, out=args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_IOERR
    for row in rows:
        flag = "  FLAG" if row.flagged else ""
        print(f"N={row.N:<5d} k={row.k:<4d} empirical={row.empirical:.4f} "
              f"predicted={row.predicted:.4f} gap={row.gap:.4f}{flag}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcolor", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph and write it as an edge list")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("color", help="color one edge-list file")
    c.add_argument("graph")
    c.add_argument("--algo", choices=bench.ALGORITHMS, default="auto-classical")
    c.add_argument("--epsilon", default="1")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="write 'vertex color' lines here")
    c.add_argument("--budget", type=int)
    c.set_defaults(func=_cmd_color)

    b = sub.add_parser("bench", help="run a seeded experiment grid")
    b.add_argument("--config", help="key = value file mirroring ExperimentConfig")
    b.add_argument("--family")
    b.add_argument("--n", help="comma-separated sizes")
    b.add_argument("--epsilon", default="1", help="comma-separated values")
    b.add_argument("--algo", default="auto-classical", help="comma-separated algorithm names")
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--budget", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-identical reruns)")
    b.set_defaults(func=_cmd_bench)

    k = sub.add_parser("calibrate-grover", help="empirical vs predicted Find-Conflict success")
    k.add_argument("--N", required=True, help="comma-separated search-set sizes")
    k.add_argument("--k", required=True, help="comma-separated marked counts")
    k.add_argument("--trials", type=int, default=10_000)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--schedule", choices=SCHEDULES, default="doubling")
    k.add_argument("--out")
    k.set_defaults(func=_cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
