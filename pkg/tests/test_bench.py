import io
import math

import pytest

from qcolor import bench
from qcolor.cli import EX_DATAERR, EX_IOERR, main
from qcolor.graph import Coloring, complete_graph, gen_single_edge, read_edge_list, save_graph, validate_coloring
from qcolor.grover import composite_success


def small_cfg(tmp_path=None, **kw):
    base = dict(family="gnp:p=0.4", sizes=[24, 40], epsilons=["1", "0.5"],
                algorithms=list(bench.ALGORITHMS), trials_per_cell=3, base_seed=7)
    base.update(kw)
    if tmp_path is not None:
        base["output_path"] = str(tmp_path / "run.csv")
    return bench.ExperimentConfig(**base)


def test_single_cell_single_row():
    res = bench.run_experiment(bench.ExperimentConfig(family="gnp:p=0.5", sizes=[8], algorithms=["greedy"]))
    assert len(res.records) == 1
    assert res.records[0].valid


def test_rerun_is_byte_identical(tmp_path):
    cfg = small_cfg(tmp_path)
    bench.run_experiment(cfg)
    first = (tmp_path / "run.csv").read_bytes()
    summary = (tmp_path / "run.summary.csv").read_bytes()
    bench.run_experiment(cfg)
    assert (tmp_path / "run.csv").read_bytes() == first
    assert (tmp_path / "run.summary.csv").read_bytes() == summary


def test_parallel_matches_serial(tmp_path):
    serial = bench.records_csv(bench.run_experiment(small_cfg(workers=1)).records)
    parallel = bench.records_csv(bench.run_experiment(small_cfg(workers=2)).records)
    assert serial == parallel


def test_header_and_schema():
    text = bench.records_csv(bench.run_experiment(small_cfg()).records)
    lines = text.splitlines()
    assert lines[0] == ("schema,algo,family,n,delta,epsilon,seed,pair_q,nbr_q,quantum_q,"
                        "paper_charge,valid,failed,elapsed_ms")
    assert all(line.startswith("qcolor-v1,") for line in lines[1:])


def test_records_round_trip():
    recs = bench.run_experiment(small_cfg()).records
    again = bench.read_records(io.StringIO(bench.records_csv(recs)))
    assert bench.records_csv(again) == bench.records_csv(recs)


def test_record_invariants():
    res = bench.run_experiment(small_cfg())
    assert len(res.records) == 2 * 2 * len(bench.ALGORITHMS) * 3
    for rec in res.records:
        assert min(rec.pair_queries, rec.neighbor_queries, rec.quantum_queries, rec.paper_charge) >= 0
        if rec.algorithm in ("greedy", "lv"):
            assert rec.valid
        if rec.algorithm in ("greedy", "lv", "mc", "auto-classical"):
            assert rec.quantum_queries == 0


def test_cell_seeds_are_distinct():
    seeds = {bench.trial_seed(0, "gnp", n, e, a, t)
             for n in (8, 16) for e in ("1", "0.5") for a in bench.ALGORITHMS for t in range(5)}
    assert len(seeds) == 2 * 2 * len(bench.ALGORITHMS) * 5


def test_infeasible_cells_are_recorded_not_fatal():
    res = bench.run_experiment(bench.ExperimentConfig(
        family="path", sizes=[10], epsilons=["0.25"], algorithms=["lv", "greedy"]))
    assert [r.algorithm for r in res.records] == ["greedy"]
    assert len(res.errors) == 1 and res.errors[0]["algo"] == "lv"

    res = bench.run_experiment(bench.ExperimentConfig(family="regular:delta=3", sizes=[5, 6]))
    assert len(res.errors) == 1 and res.errors[0]["n"] == 5
    assert len(res.records) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        bench.ExperimentConfig(family="gnp", sizes=[])
    with pytest.raises(ValueError):
        bench.ExperimentConfig(family="gnp", sizes=[4], trials_per_cell=0)
    with pytest.raises(ValueError):
        bench.ExperimentConfig(family="gnp", sizes=[4], algorithms=["magic"])


def test_config_from_text():
    cfg = bench.ExperimentConfig.from_text(
        "# scaling grid\nfamily = regular:frac=0.5\nsizes = 16, 32\nepsilons = 1,0.5\n"
        "algorithms = lv\ntrials_per_cell = 4\nbase_seed = 9\n")
    assert cfg.family == "regular:frac=0.5" and cfg.sizes == [16, 32]
    assert cfg.epsilons == ["1", "0.5"] and cfg.trials_per_cell == 4 and cfg.base_seed == 9
    with pytest.raises(ValueError):
        bench.ExperimentConfig.from_text("family = gnp\nsizes = 4\ncolour = red\n")
    with pytest.raises(ValueError):
        bench.ExperimentConfig.from_text("sizes = 4\n")


def test_families():
    assert bench.make_graph("regular:frac=0.5", 64, 1).max_degree == 32
    assert bench.make_graph("regular:power=0.5", 64, 1).max_degree == 8
    assert bench.make_graph("single-edge:i=2,j=5", 16, 0) == gen_single_edge(16, 2, 5)
    assert bench.make_graph("single-edge", 16, 3).edge_count == 1
    assert bench.make_graph("complete", 6, 0) == complete_graph(6)
    with pytest.raises(ValueError):
        bench.make_graph("torus", 6, 0)


def test_summary_statistics():
    res = bench.run_experiment(small_cfg(algorithms=["greedy"], epsilons=["1"]))
    cells = [r for r in res.summary if r["n"] != "all"]
    slopes = [r for r in res.summary if r["n"] == "all"]
    assert len(cells) == 2 and len(slopes) == 1
    for row in cells:
        totals = [r.total_queries for r in res.records if r.n == row["n"]]
        assert row["mean_total"] == pytest.approx(sum(totals) / len(totals))
        assert row["median_total"] == sorted(totals)[1]
        assert row["valid_rate"] == 1.0


def test_loglog_slope_recovers_power():
    xs = [2**k for k in range(4, 10)]
    assert bench.fit_loglog_slope(xs, [3 * x**1.5 for x in xs]) == pytest.approx(1.5)


def test_quantum_summary_validity_large_n():
    res = bench.run_experiment(bench.ExperimentConfig(
        family="regular:frac=0.5", sizes=[1024], algorithms=["quantum"], trials_per_cell=5))
    (row,) = [r for r in res.summary if r["n"] == 1024]
    assert row["valid_rate"] >= 0.99


def test_timing_column_only_when_asked():
    rec, _ = bench.run_trial(complete_graph(5), "complete", "greedy", 1, 0, timing=True)
    assert rec.to_row()[-1] != ""
    rec, _ = bench.run_trial(complete_graph(5), "complete", "greedy", 1, 0)
    assert rec.to_row()[-1] == ""


def test_budget_exhaustion_marks_failure():
    rec, col = bench.run_trial(complete_graph(10), "complete", "greedy", 1, 0, budget=5)
    assert col is None and rec.failed and not rec.valid


# -- single runs ----------------------------------------------------------------------


def test_run_single_greedy_single_edge(tmp_path):
    path = tmp_path / "g.txt"
    save_graph(path, gen_single_edge(16, 2, 5))
    out = tmp_path / "c.txt"
    rec, col = bench.run_single(str(path), "greedy", 1, 0, out=str(out))
    assert rec.valid
    assert col.assignment[2] != col.assignment[5]
    assert all(c == 1 for v, c in enumerate(col.assignment) if v != 5)
    lines = out.read_text().splitlines()
    assert len(lines) == 16 and lines[5] == "5 2"


def test_run_single_lv_k4(tmp_path):
    path = tmp_path / "k4.txt"
    save_graph(path, complete_graph(4))
    rec, col = bench.run_single(str(path), "lv", 1, 0)
    assert rec.valid and len(set(col.assignment)) == 4


def test_run_single_bad_algorithm(tmp_path):
    path = tmp_path / "k4.txt"
    save_graph(path, complete_graph(4))
    with pytest.raises(ValueError):
        bench.run_single(str(path), "bogo", 1, 0)


# -- calibration ----------------------------------------------------------------------


def test_calibration_exact_rotation_cell():
    (row,) = bench.run_grover_calibration([4], [1], 2000, 0)
    assert row.empirical == 1.0 and row.predicted == pytest.approx(1.0)


def test_calibration_no_marked():
    (row,) = bench.run_grover_calibration([9], [0], 500, 0)
    assert row.successes == 0 and row.false_positives == 0 and not row.flagged


def test_calibration_matches_composite_n64():
    trials = 100_000
    (row,) = bench.run_grover_calibration([64], [1], trials, 5)
    p = composite_success(64, 1)
    assert row.predicted == p
    assert abs(row.empirical - p) <= 3 * math.sqrt(p * (1 - p) / trials) + 1e-9


def test_calibration_flags_two_round_schedule_dead_cell(tmp_path):
    out = tmp_path / "cal.csv"
    rows = bench.run_grover_calibration([4], [1, 3], 1000, 0, schedule="two-round", out=str(out))
    assert [r.flagged for r in rows] == [False, True]
    text = out.read_text().splitlines()
    assert text[0].split(",") == list(bench.CALIBRATION_COLUMNS)
    assert len(text) == 3


def test_calibration_skips_k_above_n():
    rows = bench.run_grover_calibration([2, 8], [1, 5], 10, 0)
    assert [(r.N, r.k) for r in rows] == [(2, 1), (8, 1), (8, 5)]


# -- command line ---------------------------------------------------------------------------


def test_cli_gen_and_color(tmp_path, capsys):
    g = tmp_path / "g.txt"
    assert main(["gen", "--family", "gnp:p=0.3", "--n", "40", "--seed", "2", "--out", str(g)]) == 0
    graph = read_edge_list(g.read_text())
    col_path = tmp_path / "c.txt"
    rc = main(["color", str(g), "--algo", "auto-quantum", "--epsilon", "1", "--out", str(col_path)])
    assert rc == 0
    assert "valid=1" in capsys.readouterr().out
    colors = [int(line.split()[1]) for line in col_path.read_text().splitlines()]
    assert validate_coloring(graph, Coloring(tuple(colors), max(colors))).proper


def test_cli_color_missing_file(tmp_path):
    assert main(["color", str(tmp_path / "nope.txt")]) == EX_IOERR


def test_cli_color_parse_error(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n0 0\n")
    assert main(["color", str(bad)]) == EX_DATAERR


def test_cli_bench_with_config(tmp_path, capsys):
    cfg = tmp_path / "grid.cfg"
    out = tmp_path / "out.csv"
    cfg.write_text(f"family = gnp:p=0.5\nsizes = 16,32\nalgorithms = greedy,lv\ntrials_per_cell = 2\n"
                   f"output_path = {out}\n")
    assert main(["bench", "--config", str(cfg)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 2 * 2
    assert (tmp_path / "out.summary.csv").exists()


def test_cli_bench_flags_to_stdout(capsys):
    assert main(["bench", "--family", "path", "--n", "10,20", "--algo", "greedy", "--trials", "2"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("schema,")
    assert len([l for l in out.splitlines() if l.startswith("qcolor-v1")]) == 4


def test_cli_bench_unwritable_output(tmp_path):
    assert main(["bench", "--family", "path", "--n", "10", "--out", str(tmp_path / "no" / "x.csv")]) == EX_IOERR


def test_cli_calibrate(tmp_path, capsys):
    out = tmp_path / "cal.csv"
    assert main(["calibrate-grover", "--N", "4,16", "--k", "1,2", "--trials", "200", "--out", str(out)]) == 0
    assert "N=16" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 5
