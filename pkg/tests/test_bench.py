import json
import os

import numpy as np
import pytest

from rmdo.bench import (
    CSV_HEADER,
    ExperimentSuite,
    SnapshotsUnavailableError,
    measured_average_regret,
    read_csv,
    run_experiment,
    write_csv,
)
from rmdo.driver import RunConfig, run
from rmdo.games import GameSpec
from rmdo.tree import P1, P2


class TestMeasuredRegret:
    def test_zero_at_an_exact_equilibrium(self, tiny_game):
        # a single iteration whose played profile is already the equilibrium
        result = run(
            RunConfig(game=tiny_game, algo="pdo", period=1, max_iterations=1, snapshot_every=1)
        )
        assert measured_average_regret(result, P1) == pytest.approx(0.0, abs=1e-12)
        assert measured_average_regret(result, P2) == pytest.approx(0.0, abs=1e-12)

    def test_single_uniform_iteration_on_tiny(self, tiny_game):
        result = run(
            RunConfig(
                game=tiny_game, algo="cfr", regret="vanilla", max_iterations=1, snapshot_every=1
            )
        )
        # best response earns 1.5 while the uniform profile earns 1.25
        assert measured_average_regret(result, P1) == pytest.approx(0.25, abs=1e-12)

    def test_sublinear_decay_on_xodo(self, kuhn1):
        result = run(
            RunConfig(game=kuhn1, algo="xodo", max_iterations=1000, snapshot_every=1)
        )
        for player in (P1, P2):
            early = measured_average_regret(result, player, upto=250)
            late = measured_average_regret(result, player, upto=1000)
            assert late < early

    def test_matches_logged_exploitability(self, kuhn1):
        result = run(
            RunConfig(game=kuhn1, algo="xodo", max_iterations=400, snapshot_every=1)
        )
        for row in list(result.log)[::4]:
            total = measured_average_regret(result, P1, upto=row.iteration)
            total += measured_average_regret(result, P2, upto=row.iteration)
            assert row.exploitability <= total + 1e-6
            assert total <= row.exploitability + 1e-6  # in fact an identity

    def test_requires_snapshots(self, tiny_game):
        result = run(RunConfig(game=tiny_game, algo="cfr", max_iterations=5))
        with pytest.raises(SnapshotsUnavailableError):
            measured_average_regret(result, P1)

    def test_sparse_cadence_estimates(self, kuhn1):
        exact = run(RunConfig(game=kuhn1, algo="cfr", max_iterations=200, snapshot_every=1))
        sparse = run(RunConfig(game=kuhn1, algo="cfr", max_iterations=200, snapshot_every=10))
        a = measured_average_regret(exact, P1)
        b = measured_average_regret(sparse, P1)
        assert b == pytest.approx(a, abs=5e-2)


class TestCsv:
    def test_header_is_pinned(self):
        assert CSV_HEADER == "iteration,visited_infosets,wall_time_s,exploitability,window,population_size"

    def test_round_trip_is_bit_exact(self, kuhn1, tmp_path):
        result = run(RunConfig(game=kuhn1, algo="pdo", period=25, max_iterations=120))
        path = tmp_path / "run.csv"
        write_csv(result.log, path)
        back = read_csv(path)
        assert len(back) == len(result.log)
        for a, b in zip(result.log, back):
            assert a.__dict__ == b.__dict__

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,value\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_csv(path)


class TestCounterCorrectness:
    def test_pure_cfr_count_is_analytic(self, kuhn1):
        iterations = 137
        result = run(RunConfig(game=kuhn1, algo="cfr", max_iterations=iterations))
        assert result.visited == iterations * 2 * kuhn1.num_nodes

    def test_pdo_count_reconstructs_from_windows(self, kuhn1):
        period = 25
        result = run(RunConfig(game=kuhn1, algo="pdo", period=period, max_iterations=300))
        expected = 2 * kuhn1.num_nodes  # population initialization
        for meta in result.windows:
            length = meta["length"]
            expected += length * 2 * meta["view_nodes"]
            expected += (length // period) * 2 * kuhn1.num_nodes
        assert result.visited == expected

    def test_xodo_count_reconstructs_from_windows(self, kuhn1):
        result = run(RunConfig(game=kuhn1, algo="xodo", max_iterations=150))
        expected = 2 * kuhn1.num_nodes
        for meta in result.windows:
            expected += meta["length"] * (2 * meta["view_nodes"] + 2 * kuhn1.num_nodes)
        assert result.visited == expected

    def test_xdo_count_includes_probes(self, kuhn1):
        result = run(RunConfig(game=kuhn1, algo="xdo", max_iterations=150))
        # every iteration pays a local probe on top of the CFR pass
        floor = 2 * kuhn1.num_nodes + sum(
            meta["length"] * 4 * meta["view_nodes"] for meta in result.windows
        )
        assert result.visited >= floor


class TestRunExperiment:
    def test_periodicity_sweep_produces_csvs_and_manifest(self, kuhn1, tmp_path):
        runs = tuple(
            (f"pdo{c}", RunConfig(game=kuhn1, algo="pdo", period=c, max_iterations=60))
            for c in (1, 10, 50, 100)
        )
        suite = ExperimentSuite(game=kuhn1, runs=runs, out_dir=tmp_path / "sweep")
        manifest = run_experiment(suite)
        files = sorted(os.listdir(tmp_path / "sweep"))
        assert files == ["manifest.json", "pdo1.csv", "pdo10.csv", "pdo100.csv", "pdo50.csv"]
        assert [e["label"] for e in manifest["runs"]] == ["pdo1", "pdo10", "pdo50", "pdo100"]
        for entry in manifest["runs"]:
            assert set(entry) >= {
                "label",
                "config",
                "game_stats",
                "k",
                "windows",
                "final_exploitability",
                "stop_reason",
            }
            assert entry["game_stats"]["nodes"] == kuhn1.num_nodes
        on_disk = json.loads((tmp_path / "sweep" / "manifest.json").read_text())
        assert on_disk == manifest

    def test_streamed_rows_match_result_log(self, kuhn1, tmp_path):
        runs = (("solo", RunConfig(game=kuhn1, algo="pdo", period=10, max_iterations=50)),)
        run_experiment(ExperimentSuite(game=kuhn1, runs=runs, out_dir=tmp_path))
        streamed = read_csv(tmp_path / "solo.csv")
        direct = run(RunConfig(game=kuhn1, algo="pdo", period=10, max_iterations=50, label="solo"))
        assert streamed.column("iteration") == direct.log.column("iteration")
        assert streamed.column("exploitability") == direct.log.column("exploitability")
        assert streamed.column("visited_infosets") == direct.log.column("visited_infosets")

    def test_empty_suite_writes_empty_manifest(self, tmp_path):
        manifest = run_experiment(
            ExperimentSuite(game=GameSpec.make("tiny"), runs=(), out_dir=tmp_path)
        )
        assert manifest["runs"] == []
        assert (tmp_path / "manifest.json").exists()

    def test_duplicate_labels_fail_before_any_run(self, tiny_game, tmp_path):
        cfg = RunConfig(game=tiny_game, algo="cfr", max_iterations=5)
        suite = ExperimentSuite(
            game=tiny_game, runs=(("a", cfg), ("a", cfg)), out_dir=tmp_path / "dup"
        )
        with pytest.raises(ValueError, match="duplicate"):
            run_experiment(suite)
        assert not (tmp_path / "dup").exists()

    def test_one_failure_does_not_poison_the_suite(self, tiny_game, tmp_path):
        good = RunConfig(game=tiny_game, algo="cfr", max_iterations=5)
        bad = RunConfig(game=tiny_game, algo="cfr", max_iterations=5, output="median")
        manifest = run_experiment(
            ExperimentSuite(game=tiny_game, runs=(("ok", good), ("boom", bad)), out_dir=tmp_path)
        )
        by_label = {e["label"]: e for e in manifest["runs"]}
        assert "error" in by_label["boom"]
        assert by_label["ok"]["stop_reason"] == "max_iterations"

    def test_thread_cap_env(self, monkeypatch):
        from rmdo.bench import suite_concurrency

        monkeypatch.setenv("RMDO_THREADS", "2")
        assert suite_concurrency(8) == 2
        monkeypatch.delenv("RMDO_THREADS")
        assert suite_concurrency(1) == 1
