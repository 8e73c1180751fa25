import numpy as np
import pytest

from rmdo import games
from rmdo.driver import (
    FrequencyScheme,
    RunConfig,
    RunHistory,
    WindowState,
    k_statistics,
    last_window_average_strategy,
    overall_average_strategy,
    run,
    should_compute_br,
)
from rmdo.games import GameSpec
from rmdo.oracle import exploitability
from rmdo.regret import EmptyWindowError
from rmdo.tree import P1, P2


class TestShouldComputeBr:
    def test_periodic_fires_on_multiples(self):
        scheme = FrequencyScheme("periodic", period=50)
        assert should_compute_br(scheme, WindowState(index=0, in_window=100)) is True
        assert should_compute_br(scheme, WindowState(index=0, in_window=101)) is False

    def test_threshold_halves_per_window(self):
        scheme = FrequencyScheme("threshold", eps0=0.4)
        window = WindowState(index=2, in_window=7)
        assert should_compute_br(scheme, window, lambda: 0.09) is True  # 0.4 / 4 = 0.1
        assert should_compute_br(scheme, window, lambda: 0.11) is False

    def test_threshold_requires_probe(self):
        with pytest.raises(ValueError):
            should_compute_br(FrequencyScheme("threshold", eps0=0.4), WindowState())

    def test_probe_not_called_for_other_schemes(self):
        def boom():
            raise AssertionError("probe invoked")

        assert should_compute_br(FrequencyScheme("every_iteration"), WindowState(in_window=3), boom)

    def test_every_iteration_always_true(self):
        scheme = FrequencyScheme("every_iteration")
        for t in (1, 2, 17):
            assert should_compute_br(scheme, WindowState(index=3, in_window=t)) is True

    def test_scheme_validation(self):
        with pytest.raises(ValueError):
            FrequencyScheme("periodic", period=0)
        with pytest.raises(ValueError):
            FrequencyScheme("threshold", eps0=-1.0)
        with pytest.raises(ValueError):
            FrequencyScheme("sometimes")


class TestConfigValidation:
    def test_needs_a_stop_rule(self):
        with pytest.raises(ValueError, match="stop rule"):
            RunConfig(game=GameSpec.make("tiny")).validate()

    def test_rejects_unknown_algo(self):
        with pytest.raises(ValueError):
            RunConfig(game=GameSpec.make("tiny"), algo="sgd", max_iterations=5).validate()

    def test_rejects_bad_output(self):
        with pytest.raises(ValueError):
            RunConfig(game=GameSpec.make("tiny"), output="median", max_iterations=5).validate()

    def test_rejects_nonpositive_target(self):
        with pytest.raises(ValueError):
            RunConfig(game=GameSpec.make("tiny"), target_exploitability=0.0).validate()


class TestTinyGoldenTrace:
    def test_pdo1_converges_in_one_window(self, tiny_game):
        result = run(
            RunConfig(
                game=tiny_game,
                algo="pdo",
                period=1,
                target_exploitability=1e-12,
                max_iterations=100,
            )
        )
        assert result.k == 1
        assert result.stop_reason == "target"
        assert result.exploitability == 0.0
        assert result.state.pop.serialize() == {
            "player1": {"p1": [0]},
            "player2": {"p2": [1]},
        }
        assert list(result.strategy.p1.probs(0)) == [1.0, 0.0]
        assert list(result.strategy.p2.probs(1)) == [0.0, 1.0]


class TestKuhnRuns:
    def test_pdo50_reaches_target_within_budget(self, kuhn1):
        result = run(
            RunConfig(
                game=kuhn1,
                algo="pdo",
                period=50,
                target_exploitability=1e-3,
                max_iterations=10_000,
            )
        )
        assert result.stop_reason == "target"
        # deterministic run: golden iteration count recorded at first build
        assert result.log.last().iteration == 390
        assert result.k == 4

    def test_pdo1_equals_xodo_trajectories(self, kuhn1):
        def one(algo, **kw):
            return run(
                RunConfig(
                    game=kuhn1,
                    algo=algo,
                    max_iterations=150,
                    snapshot_every=1,
                    output="last_window",
                    **kw,
                )
            )

        a = one("pdo", period=1)
        b = one("xodo")
        assert a.window_lengths == b.window_lengths
        assert a.visited == b.visited
        assert a.state.pop.serialize() == b.state.pop.serialize()
        assert len(a.history.flats) == len(b.history.flats)
        for x, y in zip(a.history.flats, b.history.flats):
            assert np.array_equal(x, y)

    def test_xdo_threshold_sequence_halves(self, kuhn1):
        result = run(
            RunConfig(game=kuhn1, algo="xdo", max_iterations=500)
        )
        thresholds = [w["xdo_threshold"] for w in result.windows]
        for a, b in zip(thresholds, thresholds[1:]):
            assert b == pytest.approx(a / 2.0)
        assert result.derived_eps0 is not None
        assert thresholds[0] == pytest.approx(result.derived_eps0)

    def test_window_accounting(self, kuhn1):
        result = run(RunConfig(game=kuhn1, algo="pdo", period=25, max_iterations=400))
        assert sum(result.window_lengths) == result.log.last().iteration == 400
        assert result.k == len(result.window_lengths)
        meta_lengths = [w["length"] for w in result.windows]
        assert meta_lengths == result.window_lengths


class TestOutputStrategies:
    def test_single_window_overall_equals_window_average(self, kuhn1):
        result = run(RunConfig(game=kuhn1, algo="cfr", max_iterations=100))
        overall = overall_average_strategy(result)
        last = last_window_average_strategy(result)
        assert np.allclose(overall.flat, last.flat, atol=1e-12)

    def test_two_window_vanilla_weights_are_flat(self):
        history = RunHistory(game=None, variant="vanilla", snapshot_every=1)
        for j, length in ((0, 4), (1, 6)):
            for t in range(1, length + 1):
                history.track(j, t)
        weights = history.global_weights()
        assert np.allclose(weights, 0.1)
        assert weights.sum() == pytest.approx(1.0)

    def test_plus_weights_sum_to_one_under_any_partition(self):
        history = RunHistory(game=None, variant="plus", snapshot_every=1)
        for j, length in ((0, 3), (1, 8), (2, 5)):
            for t in range(1, length + 1):
                history.track(j, t)
        assert history.global_weights().sum() == pytest.approx(1.0, abs=1e-12)
        # prefix reads renormalize over the truncated partition
        assert history.global_weights(upto=5).sum() == pytest.approx(1.0, abs=1e-12)

    def test_outputs_default_per_algorithm(self, tiny_game):
        assert RunConfig(game=tiny_game, algo="xodo", max_iterations=1).output_kind() == "overall"
        for algo in ("pdo", "xdo", "cfr"):
            assert RunConfig(game=tiny_game, algo=algo, max_iterations=1).output_kind() == "last_window"

    def test_last_window_errors_right_after_reset(self, tiny_game):
        result = run(RunConfig(game=tiny_game, algo="cfr", max_iterations=5))
        result.state.tables.reset(result.state.view)
        with pytest.raises(EmptyWindowError):
            last_window_average_strategy(result)


class TestKStatistics:
    def test_tiny_bound(self, tiny_game):
        result = run(RunConfig(game=tiny_game, algo="pdo", period=1, max_iterations=20))
        stats = k_statistics(result)
        assert stats == {
            "k": 1,
            "infoset_total": 2,
            "bound_satisfied": True,
            "max_output_support": 1,
            "window_lengths": [20],
        }

    def test_k_is_resets_plus_one(self, kuhn1):
        result = run(RunConfig(game=kuhn1, algo="pdo", period=20, max_iterations=300))
        assert result.k == len(result.window_lengths)
        assert k_statistics(result)["k"] == result.k

    @pytest.mark.parametrize("algo,kw", [("pdo", {"period": 10}), ("xodo", {}), ("xdo", {})])
    def test_bound_holds_across_algorithms(self, kuhn1, algo, kw):
        result = run(RunConfig(game=kuhn1, algo=algo, max_iterations=250, **kw))
        assert k_statistics(result)["bound_satisfied"]


class TestStopRules:
    def test_max_iterations_is_exact(self, tiny_game):
        result = run(RunConfig(game=tiny_game, algo="cfr", max_iterations=37))
        assert result.log.last().iteration == 37
        assert result.stop_reason == "max_iterations"

    def test_max_visited_stops_promptly(self, kuhn1):
        budget = 20_000
        result = run(RunConfig(game=kuhn1, algo="pdo", period=50, max_visited=budget))
        assert result.stop_reason == "max_visited"
        assert result.visited >= budget
        # overshoot is at most one iteration plus one best-response pass
        assert result.visited <= budget + 4 * kuhn1.num_nodes

    def test_budget_exhaustion_is_reported_not_raised(self, kuhn1):
        result = run(
            RunConfig(
                game=kuhn1,
                algo="pdo",
                period=50,
                target_exploitability=1e-9,
                max_iterations=50,
            )
        )
        assert result.stop_reason == "max_iterations"
        assert result.exploitability > 1e-9
