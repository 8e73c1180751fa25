import numpy as np
import pytest

from rmdo import games
from rmdo.estimators import CFRSolver, DoubleOracleSolver, NotFittedError, check_game
from rmdo.games import GameSpec
from rmdo.tree import P1, GameTree


class TestParamsProtocol:
    def test_get_params_round_trips_constructor_args(self):
        solver = DoubleOracleSolver(algo="xodo", eval_every=5)
        params = solver.get_params()
        assert params["algo"] == "xodo"
        assert params["eval_every"] == 5
        clone = DoubleOracleSolver(**params)
        assert clone.get_params() == params

    def test_set_params_chains_and_validates(self):
        solver = DoubleOracleSolver()
        assert solver.set_params(period=10).period == 10
        with pytest.raises(ValueError, match="invalid parameter"):
            solver.set_params(learning_rate=0.1)

    def test_sklearn_clone_compatible(self):
        from sklearn.base import clone

        solver = DoubleOracleSolver(algo="pdo", period=25)
        cloned = clone(solver)
        assert cloned is not solver
        assert cloned.get_params() == solver.get_params()


class TestFit:
    def test_fit_sets_learned_attributes(self, kuhn1):
        solver = DoubleOracleSolver(algo="pdo", period=50, target_exploitability=1e-3,
                                    max_iterations=5000)
        assert solver.fit(kuhn1) is solver
        assert solver.exploitability_ <= 1e-3
        assert solver.stop_reason_ == "target"
        assert solver.n_windows_ >= 1
        assert solver.visited_nodes_ > 0
        solver.strategy_.validate()

    def test_fit_accepts_spec_and_family_name(self):
        solver = DoubleOracleSolver(algo="pdo", period=1, max_iterations=10)
        solver.fit(GameSpec.make("tiny"))
        assert isinstance(solver.game_, GameTree)
        solver.fit("tiny")
        assert solver.game_.name == "tiny"

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            DoubleOracleSolver().score()

    def test_score_is_negated_exploitability(self, tiny_game):
        solver = DoubleOracleSolver(algo="pdo", period=1, max_iterations=20).fit(tiny_game)
        assert solver.score() == -solver.exploitability_

    def test_action_probabilities(self, tiny_game):
        solver = DoubleOracleSolver(algo="pdo", period=1, max_iterations=20).fit(tiny_game)
        probs = solver.action_probabilities(P1, "p1")
        assert probs == {"L": 1.0, "R": 0.0}

    def test_cfr_solver_on_kuhn(self, kuhn1):
        solver = CFRSolver(iterations=1000).fit(kuhn1)
        assert solver.exploitability_ < 1e-3
        assert solver.n_windows_ == 1


class TestCheckGame:
    def test_rejects_non_games(self):
        with pytest.raises(TypeError):
            check_game(42)

    def test_accepts_tree(self, kuhn1):
        assert check_game(kuhn1) is kuhn1

    def test_rejects_invalid_tree(self):
        from rmdo.tree import Decision, Terminal, build_game

        def expand(state):
            if state == "root":
                return Decision(P1, "root", [("A", "a"), ("B", "b")])
            if state in ("a", "b"):
                return Decision(P1, "merged", [("x", state + "x")])
            return Terminal(0.0)

        bad = build_game("root", expand, check=False)
        with pytest.raises(ValueError, match="invalid game"):
            check_game(bad)
