import itertools

import numpy as np
import pytest

from rmdo import games
from rmdo.oracle import best_response, brute_force_best_response, exploitability
from rmdo.tree import (
    P1,
    P2,
    BehaviorStrategy,
    Decision,
    JointStrategy,
    Terminal,
    build_game,
    node_values,
)

from conftest import random_behavior


def action_of(game, result, infoset):
    return game.isets.action_labels[infoset][result.choices[infoset]]


class TestTinyBestResponses:
    def test_circle_vs_uniform(self, tiny_game):
        br = best_response(tiny_game, BehaviorStrategy.uniform(tiny_game, P2), P1)
        assert br.value == pytest.approx(1.5, abs=1e-12)
        assert action_of(tiny_game, br, 0) == "L"

    def test_square_vs_uniform(self, tiny_game):
        br = best_response(tiny_game, BehaviorStrategy.uniform(tiny_game, P1), P2)
        assert br.value == pytest.approx(0.0, abs=1e-12)
        assert action_of(tiny_game, br, 1) == "Y"

    def test_square_vs_pure_left(self, tiny_game):
        left = BehaviorStrategy.from_pure(tiny_game, P1, {0: 0})
        br = best_response(tiny_game, left, P2)
        assert br.value == pytest.approx(-1.0, abs=1e-12)
        assert action_of(tiny_game, br, 1) == "Y"

    def test_result_is_pure_and_total(self, tiny_game):
        br = best_response(tiny_game, BehaviorStrategy.uniform(tiny_game, P2), P1)
        br.strategy.validate()
        for s in tiny_game.isets.infosets_of(P1):
            assert set(br.strategy.probs(s)) <= {0.0, 1.0}


class TestExploitability:
    def test_tiny_equilibrium_is_exact(self, tiny_game):
        joint = JointStrategy(
            BehaviorStrategy.from_pure(tiny_game, P1, {0: 0}),
            BehaviorStrategy.from_pure(tiny_game, P2, {1: 1}),
        )
        assert abs(exploitability(tiny_game, joint)) <= 1e-12

    def test_tiny_uniform(self, tiny_game):
        e = exploitability(tiny_game, JointStrategy.uniform(tiny_game))
        assert e == pytest.approx(1.5, abs=1e-12)

    def test_matching_pennies_uniform_is_equilibrium(self):
        def expand(state):
            if state == ():
                return Decision(P1, "p1", [("H", ("H",)), ("T", ("T",))])
            if len(state) == 1:
                return Decision(P2, "p2", [("H", (*state, "H")), ("T", (*state, "T"))])
            return Terminal(1.0 if state[0] == state[1] else -1.0)

        game = build_game((), expand, name="pennies")
        assert abs(exploitability(game, JointStrategy.uniform(game))) <= 1e-12

    @pytest.mark.parametrize("fixture", ["tiny_game", "kuhn1", "blotto23", "oshi421"])
    def test_never_negative(self, fixture, request):
        game = request.getfixturevalue(fixture)
        rng = np.random.default_rng(41)
        for _ in range(10):
            joint = JointStrategy(
                random_behavior(game, P1, rng), random_behavior(game, P2, rng)
            )
            assert exploitability(game, joint) >= -1e-9


class TestBruteForceAgreement:
    @pytest.mark.parametrize("fixture", ["tiny_game", "kuhn1", "blotto23"])
    def test_values_agree_on_random_opponents(self, fixture, request):
        game = request.getfixturevalue(fixture)
        rng = np.random.default_rng(97)
        for _ in range(25):
            for player in (P1, P2):
                opponent = random_behavior(game, 1 - player, rng)
                fast = best_response(game, opponent, player)
                slow = brute_force_best_response(game, opponent, player)
                assert abs(fast.value - slow.value) < 1e-12

    def test_single_infoset_game_is_plain_argmax(self, blotto23):
        opponent = BehaviorStrategy.uniform(blotto23, P2)
        br = brute_force_best_response(blotto23, opponent, P1)
        # committing the strongest force maximizes the expected difference
        assert action_of(blotto23, br, 0) == "2"

    def test_cap_enforced(self, oshi421):
        with pytest.raises(ValueError, match="cap"):
            brute_force_best_response(oshi421, BehaviorStrategy.uniform(oshi421, P2), P1, cap=10)


class TestDominance:
    def test_no_pure_strategy_beats_best_response(self, tiny_game):
        rng = np.random.default_rng(3)
        opponent = random_behavior(tiny_game, P2, rng)
        br = best_response(tiny_game, opponent, P1)
        isets = tiny_game.isets
        mine = isets.infosets_of(P1)
        for combo in itertools.product(*(range(isets.n_actions[s]) for s in mine)):
            pure = BehaviorStrategy.from_pure(tiny_game, P1, dict(zip(map(int, mine), combo)))
            value = node_values(tiny_game, (pure.flat + opponent.flat), P1)[0]
            assert value <= br.value + 1e-12


class TestAccounting:
    @pytest.mark.parametrize("fixture", ["tiny_game", "kuhn1", "oshi421"])
    def test_visited_count_is_the_node_count(self, fixture, request):
        game = request.getfixturevalue(fixture)
        br = best_response(game, BehaviorStrategy.uniform(game, P2), P1)
        assert br.visited == game.num_nodes

    def test_partial_opponent_rejected(self, kuhn1):
        partial = BehaviorStrategy.uniform(kuhn1, P2)
        s = int(kuhn1.isets.infosets_of(P2)[0])
        partial.set_probs(s, [0.0, 0.0])
        with pytest.raises(ValueError):
            best_response(kuhn1, partial, P1)

    def test_same_player_rejected(self, kuhn1):
        with pytest.raises(ValueError):
            best_response(kuhn1, BehaviorStrategy.uniform(kuhn1, P1), P1)
