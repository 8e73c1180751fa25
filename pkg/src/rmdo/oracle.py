"""Exact best responses and exploitability over full games or restricted views."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .tree import (
    P1,
    P2,
    TERMINAL,
    BehaviorStrategy,
    GameTree,
    JointStrategy,
    edge_factors,
    node_values,
    reach_excluding,
)


@dataclass
class BestResponseResult:
    """A pure best response: per-infoset action choices plus its value."""

    strategy: BehaviorStrategy
    value: float
    visited: int
    choices: np.ndarray  # chosen action index per infoset (-1 on the opponent's rows)

    @property
    def player(self) -> int:
        return self.strategy.player


def best_response(game: GameTree, opponent: BehaviorStrategy, player: int) -> BestResponseResult:
    """Maximize the player's value against a fixed opponent strategy.

    One counterfactual sweep: opponent-and-chance reach flows down, values
    flow up, and at each of the player's infosets the reach-weighted action
    values are maximized jointly over the infoset's member histories. Ties
    break to the lowest action index, and infosets the opponent never
    reaches still receive a deterministic choice, so the result is total.
    """
    opponent.validate()
    if opponent.player == player:
        raise ValueError("opponent strategy belongs to the responding player")
    isets = game.isets
    aids = game.aids()
    flat = opponent.flat

    alpha = reach_excluding(game, flat, player)
    factors = edge_factors(game, flat)
    u = np.zeros(game.num_nodes)
    u[aids.terminals] = (1.0 if player == P1 else -1.0) * game.payoff[aids.terminals]
    q = np.zeros(isets.total_slots)
    choices = np.full(isets.num_infosets, -1, dtype=np.int64)

    blocks = aids.isets_by_depth[player]
    for depth_children in range(aids.max_depth, 0, -1):
        batch = aids.levels[depth_children - 1]
        if batch.size == 0:
            continue
        own = batch[aids.edge_owner[batch] == player]
        rest = batch[aids.edge_owner[batch] != player]
        if rest.size:
            np.add.at(u, game.parent[rest], factors[rest] * u[rest])
        if own.size:
            np.add.at(q, game.pslot[own], alpha[game.parent[own]] * u[own])
            block = blocks.get(depth_children - 1)
            if block is not None:
                choices[block.rows] = block.argmax(q, game.admitted)
            sel = own[game.slot[own] == choices[game.infoset[game.parent[own]]]]
            u[game.parent[sel]] = u[sel]

    # infosets absent from this tree (possible on restricted views): pick the
    # first admitted action so the strategy stays total
    mine = isets.infosets_of(player)
    unset = mine[choices[mine] < 0]
    for s in unset:
        row = game.admitted[isets.offset[s] : isets.offset[s + 1]]
        choices[s] = int(np.flatnonzero(row)[0]) if row.any() else 0

    pure = np.zeros(isets.total_slots)
    pure[isets.offset[mine] + choices[mine]] = 1.0
    strategy = BehaviorStrategy(game, player, pure)
    return BestResponseResult(
        strategy=strategy,
        value=float(u[0]),
        visited=game.num_nodes,
        choices=choices,
    )


def exploitability(game: GameTree, joint: JointStrategy) -> float:
    """Sum of both players' best-response gains against the profile.

    Because payoffs are zero-sum by construction the profile's own values
    cancel exactly, leaving the sum of the two best-response values.
    """
    br1 = best_response(game, joint.p2, P1)
    br2 = best_response(game, joint.p1, P2)
    return br1.value + br2.value


def brute_force_best_response(
    game: GameTree, opponent: BehaviorStrategy, player: int, cap: int = 100_000
) -> BestResponseResult:
    """Enumerate every pure strategy and return the best (test oracle).

    Intentionally independent of :func:`best_response`: each candidate is
    scored with a full expected-value traversal.
    """
    opponent.validate()
    isets = game.isets
    mine = isets.infosets_of(player)
    total = 1
    for s in mine:
        total *= int(isets.n_actions[s])
        if total > cap:
            raise ValueError(f"pure strategy count exceeds cap {cap}")

    sign = 1.0 if player == P1 else -1.0
    best_value, best_choice = -np.inf, None
    for combo in itertools.product(*(range(isets.n_actions[s]) for s in mine)):
        flat = opponent.flat.copy()
        flat[isets.offset[mine] + np.asarray(combo, dtype=np.int64)] = 1.0
        value = sign * node_values(game, flat, P1)[0]
        if value > best_value:
            best_value, best_choice = value, combo

    choices = np.full(isets.num_infosets, -1, dtype=np.int64)
    choices[mine] = best_choice
    pure = np.zeros(isets.total_slots)
    pure[isets.offset[mine] + choices[mine]] = 1.0
    return BestResponseResult(
        strategy=BehaviorStrategy(game, player, pure),
        value=float(best_value),
        visited=total * game.num_nodes,
        choices=choices,
    )
