"""Population bookkeeping and restricted-game construction.

A population is the per-infoset set of admitted actions. The restricted
game is the subtree reachable through admitted actions only; it shares the
full game's infoset layout, so strategies, regrets and accumulators never
need re-indexing when the population grows.
"""

from __future__ import annotations

import numpy as np

from .tree import GameTree, BehaviorStrategy, JointStrategy, subtree
from .oracle import BestResponseResult, best_response

MASS_TOL = 1e-9


class Population:
    """Per-player, per-infoset admitted actions; grows monotonically."""

    def __init__(self, game: GameTree):
        self.game = game.base
        isets = self.game.isets
        self.admitted = np.zeros(isets.total_slots, dtype=bool)
        self.order = [[] for _ in range(isets.num_infosets)]
        self.generation = 0

    @classmethod
    def full(cls, game: GameTree) -> "Population":
        pop = cls(game)
        pop.admitted[:] = True
        isets = game.base.isets
        for s in range(isets.num_infosets):
            pop.order[s] = list(range(int(isets.n_actions[s])))
        return pop

    def admit(self, s: int, a: int) -> bool:
        """Admit action ``a`` at infoset ``s``; True if it was new."""
        slot = int(self.game.isets.offset[s] + a)
        if self.admitted[slot]:
            return False
        self.admitted[slot] = True
        self.order[int(s)].append(int(a))
        return True

    def admitted_actions(self, s: int) -> list:
        return list(self.order[int(s)])

    @property
    def size(self) -> int:
        """Total number of admitted actions across both players."""
        return int(self.admitted.sum())

    def serialize(self) -> dict:
        """Per-infoset admitted action indices, keyed by infoset label."""
        isets = self.game.isets
        out = {"player1": {}, "player2": {}}
        for s in range(isets.num_infosets):
            if self.order[s]:
                side = "player1" if isets.player[s] == 0 else "player2"
                out[side][isets.labels[s]] = list(self.order[s])
        return out

    @classmethod
    def deserialize(cls, game: GameTree, data: dict) -> "Population":
        pop = cls(game)
        isets = game.base.isets
        index = {(int(isets.player[s]), isets.labels[s]): s for s in range(isets.num_infosets)}
        for side, player in (("player1", 0), ("player2", 1)):
            for label, actions in data.get(side, {}).items():
                s = index[(player, label)]
                for a in actions:
                    pop.admit(s, int(a))
        return pop


def init_population(game: GameTree) -> Population:
    """Admit each player's best response to the uniform joint strategy."""
    pop = Population(game)
    uniform = JointStrategy.uniform(game)
    for player in (0, 1):
        br = best_response(game, uniform[1 - player], player)
        merge_best_response(pop, br, player)
    return pop


def merge_best_response(pop: Population, br: BestResponseResult, player: int) -> bool:
    """Union the best response's action at every infoset; True if any is new."""
    isets = pop.game.isets
    changed = False
    for s in isets.infosets_of(player):
        choice = int(br.choices[s])
        if choice < 0:
            raise ValueError("best response is not total")
        if pop.admit(int(s), choice):
            changed = True
    return changed


def restricted_view(game: GameTree, pop: Population) -> GameTree:
    """The subtree reachable through admitted actions, sharing the layout.

    Chance edges are never restricted. The returned view snapshots the
    current admitted mask, so later population growth does not disturb it.
    """
    if pop.size == 0:
        raise ValueError("population is empty; initialize it first")
    counts = game.isets.row_sums(pop.admitted.astype(np.float64))
    if np.any(counts == 0):
        s = int(np.flatnonzero(counts == 0)[0])
        raise ValueError(f"infoset {game.isets.labels[s]!r} has no admitted actions")
    aids = game.aids()
    ok = np.ones(game.num_nodes, dtype=bool)
    pe = aids.player_edges
    ok[pe] = pop.admitted[game.pslot[pe]]
    keep = np.ones(game.num_nodes, dtype=bool)
    for batch in aids.levels:
        keep[batch] = keep[game.parent[batch]] & ok[batch]
    return subtree(game, keep, pop.admitted, name=f"{game.name}|gen{pop.generation}")


def expand_strategy(strategy: BehaviorStrategy, pop: Population, game: GameTree) -> BehaviorStrategy:
    """Lift a restricted-game strategy to the full game.

    Admitted actions keep their probabilities and everything else gets
    zero. Infosets carrying no probability mass (absent from the restricted
    view) fall back to uniform, over the admitted actions when there are
    any and over the full action set otherwise.
    """
    isets = game.base.isets
    player = strategy.player
    mine = isets.slot_player == player
    outside = np.abs(strategy.flat * (~pop.admitted & mine))
    if outside.sum() > MASS_TOL:
        bad = int(isets.slot_iset[int(np.argmax(outside))])
        raise ValueError(
            f"strategy places probability on non-admitted actions at infoset "
            f"{isets.labels[bad]!r}"
        )
    kept = np.where(pop.admitted & mine, strategy.flat, 0.0)
    adm_counts = isets.row_sums(pop.admitted.astype(np.float64))
    uniform = np.where(
        isets.spread(adm_counts > 0),
        pop.admitted / isets.spread(np.maximum(adm_counts, 1.0)),
        1.0 / isets.spread(isets.n_actions.astype(np.float64)),
    )
    sums = isets.row_sums(kept)
    flat = np.where(isets.spread(sums > 0), kept, uniform)
    return BehaviorStrategy(game.base, player, np.where(mine, flat, 0.0))
