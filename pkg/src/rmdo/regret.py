"""CFR-family regret minimization inside a game or restricted view.

One iteration traverses the tree once per player against the same
start-of-iteration joint strategy, accumulates counterfactual regrets,
refreshes the current strategy by regret matching, and adds the played
strategy into the window-average accumulator.

Averaging is reach-weighted over every infoset of the full game (own reach
only depends on a player's own strategy, so this is a cheap sweep over the
infoset forest, not a tree traversal). The window average is therefore an
exact mixture of the played strategies, which is what makes measured
average regrets and exploitability agree to float precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import (
    P1,
    P2,
    PLAYERS,
    GameTree,
    JointStrategy,
    edge_factors,
    node_values,
    reach_excluding,
)

VARIANTS = ("vanilla", "plus")


class EmptyWindowError(RuntimeError):
    """Raised when a window average is requested before any iteration ran."""


@dataclass(frozen=True)
class WeightScheme:
    """Within-window averaging weights: uniform (vanilla) or linear (plus)."""

    variant: str = "plus"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown regret variant {self.variant!r}")

    def raw_weight(self, t: int) -> float:
        """Unnormalized weight of within-window iteration ``t`` (1-based)."""
        return 1.0 if self.variant == "vanilla" else float(t)


def window_weight(scheme: WeightScheme, t: int, window_len: int) -> float:
    """Normalized weight of within-window iteration ``t`` of a closed window."""
    if not 1 <= t <= window_len:
        raise ValueError(f"iteration {t} outside window of length {window_len}")
    if scheme.variant == "vanilla":
        return 1.0 / window_len
    return 2.0 * t / (window_len * (window_len + 1))


def regret_matching(cum_regrets, variant: str = "vanilla") -> np.ndarray:
    """Distribution proportional to positive regrets; uniform if none.

    The ``plus`` variant differs only in how the stored table is updated
    (clamped at zero after each accumulation); the matching rule itself is
    identical for both variants.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown regret variant {variant!r}")
    cum = np.asarray(cum_regrets, dtype=np.float64)
    if cum.size == 0:
        raise ValueError("empty regret vector")
    pos = np.maximum(cum, 0.0)
    total = pos.sum()
    if total <= 0.0:
        return np.full(cum.shape, 1.0 / cum.size)
    return pos / total


class RegretTables:
    """Cumulative regrets, current strategy and window-average accumulators.

    Sized to the full game's flat slot layout; the restricted view only
    masks which slots may carry probability. Exclusively owned by one run.
    """

    def __init__(self, view: GameTree, variant: str = "plus"):
        self.scheme = WeightScheme(variant)
        self.isets = view.isets
        self.regrets = np.zeros(self.isets.total_slots)
        self.acc = np.zeros(self.isets.total_slots)
        self.weight_sum = 0.0
        self.count = 0
        self.view = view
        self.current = self._match()

    @property
    def variant(self) -> str:
        return self.scheme.variant

    def _match(self) -> np.ndarray:
        pos = np.where(self.view.admitted, np.maximum(self.regrets, 0.0), 0.0)
        return self.isets.normalize_rows(pos, self.view.admitted)

    def reset(self, view: GameTree) -> None:
        """Start a new window on a (possibly regrown) restricted view."""
        self.view = view
        self.regrets[:] = 0.0
        self.acc[:] = 0.0
        self.weight_sum = 0.0
        self.count = 0
        self.current = self._match()

    def accumulate(self, flat: np.ndarray) -> None:
        """Add one played joint strategy into the window-average accumulator."""
        t = self.count + 1
        u = self.scheme.raw_weight(t)
        own = self.isets.own_reach(flat)
        self.acc += u * own[self.isets.slot_iset] * flat
        self.weight_sum += u
        self.count = t

    def window_average_flat(self) -> np.ndarray:
        if self.count == 0:
            raise EmptyWindowError("no iterations accumulated in the current window")
        return self.isets.normalize_rows(self.acc, self.view.admitted)


def _player_regret_increment(view: GameTree, flat: np.ndarray, player: int) -> np.ndarray:
    """Instantaneous counterfactual regrets of one player against ``flat``."""
    aids = view.aids()
    sign = 1.0 if player == P1 else -1.0
    factors = edge_factors(view, flat)
    values = node_values(view, flat, P1, factors=factors)
    ext = reach_excluding(view, flat, player, factors=factors)
    ch = aids.children_of[player]
    inc = np.zeros(view.isets.total_slots)
    np.add.at(
        inc,
        view.pslot[ch],
        sign * ext[view.parent[ch]] * (values[ch] - values[view.parent[ch]]),
    )
    return inc


def cfr_iteration(view: GameTree, tables: RegretTables) -> int:
    """One full CFR iteration for both players on ``view``.

    The vanilla variant is the classic simultaneous update: both players'
    regrets are computed against the joint strategy at entry, then both
    update. The plus variant alternates in the usual CFR+ fashion: player 1
    traverses and updates, then player 2 traverses against the refreshed
    strategy. Either way the strategy snapshot entering the iteration is
    what gets averaged, so window averages remain exact mixtures of the
    played sequence.

    Returns the number of nodes traversed (one full pass per player).
    """
    if tables.view is not view:
        raise ValueError("tables were sized for a different view")
    flat = tables.current
    tables.accumulate(flat)

    if tables.variant == "plus":
        for player in PLAYERS:
            inc = _player_regret_increment(view, tables.current, player)
            mine = tables.isets.slot_player == player
            np.maximum(tables.regrets + inc, 0.0, where=mine, out=tables.regrets)
            tables.current = np.where(mine, tables._match(), tables.current)
    else:
        inc = _player_regret_increment(view, flat, P1)
        inc += _player_regret_increment(view, flat, P2)
        tables.regrets += inc
        tables.current = tables._match()
    return 2 * view.num_nodes


def window_average_strategy(tables: RegretTables) -> JointStrategy:
    """Current-window weighted average, expanded to the full game."""
    return JointStrategy.from_flat(tables.view.base, tables.window_average_flat())


def reset_for_new_window(tables: RegretTables, view: GameTree) -> RegretTables:
    tables.reset(view)
    return tables
