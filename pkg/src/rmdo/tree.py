"""Explicit game trees and strategy primitives for two-player zero-sum games.

A game is materialized as flat numpy arrays over nodes in depth-first
preorder (parents always precede children). Every traversal used elsewhere
(expected values, best responses, regret updates) then runs as a few
vectorized sweeps per tree depth level instead of per-node recursion.

Payoffs are stored for player 1 only; player 2's payoff is the negation, so
the zero-sum identity holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

P1 = 0
P2 = 1
CHANCE = 2
TERMINAL = 3

PLAYERS = (P1, P2)

DIST_TOL = 1e-9
CHANCE_TOL = 1e-12


class GameStructureError(ValueError):
    """Raised when a game definition is structurally malformed."""


# ---------------------------------------------------------------------------
# Game definition protocol (consumed by build_game)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Terminal:
    payoff: float  # player 1's payoff; player 2 receives the negation


@dataclass(frozen=True)
class Chance:
    outcomes: list  # [(prob, label, state), ...]


@dataclass(frozen=True)
class Decision:
    player: int
    key: str  # infoset key, unique per (player, key)
    actions: list  # [(label, state), ...]


@dataclass(frozen=True)
class InfosetTable:
    """Infoset-level layout shared by a game and all of its restricted views.

    Strategies, regrets and average-strategy accumulators are flat float
    vectors of length ``total_slots``; infoset ``s`` owns the slice
    ``offset[s]:offset[s+1]``.
    """

    player: np.ndarray  # int8[m]
    n_actions: np.ndarray  # int32[m]
    offset: np.ndarray  # int64[m + 1]
    labels: list
    action_labels: list  # per infoset, tuple of action labels
    own_parent_iset: np.ndarray  # int32[m], -1 at the player's first decision
    own_parent_slot: np.ndarray  # int64[m], flat slot of the preceding own action
    own_levels: list  # infoset-id batches by own-action depth
    slot_iset: np.ndarray  # int32[total_slots]
    slot_index: np.ndarray  # int32[total_slots], index of slot within its row
    slot_player: np.ndarray = None  # int8[total_slots], owner of each slot

    @property
    def num_infosets(self) -> int:
        return len(self.n_actions)

    @property
    def total_slots(self) -> int:
        return int(self.offset[-1])

    def infosets_of(self, player: int) -> np.ndarray:
        return np.flatnonzero(self.player == player)

    def row(self, values: np.ndarray, s: int) -> np.ndarray:
        return values[self.offset[s] : self.offset[s + 1]]

    def row_sums(self, values: np.ndarray) -> np.ndarray:
        return np.add.reduceat(values, self.offset[:-1])

    def spread(self, row_values: np.ndarray) -> np.ndarray:
        """Broadcast one value per infoset to every slot of that infoset."""
        return np.repeat(row_values, self.n_actions)

    def normalize_rows(self, mass: np.ndarray, admitted: np.ndarray) -> np.ndarray:
        """Per-infoset normalization with uniform-over-admitted fallback."""
        sums = self.row_sums(mass)
        counts = self.row_sums(admitted.astype(np.float64))
        uniform = admitted / self.spread(np.maximum(counts, 1.0))
        ok = self.spread(sums > 0.0)
        return np.where(ok, mass / self.spread(np.where(sums > 0.0, sums, 1.0)), uniform)

    def own_reach(self, flat: np.ndarray) -> np.ndarray:
        """Each player's own reaching contribution to each of their infosets."""
        x = np.ones(self.num_infosets)
        for batch in self.own_levels[1:]:
            x[batch] = x[self.own_parent_iset[batch]] * flat[self.own_parent_slot[batch]]
        return x


class GameTree:
    """Immutable explicit extensive-form game (or a restricted view of one).

    Restricted views share the ``isets`` table (and therefore the flat slot
    layout) with the full game; only the node arrays and the ``admitted``
    action mask differ.
    """

    def __init__(
        self,
        isets: InfosetTable,
        kind: np.ndarray,
        infoset: np.ndarray,
        payoff: np.ndarray,
        parent: np.ndarray,
        slot: np.ndarray,
        pslot: np.ndarray,
        chance_p: np.ndarray,
        depth: np.ndarray,
        admitted: np.ndarray | None = None,
        name: str = "game",
        base: "GameTree | None" = None,
    ):
        self.isets = isets
        self.kind = kind
        self.infoset = infoset
        self.payoff = payoff
        self.parent = parent
        self.slot = slot
        self.pslot = pslot
        self.chance_p = chance_p
        self.depth = depth
        if admitted is None:
            admitted = np.ones(isets.total_slots, dtype=bool)
        self.admitted = admitted
        self.name = name
        self.base = base if base is not None else self
        self._aids = None

    @property
    def num_nodes(self) -> int:
        return len(self.kind)

    def num_infosets(self, player: int | None = None) -> int:
        if player is None:
            return self.isets.num_infosets
        return int((self.isets.player == player).sum())

    @property
    def payoff_range(self) -> float:
        term = self.payoff[self.kind == TERMINAL]
        if term.size == 0:
            return 0.0
        return float(term.max() - term.min())

    def aids(self) -> "_TraversalAids":
        if self._aids is None:
            self._aids = _TraversalAids(self)
        return self._aids

    def __repr__(self):
        return (
            f"GameTree({self.name!r}, nodes={self.num_nodes}, "
            f"infosets={self.isets.num_infosets})"
        )


class _TraversalAids:
    """Per-tree precomputed index arrays backing the vectorized sweeps."""

    def __init__(self, tree: GameTree):
        n = tree.num_nodes
        self.terminals = np.flatnonzero(tree.kind == TERMINAL)
        owner = np.full(n, -1, dtype=np.int8)
        if n > 1:
            owner[1:] = tree.kind[tree.parent[1:]]
        self.edge_owner = owner
        self.player_edges = np.flatnonzero((owner == P1) | (owner == P2))
        self.chance_edges = np.flatnonzero(owner == CHANCE)
        self.children_of = {p: np.flatnonzero(owner == p) for p in PLAYERS}

        max_depth = int(tree.depth.max()) if n else 0
        order = np.argsort(tree.depth[1:], kind="stable") + 1 if n > 1 else np.array([], dtype=int)
        bounds = np.searchsorted(tree.depth[order], np.arange(1, max_depth + 1), side="right")
        self.levels = [order[a:b] for a, b in zip(np.r_[0, bounds[:-1]], bounds)]
        self.max_depth = max_depth

        # children of player-p nodes grouped by the parent's depth (for BR)
        self.player_children_by_depth = {}
        for p in PLAYERS:
            ch = self.children_of[p]
            pd = tree.depth[tree.parent[ch]] if ch.size else np.array([], dtype=tree.depth.dtype)
            self.player_children_by_depth[p] = {
                d: ch[pd == d] for d in np.unique(pd)
            }

        # first member node of each infoset present in this tree
        m = tree.isets.num_infosets
        rep = np.full(m, -1, dtype=np.int64)
        dec = np.flatnonzero((tree.kind == P1) | (tree.kind == P2))
        for node in dec[::-1]:
            rep[tree.infoset[node]] = node
        self.iset_rep = rep

        # infosets present in this tree, grouped by (uniform) member depth
        self.isets_by_depth = {p: {} for p in PLAYERS}
        present = np.flatnonzero(rep >= 0)
        for s in present:
            p = int(tree.isets.player[s])
            d = int(tree.depth[rep[s]])
            self.isets_by_depth[p].setdefault(d, []).append(s)
        for p in PLAYERS:
            self.isets_by_depth[p] = {
                d: RowBlock(tree.isets, np.asarray(v, dtype=np.int64))
                for d, v in self.isets_by_depth[p].items()
            }
        self.present_isets = present


class RowBlock:
    """A batch of infoset rows supporting vectorized per-row reductions."""

    def __init__(self, isets: InfosetTable, rows: np.ndarray):
        self.rows = rows
        self.nact = isets.n_actions[rows].astype(np.int64)
        self.starts = np.r_[0, np.cumsum(self.nact)[:-1]]
        self.slots = np.concatenate(
            [np.arange(isets.offset[s], isets.offset[s + 1]) for s in rows]
        ) if len(rows) else np.zeros(0, dtype=np.int64)
        self.local_index = np.arange(len(self.slots)) - np.repeat(self.starts, self.nact)

    def argmax(self, values: np.ndarray, allowed: np.ndarray) -> np.ndarray:
        """Per-row index of the max allowed entry; ties go to the lowest index."""
        if len(self.rows) == 0:
            return np.zeros(0, dtype=np.int64)
        vals = np.where(allowed[self.slots], values[self.slots], -np.inf)
        rowmax = np.maximum.reduceat(vals, self.starts)
        hit = vals == np.repeat(rowmax, self.nact)
        cand = np.where(hit, self.local_index, np.iinfo(np.int64).max)
        return np.minimum.reduceat(cand, self.starts)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def build_game(root_state, expand, name: str = "game", check: bool = True) -> GameTree:
    """Materialize a game tree from a state-expansion function.

    ``expand(state)`` must return a :class:`Terminal`, :class:`Chance` or
    :class:`Decision` describing that state. Nodes are numbered in
    depth-first preorder with actions kept in definition order, so identical
    definitions always produce identical trees.
    """
    kind, infoset, payoff, parent, slot, pslot, chance_p, depth = [], [], [], [], [], [], [], []
    iset_ids = {}
    iset_player, iset_nact, iset_labels, iset_action_labels = [], [], [], []
    iset_own_parent = []  # (iset, flat_slot) pending offsets
    iset_depth = []

    # stack entries: (state, parent_id, slot_idx, pslot_kind, chance_prob, depth, own1, own2)
    stack = [(root_state, -1, -1, None, 1.0, 0, (-1, -1), (-1, -1))]
    while stack:
        state, par, sl, pk, cp, d, own1, own2 = stack.pop()
        node = expand(state)
        nid = len(kind)
        parent.append(par)
        slot.append(sl)
        depth.append(d)
        chance_p.append(cp)
        pslot.append(pk if pk is not None else (-1, -1))

        if isinstance(node, Terminal):
            kind.append(TERMINAL)
            infoset.append(-1)
            payoff.append(float(node.payoff))
            continue
        payoff.append(0.0)
        if isinstance(node, Chance):
            kind.append(CHANCE)
            infoset.append(-1)
            if check:
                total = sum(p for p, _, _ in node.outcomes)
                if abs(total - 1.0) > CHANCE_TOL or any(p < 0 for p, _, _ in node.outcomes):
                    raise GameStructureError(
                        f"chance node {nid}: outcome probabilities invalid (sum {total})"
                    )
                if not node.outcomes:
                    raise GameStructureError(f"chance node {nid} has no outcomes")
            for i, (prob, _label, child) in enumerate(reversed(node.outcomes)):
                stack.append((child, nid, len(node.outcomes) - 1 - i, None, float(prob), d + 1, own1, own2))
            continue
        if not isinstance(node, Decision):
            raise GameStructureError(f"expand() returned {type(node).__name__}")

        p = node.player
        if p not in PLAYERS:
            raise GameStructureError(f"decision node {nid}: player must be 0 or 1")
        labels = tuple(lab for lab, _ in node.actions)
        ref = (p, node.key)
        if ref in iset_ids:
            s = iset_ids[ref]
            if check and labels != iset_action_labels[s]:
                raise GameStructureError(
                    f"infoset {node.key!r}: inconsistent action sets {labels} vs "
                    f"{iset_action_labels[s]}"
                )
            prev = own1 if p == P1 else own2
            if check and iset_own_parent[s] != prev:
                raise GameStructureError(
                    f"infoset {node.key!r}: perfect recall violated (conflicting own history)"
                )
            if check and iset_depth[s] != d:
                raise GameStructureError(
                    f"infoset {node.key!r}: member histories at different depths"
                )
        else:
            if check and not node.actions:
                raise GameStructureError(f"decision node {nid} has an empty action set")
            s = len(iset_player)
            iset_ids[ref] = s
            iset_player.append(p)
            iset_nact.append(len(labels))
            iset_labels.append(node.key)
            iset_action_labels.append(labels)
            iset_own_parent.append(own1 if p == P1 else own2)
            iset_depth.append(d)
        kind.append(p)
        infoset.append(s)
        for i, (_label, child) in enumerate(reversed(node.actions)):
            a = len(node.actions) - 1 - i
            child_own = (s, a)
            o1, o2 = (child_own, own2) if p == P1 else (own1, child_own)
            stack.append((child, nid, a, (s, a), 1.0, d + 1, o1, o2))

    m = len(iset_player)
    nact = np.asarray(iset_nact, dtype=np.int32)
    offset = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(nact, out=offset[1:])

    def to_flat(ref):
        s, a = ref
        return -1 if s < 0 else int(offset[s] + a)

    own_parent_iset = np.asarray([s for s, _ in iset_own_parent], dtype=np.int32) if m else np.zeros(0, np.int32)
    own_parent_slot = np.asarray([to_flat(r) for r in iset_own_parent], dtype=np.int64) if m else np.zeros(0, np.int64)

    own_depth = np.zeros(m, dtype=np.int32)
    for s in range(m):  # infosets are interned parents-first along any path
        par = own_parent_iset[s]
        if par >= 0:
            own_depth[s] = own_depth[par] + 1
    own_levels = [np.flatnonzero(own_depth == d) for d in range(int(own_depth.max()) + 1 if m else 1)]

    slot_iset = np.repeat(np.arange(m, dtype=np.int32), nact)
    slot_index = (np.arange(offset[-1], dtype=np.int64) - offset[slot_iset]).astype(np.int32)

    isets = InfosetTable(
        player=np.asarray(iset_player, dtype=np.int8),
        n_actions=nact,
        offset=offset,
        labels=iset_labels,
        action_labels=iset_action_labels,
        own_parent_iset=own_parent_iset,
        own_parent_slot=own_parent_slot,
        own_levels=own_levels,
        slot_iset=slot_iset,
        slot_index=slot_index,
        slot_player=np.asarray(iset_player, dtype=np.int8)[slot_iset] if m else np.zeros(0, np.int8),
    )
    return GameTree(
        isets=isets,
        kind=np.asarray(kind, dtype=np.int8),
        infoset=np.asarray(infoset, dtype=np.int32),
        payoff=np.asarray(payoff, dtype=np.float64),
        parent=np.asarray(parent, dtype=np.int64),
        slot=np.asarray(slot, dtype=np.int32),
        pslot=np.asarray([to_flat(r) for r in pslot], dtype=np.int64),
        chance_p=np.asarray(chance_p, dtype=np.float64),
        depth=np.asarray(depth, dtype=np.int32),
        name=name,
    )


def subtree(tree: GameTree, keep: np.ndarray, admitted: np.ndarray, name: str) -> GameTree:
    """Extract the kept nodes as a new tree sharing the infoset layout."""
    if not keep[0]:
        raise GameStructureError("cannot drop the root node")
    new_id = np.cumsum(keep) - 1
    parent = tree.parent[keep].copy()
    parent[1:] = new_id[parent[1:]]
    return GameTree(
        isets=tree.isets,
        kind=tree.kind[keep],
        infoset=tree.infoset[keep],
        payoff=tree.payoff[keep],
        parent=parent,
        slot=tree.slot[keep],
        pslot=tree.pslot[keep],
        chance_p=tree.chance_p[keep],
        depth=tree.depth[keep],
        admitted=admitted.copy(),
        name=name,
        base=tree.base,
    )


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class BehaviorStrategy:
    """Per-infoset action distribution for one player.

    Backed by a flat vector over the game's full slot layout; slots belonging
    to the other player are zero and ignored.
    """

    def __init__(self, game: GameTree, player: int, flat: np.ndarray):
        self.game = game.base
        self.player = player
        self.flat = flat

    @classmethod
    def uniform(cls, game: GameTree, player: int, admitted: np.ndarray | None = None):
        isets = game.isets
        if admitted is None:
            admitted = np.ones(isets.total_slots, dtype=bool)
        mine = isets.slot_player == player
        adm = admitted & mine
        counts = isets.row_sums(adm.astype(np.float64))
        flat = adm / isets.spread(np.maximum(counts, 1.0))
        return cls(game, player, flat)

    @classmethod
    def from_pure(cls, game: GameTree, player: int, choice: dict):
        """Build a pure strategy from {infoset_id: action_index}."""
        isets = game.isets
        flat = np.zeros(isets.total_slots)
        for s in isets.infosets_of(player):
            flat[isets.offset[s] + choice[int(s)]] = 1.0
        return cls(game, player, flat)

    def probs(self, s: int) -> np.ndarray:
        s = int(s)
        if self.game.isets.player[s] != self.player:
            raise KeyError(f"infoset {s} does not belong to player {self.player}")
        return self.game.isets.row(self.flat, s).copy()

    def set_probs(self, s: int, probs) -> None:
        row = self.game.isets.row(self.flat, int(s))
        row[:] = np.asarray(probs, dtype=np.float64)

    def validate(self, tol: float = DIST_TOL) -> None:
        isets = self.game.isets
        mine = isets.infosets_of(self.player)
        sums = isets.row_sums(self.flat)[mine]
        if np.any(self.flat < -tol):
            raise ValueError("strategy has negative probabilities")
        if np.any(np.abs(sums - 1.0) > tol):
            bad = mine[np.abs(sums - 1.0) > tol][0]
            raise ValueError(
                f"infoset {isets.labels[bad]!r}: probabilities sum to {sums[np.abs(sums - 1.0) > tol][0]}"
            )

    def copy(self) -> "BehaviorStrategy":
        return BehaviorStrategy(self.game, self.player, self.flat.copy())

    def as_dict(self) -> dict:
        isets = self.game.isets
        return {
            isets.labels[s]: {
                lab: float(p)
                for lab, p in zip(isets.action_labels[s], isets.row(self.flat, s))
            }
            for s in isets.infosets_of(self.player)
        }


@dataclass
class JointStrategy:
    """A pair of behavior strategies, one per player."""

    p1: BehaviorStrategy
    p2: BehaviorStrategy

    @classmethod
    def uniform(cls, game: GameTree, admitted: np.ndarray | None = None):
        return cls(
            BehaviorStrategy.uniform(game, P1, admitted),
            BehaviorStrategy.uniform(game, P2, admitted),
        )

    @classmethod
    def from_flat(cls, game: GameTree, flat: np.ndarray):
        sp = game.isets.slot_player
        return cls(
            BehaviorStrategy(game, P1, np.where(sp == P1, flat, 0.0)),
            BehaviorStrategy(game, P2, np.where(sp == P2, flat, 0.0)),
        )

    def __getitem__(self, player: int) -> BehaviorStrategy:
        return (self.p1, self.p2)[player]

    @property
    def flat(self) -> np.ndarray:
        return self.p1.flat + self.p2.flat

    def validate(self, tol: float = DIST_TOL) -> None:
        self.p1.validate(tol)
        self.p2.validate(tol)


# ---------------------------------------------------------------------------
# Vectorized traversal primitives
# ---------------------------------------------------------------------------


def edge_factors(tree: GameTree, flat: np.ndarray) -> np.ndarray:
    """Per-node transition factor of the edge entering each node."""
    aids = tree.aids()
    f = np.ones(tree.num_nodes)
    pe = aids.player_edges
    f[pe] = flat[tree.pslot[pe]]
    ce = aids.chance_edges
    f[ce] = tree.chance_p[ce]
    return f


def _downward(tree: GameTree, factors: np.ndarray) -> np.ndarray:
    x = np.ones(tree.num_nodes)
    for batch in tree.aids().levels:
        x[batch] = x[tree.parent[batch]] * factors[batch]
    return x


def node_reaches(tree: GameTree, flat: np.ndarray):
    """Per-node reach contributions (x1, x2, xc) of players and chance."""
    aids = tree.aids()
    f = edge_factors(tree, flat)
    out = []
    for owner in (P1, P2, CHANCE):
        fo = np.ones(tree.num_nodes)
        sel = aids.edge_owner == owner
        fo[sel] = f[sel]
        out.append(_downward(tree, fo))
    return tuple(out)


def reach_excluding(
    tree: GameTree, flat: np.ndarray, player: int, factors: np.ndarray | None = None
) -> np.ndarray:
    """Opponent-and-chance reach of every node (player's own factors skipped)."""
    f = edge_factors(tree, flat) if factors is None else factors.copy()
    f[tree.aids().children_of[player]] = 1.0
    return _downward(tree, f)


def node_values(
    tree: GameTree, flat: np.ndarray, player: int = P1, factors: np.ndarray | None = None
) -> np.ndarray:
    """Expected payoff of each node's subgame for ``player`` under ``flat``.

    This is the conditional (suffix) value: it does not depend on how the
    node is reached, which is exactly what regret updates need.
    """
    aids = tree.aids()
    sign = 1.0 if player == P1 else -1.0
    v = np.zeros(tree.num_nodes)
    v[aids.terminals] = sign * tree.payoff[aids.terminals]
    f = edge_factors(tree, flat) if factors is None else factors
    for batch in reversed(aids.levels):
        np.add.at(v, tree.parent[batch], f[batch] * v[batch])
    return v


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def expected_value(game: GameTree, joint: JointStrategy) -> float:
    """Game value for player 1 (player 2's value is the exact negation)."""
    return float(node_values(game, joint.flat, P1)[0])


def history_values(game: GameTree, joint: JointStrategy, player: int = P1) -> np.ndarray:
    """Per-history expected values, zeroed at unreached histories."""
    flat = joint.flat
    v = node_values(game, flat, player)
    x1, x2, xc = node_reaches(game, flat)
    v[x1 * x2 * xc == 0.0] = 0.0
    return v


def reach_contributions(game: GameTree, joint: JointStrategy, node: int):
    """(x1, x2, xc) reach contributions for a single history."""
    if not 0 <= node < game.num_nodes:
        raise IndexError(f"node {node} out of range")
    flat = joint.flat
    x = [1.0, 1.0, 1.0]
    cur = int(node)
    while cur > 0:
        par = int(game.parent[cur])
        owner = int(game.kind[par])
        if owner == CHANCE:
            x[2] *= float(game.chance_p[cur])
        else:
            x[owner] *= float(flat[game.pslot[cur]])
        cur = par
    return tuple(x)


def support_size(strategy: BehaviorStrategy, s: int, threshold: float = 0.0) -> int:
    """Number of actions with probability above ``threshold`` at infoset ``s``."""
    return int((strategy.probs(s) > threshold).sum())


@dataclass
class ValidationReport:
    structural: list = field(default_factory=list)
    recall: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.structural and not self.recall

    def __str__(self):
        if self.ok:
            return "valid"
        lines = [f"structural: {e}" for e in self.structural]
        lines += [f"perfect recall: {e}" for e in self.recall]
        return "\n".join(lines)


def validate_perfect_recall(game: GameTree) -> ValidationReport:
    """Check structural sanity and perfect recall; report all violations."""
    report = ValidationReport()
    isets = game.isets
    aids = game.aids()
    n = game.num_nodes

    # structural: chance distributions
    sums = np.zeros(n)
    np.add.at(sums, game.parent[aids.chance_edges], game.chance_p[aids.chance_edges])
    for node in np.flatnonzero(game.kind == CHANCE):
        if abs(sums[node] - 1.0) > CHANCE_TOL:
            report.structural.append(
                f"chance node {node}: outcome probabilities sum to {sums[node]!r}"
            )
    if np.any(game.chance_p[aids.chance_edges] < 0):
        report.structural.append("negative chance probability")

    # structural: every non-terminal node has at least one child
    child_counts = np.bincount(game.parent[1:], minlength=n) if n > 1 else np.zeros(n, int)
    for node in np.flatnonzero((game.kind != TERMINAL) & (child_counts == 0)):
        report.structural.append(f"node {node}: empty action set")

    # structural: infosets with no member histories
    for s in np.flatnonzero(aids.iset_rep < 0):
        report.structural.append(f"infoset {isets.labels[s]!r}: dangling (no histories)")

    # structural: member action counts match the infoset's action set
    dec = np.flatnonzero((game.kind == P1) | (game.kind == P2))
    for node in dec:
        s = game.infoset[node]
        if child_counts[node] != isets.n_actions[s]:
            report.structural.append(
                f"infoset {isets.labels[s]!r}: history {node} exposes "
                f"{child_counts[node]} of {isets.n_actions[s]} actions"
            )

    # perfect recall: all members of an infoset share the acting player's
    # most recent (infoset, action) pair; applied inductively this makes the
    # whole own-action sequence identical.
    for p in PLAYERS:
        last = np.full(n, -1, dtype=np.int64)
        own_mask = np.zeros(n, dtype=bool)
        own_mask[aids.children_of[p]] = True
        for batch in aids.levels:
            last[batch] = np.where(own_mask[batch], game.pslot[batch], last[game.parent[batch]])
        nodes_p = np.flatnonzero(game.kind == p)
        if nodes_p.size == 0:
            continue
        incoming = last[nodes_p]
        groups = game.infoset[nodes_p]
        for s in np.unique(groups):
            vals = incoming[groups == s]
            if vals.min() != vals.max():
                report.recall.append(
                    f"infoset {isets.labels[s]!r}: member histories have different "
                    f"own action prefixes"
                )
    return report
