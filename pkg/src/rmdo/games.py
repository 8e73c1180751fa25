"""Benchmark game constructors.

All games are two-player zero-sum and built through :func:`rmdo.tree.build_game`,
so node and infoset numbering is deterministic across builds. Payoffs are
always from player 1's perspective.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import P1, P2, Chance, Decision, GameTree, Terminal, build_game


class GameSpecError(ValueError):
    """Raised for invalid game family names or parameters."""


# ---------------------------------------------------------------------------
# Minimal worked example: one decision per player, known pure equilibrium
# ---------------------------------------------------------------------------

_TINY_PAYOFFS = {("L", "X"): 2.0, ("L", "Y"): 1.0, ("R", "X"): 3.0, ("R", "Y"): -1.0}


def tiny() -> GameTree:
    """Two-infoset game with pure equilibrium (L, Y).

    Player 1 picks L or R; player 2 picks X or Y without observing player
    1's choice. Useful as a golden trace: the double-oracle population
    converges after a single expansion.
    """

    def expand(state):
        if state == ():
            return Decision(P1, "p1", [("L", ("L",)), ("R", ("R",))])
        if len(state) == 1:
            return Decision(P2, "p2", [("X", (*state, "X")), ("Y", (*state, "Y"))])
        return Terminal(_TINY_PAYOFFS[state])

    return build_game((), expand, name="tiny")


# ---------------------------------------------------------------------------
# Kuhn poker with a parametric bet range
# ---------------------------------------------------------------------------

_KUHN_RANKS = ("J", "Q", "K")


def kuhn(pot: int = 1, dummy: bool = False) -> GameTree:
    """Three-card Kuhn poker; each player antes 1, bets range over 1..pot.

    A betting sequence allows a single bet (any integer size up to ``pot``)
    answered by call or fold; there are no raises. ``pot=1`` is the standard
    game with value -1/18 for player 1.
    """
    if pot < 1:
        raise GameSpecError(f"kuhn: pot must be >= 1, got {pot}")

    def showdown(c1, c2, amount):
        return float(amount) if c1 > c2 else -float(amount)

    def expand(state):
        if state is None:
            deals = [
                (1.0 / 6.0, f"{_KUHN_RANKS[a]}{_KUHN_RANKS[b]}", (a, b, ()))
                for a in range(3)
                for b in range(3)
                if a != b
            ]
            return Chance(deals)
        c1, c2, seq = state
        if seq == ():
            acts = [("check", (c1, c2, ("k",)))]
            acts += [(f"bet{b}", (c1, c2, ("b", b))) for b in range(1, pot + 1)]
            return Decision(P1, f"{_KUHN_RANKS[c1]}|", acts)
        if seq == ("k",):
            acts = [("check", (c1, c2, ("k", "k")))]
            acts += [(f"bet{b}", (c1, c2, ("k", "b", b))) for b in range(1, pot + 1)]
            return Decision(P2, f"{_KUHN_RANKS[c2]}|k", acts)
        if seq == ("k", "k"):
            return Terminal(showdown(c1, c2, 1))
        if seq[0] == "b":
            b = seq[1]
            if len(seq) == 2:
                return Decision(
                    P2,
                    f"{_KUHN_RANKS[c2]}|b{b}",
                    [("fold", (c1, c2, ("b", b, "f"))), ("call", (c1, c2, ("b", b, "c")))],
                )
            return Terminal(1.0 if seq[2] == "f" else showdown(c1, c2, 1 + b))
        # seq = ("k", "b", b[, response]); player 1 faces the bet
        b = seq[2]
        if len(seq) == 3:
            return Decision(
                P1,
                f"{_KUHN_RANKS[c1]}|kb{b}",
                [("fold", (c1, c2, ("k", "b", b, "f"))), ("call", (c1, c2, ("k", "b", b, "c")))],
            )
        return Terminal(-1.0 if seq[3] == "f" else showdown(c1, c2, 1 + b))

    name = f"kuhn(pot={pot})"
    if dummy:
        return build_game(_dummy_root(None), _dummy_expand(expand), name=name + "+dummy")
    return build_game(None, expand, name=name)


# ---------------------------------------------------------------------------
# Leduc hold'em
# ---------------------------------------------------------------------------

_LEDUC_CARDS = tuple(f"{r}{s}" for r in ("J", "Q", "K") for s in ("a", "b"))


def _leduc_rank(card: int) -> int:
    return card // 2


def leduc(dummy: bool = False) -> GameTree:
    """Standard Leduc hold'em: 6 cards, two betting rounds, two-bet cap.

    Round one bets are 2 chips, round two bets are 4; each round allows a
    bet and one raise. ``dummy=True`` triples every action at every infoset
    with payoff-identical duplicates, which shrinks the equilibrium support
    relative to the action count.
    """
    # within-round sequences are tracked as strings over {k,b,c,r,f}
    size = {1: 2.0, 2: 4.0}

    def round_over(seq):
        return seq in ("kk", "bc", "kbc", "brc", "kbrc")

    def folded(seq):
        return seq.endswith("f")

    def to_act(seq):
        return P1 if len(seq) % 2 == 0 else P2

    def legal(seq):
        if seq in ("", "k"):
            return ["check", "bet"]
        if seq in ("b", "kb"):
            return ["fold", "call", "raise"]
        return ["fold", "call"]  # facing the raise

    def next_contrib(own, act, rnd, other):
        if act in ("bet", "raise"):
            return other + size[rnd]
        if act == "call":
            return other
        return own  # check / fold

    def winner(c1, c2, board):
        r1, r2, rb = _leduc_rank(c1), _leduc_rank(c2), _leduc_rank(board)
        if r1 == rb and r2 != rb:
            return 1
        if r2 == rb and r1 != rb:
            return -1
        if r1 > r2:
            return 1
        if r2 > r1:
            return -1
        return 0

    def expand(state):
        if state is None:
            deals = [
                (1.0 / 30.0, f"{_LEDUC_CARDS[a]}{_LEDUC_CARDS[b]}", (a, b, None, 1, "", "", 1.0, 1.0))
                for a in range(6)
                for b in range(6)
                if a != b
            ]
            return Chance(deals)
        c1, c2, board, rnd, seq1, seq, k1, k2 = state
        if folded(seq):
            return Terminal(k2 if len(seq) % 2 == 0 else -k1)
        if round_over(seq):
            if rnd == 1:
                rest = [c for c in range(6) if c not in (c1, c2)]
                return Chance(
                    [
                        (1.0 / len(rest), _LEDUC_CARDS[c], (c1, c2, c, 2, seq, "", k1, k2))
                        for c in rest
                    ]
                )
            return Terminal(winner(c1, c2, board) * k1)  # contributions are equal here
        actor = to_act(seq)
        card = c1 if actor == P1 else c2
        pub = seq if rnd == 1 else f"{seq1}:{_LEDUC_CARDS[board]}:{seq}"
        key = f"{_LEDUC_CARDS[card]}|{pub}"
        acts = []
        for act in legal(seq):
            code = {"check": "k", "bet": "b", "call": "c", "raise": "r", "fold": "f"}[act]
            if actor == P1:
                nxt = (c1, c2, board, rnd, seq1, seq + code, next_contrib(k1, act, rnd, k2), k2)
            else:
                nxt = (c1, c2, board, rnd, seq1, seq + code, k1, next_contrib(k2, act, rnd, k1))
            acts.append((act, nxt))
        return Decision(actor, key, acts)

    name = "leduc"
    if dummy:
        return build_game(_dummy_root(None), _dummy_expand(expand), name=name + "+dummy")
    return build_game(None, expand, name=name)


# ---------------------------------------------------------------------------
# Oshi zumo (simultaneous bidding, sequentialized with a hidden first move)
# ---------------------------------------------------------------------------


def oshi_zumo(coins: int = 4, k: int = 2, m: int = 1) -> GameTree:
    """Coin-bidding board game on a track of length 2k+1.

    Each round both players secretly bid at least ``m`` of their remaining
    coins (a player holding fewer than ``m`` is forced to bid 0); the higher
    bid pushes the token one step toward the opponent's edge, ties leave it
    in place, and both bids are paid. Pushing the token off the board wins
    (+1/-1); if both players run out of coins first the game is a draw (0).
    """
    if not (coins >= m >= 1):
        raise GameSpecError(f"oshi-zumo: need coins >= m >= 1, got coins={coins}, m={m}")
    if k < 1:
        raise GameSpecError(f"oshi-zumo: need k >= 1, got {k}")

    def bids(c):
        return list(range(m, c + 1)) if c >= m else [0]

    def expand(state):
        c1, c2, pos, hist, pending = state
        if pending is None:
            if pos > k:
                return Terminal(1.0)
            if pos < -k:
                return Terminal(-1.0)
            if c1 < m and c2 < m:
                return Terminal(0.0)
            return Decision(
                P1,
                f"1|{hist}",
                [(str(b), (c1, c2, pos, hist, b)) for b in bids(c1)],
            )
        b1 = pending

        def resolve(b2):
            npos = pos + (1 if b1 > b2 else -1 if b2 > b1 else 0)
            return (c1 - b1, c2 - b2, npos, hist + f"{b1}-{b2};", None)

        return Decision(P2, f"2|{hist}", [(str(b), resolve(b)) for b in bids(c2)])

    return build_game((coins, coins, 0, "", None), expand, name=f"oshi-zumo({coins},{k},{m})")


# ---------------------------------------------------------------------------
# Sequential Blotto (perfect information)
# ---------------------------------------------------------------------------


def sequential_blotto(rounds: int = 2, forces: int = 4) -> GameTree:
    """Players alternate committing one unused force per turn.

    ``rounds`` counts force placements (two per battle), so it must be even;
    each player draws from strengths 0..forces-1 without reuse. Every pair
    of placements scores their difference for player 1, and the terminal
    payoff is the sum over battles. Placements are publicly observed.
    """
    if rounds % 2 != 0 or rounds < 2:
        raise GameSpecError(f"blotto: rounds must be even and >= 2, got {rounds}")
    if rounds > forces:
        raise GameSpecError(f"blotto: need rounds <= forces, got rounds={rounds}, forces={forces}")

    def expand(state):
        used1, used2, seq, score = state
        if len(seq) == rounds:
            return Terminal(float(score))
        actor = P1 if len(seq) % 2 == 0 else P2
        used = used1 if actor == P1 else used2
        hist = ",".join(map(str, seq))
        acts = []
        for f in range(forces):
            if f in used:
                continue
            if actor == P1:
                nxt = (used1 | {f}, used2, seq + (f,), score + f)
            else:
                nxt = (used1, used2 | {f}, seq + (f,), score - f)
            acts.append((str(f), nxt))
        return Decision(actor, f"{actor + 1}|{hist}", acts)

    return build_game(
        (frozenset(), frozenset(), (), 0), expand, name=f"blotto({rounds},{forces})"
    )


# ---------------------------------------------------------------------------
# Action-duplication transform ("dummy" games)
# ---------------------------------------------------------------------------


def _dummy_root(root_state):
    return (root_state, ())


def _dummy_expand(expand):
    """Triple every action with payoff-identical, publicly observed twins."""

    def wrapped(state):
        inner, tags = state
        node = expand(inner)
        if isinstance(node, Terminal):
            return node
        if isinstance(node, Chance):
            return Chance([(p, lab, (st, tags)) for p, lab, st in node.outcomes])
        acts = []
        for lab, st in node.actions:
            for twin in range(3):
                acts.append((f"{lab}~{twin}", (st, tags + (str(twin),))))
        key = node.key if not tags else f"{node.key}|{''.join(tags)}"
        return Decision(node.player, key, acts)

    return wrapped


# ---------------------------------------------------------------------------
# Game specs (CLI / config surface)
# ---------------------------------------------------------------------------

FAMILIES = ("tiny", "kuhn", "leduc", "oshi-zumo", "blotto")

_PARAM_TYPES = {
    "pot": int,
    "dummy": bool,
    "coins": int,
    "k": int,
    "m": int,
    "rounds": int,
    "forces": int,
}

_FAMILY_PARAMS = {
    "tiny": (),
    "kuhn": ("pot", "dummy"),
    "leduc": ("dummy",),
    "oshi-zumo": ("coins", "k", "m"),
    "blotto": ("rounds", "forces"),
}

_ALIASES = {"oshi_zumo": "oshi-zumo", "sequential_blotto": "blotto", "sequential-blotto": "blotto"}


@dataclass(frozen=True)
class GameSpec:
    """A game family tag plus its construction parameters."""

    family: str
    params: tuple = ()  # sorted (key, value) pairs

    @classmethod
    def make(cls, family: str, **params) -> "GameSpec":
        family = _ALIASES.get(family, family)
        if family not in FAMILIES:
            raise GameSpecError(
                f"unknown game family {family!r}; expected one of {', '.join(FAMILIES)}"
            )
        allowed = _FAMILY_PARAMS[family]
        for key in params:
            if key not in allowed:
                raise GameSpecError(f"game {family!r} does not take parameter {key!r}")
        return cls(family, tuple(sorted(params.items())))

    @classmethod
    def parse(cls, family: str, raw_params: dict) -> "GameSpec":
        """Build a spec from string-valued parameters (CLI/config input)."""
        family = _ALIASES.get(family, family)
        params = {}
        for key, value in raw_params.items():
            if value is None:
                continue
            typ = _PARAM_TYPES.get(key)
            if typ is None:
                raise GameSpecError(f"unknown game parameter {key!r}")
            if typ is bool and isinstance(value, str):
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise GameSpecError(f"parameter {key!r}: expected a boolean, got {value!r}")
                params[key] = value.lower() in ("true", "1", "yes")
            else:
                try:
                    params[key] = typ(value)
                except (TypeError, ValueError):
                    raise GameSpecError(
                        f"parameter {key!r}: expected {typ.__name__}, got {value!r}"
                    ) from None
        return cls.make(family, **params)

    def as_dict(self) -> dict:
        return {"family": self.family, **dict(self.params)}

    def __str__(self):
        if not self.params:
            return self.family
        args = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family}({args})"


def make_game(spec: GameSpec) -> GameTree:
    """Construct the game tree described by ``spec``."""
    p = dict(spec.params)
    if spec.family == "tiny":
        return tiny()
    if spec.family == "kuhn":
        return kuhn(pot=p.get("pot", 1), dummy=p.get("dummy", False))
    if spec.family == "leduc":
        return leduc(dummy=p.get("dummy", False))
    if spec.family == "oshi-zumo":
        return oshi_zumo(coins=p.get("coins", 4), k=p.get("k", 2), m=p.get("m", 1))
    if spec.family == "blotto":
        return sequential_blotto(rounds=p.get("rounds", 2), forces=p.get("forces", 4))
    raise GameSpecError(f"unknown game family {spec.family!r}")
