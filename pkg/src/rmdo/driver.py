"""The double-oracle loop with pluggable best-response frequency schemes.

One run alternates regret minimization inside the current restricted game
with full-game best responses against the current window's average
strategy. When a best response adds a new action the window closes: regret
tables reset, the restricted view is rebuilt, and averaging starts over.

Frequency schemes instantiate the named algorithms: best responses every
iteration (XODO), every ``c`` iterations (PDO), or whenever the restricted
game's own exploitability drops below a halving threshold (XDO). A plain
CFR self-play mode runs the same loop with the full action set admitted
and no best-response steps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .games import GameSpec, make_game
from .oracle import best_response, exploitability
from .regret import EmptyWindowError, RegretTables, cfr_iteration
from .restriction import Population, init_population, merge_best_response, restricted_view
from .tree import P1, P2, GameTree, JointStrategy

ALGOS = ("pdo", "xodo", "xdo", "cfr")
OUTPUTS = ("overall", "last_window")


@dataclass(frozen=True)
class FrequencyScheme:
    """How often the full-game best response is computed within a window."""

    kind: str  # every_iteration | periodic | threshold
    period: int = 1
    eps0: float | None = None

    def __post_init__(self):
        if self.kind not in ("every_iteration", "periodic", "threshold"):
            raise ValueError(f"unknown frequency scheme {self.kind!r}")
        if self.kind == "periodic" and (int(self.period) != self.period or self.period < 1):
            raise ValueError(f"period must be an integer >= 1, got {self.period}")
        if self.kind == "threshold" and self.eps0 is not None and self.eps0 <= 0:
            raise ValueError(f"threshold eps0 must be positive, got {self.eps0}")


@dataclass
class WindowState:
    """Bookkeeping for the current time window."""

    index: int = 0
    in_window: int = 0
    total: int = 0
    closed_lengths: list = field(default_factory=list)

    def threshold(self, eps0: float) -> float:
        return eps0 / (2.0**self.index)


def should_compute_br(scheme: FrequencyScheme, window: WindowState, local_exploitability_probe=None) -> bool:
    """Decide whether this iteration ends with a best-response computation.

    For the threshold scheme the probe is invoked (and its traversal cost is
    the caller's to account); the other schemes never call it.
    """
    if scheme.kind == "every_iteration":
        return True
    if scheme.kind == "periodic":
        return window.in_window % scheme.period == 0
    if local_exploitability_probe is None:
        raise ValueError("threshold scheme requires a local exploitability probe")
    return local_exploitability_probe() <= window.threshold(scheme.eps0)


@dataclass(frozen=True)
class RunConfig:
    """Everything one solver run needs; immutable and echoable to manifests."""

    game: object  # GameSpec or GameTree
    algo: str = "pdo"
    regret: str = "plus"
    period: int = 50
    xdo_eps0: float | None = None
    target_exploitability: float | None = None
    max_iterations: int | None = None
    max_visited: int | None = None
    max_seconds: float | None = None
    eval_every: int = 10
    output: str | None = None  # None = per-algorithm default
    snapshot_every: int = 0  # 0 = keep no strategy snapshots
    label: str = "run"

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}; expected one of {ALGOS}")
        if self.regret not in ("vanilla", "plus"):
            raise ValueError(f"unknown regret variant {self.regret!r}")
        if self.output is not None and self.output not in OUTPUTS:
            raise ValueError(f"unknown output selector {self.output!r}")
        if self.target_exploitability is not None and self.target_exploitability <= 0:
            raise ValueError("target exploitability must be positive")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        stops = (
            self.target_exploitability,
            self.max_iterations,
            self.max_visited,
            self.max_seconds,
        )
        if all(s is None for s in stops):
            raise ValueError("no stop rule: set a target, iteration, visit or time budget")
        self.scheme()

    def scheme(self) -> FrequencyScheme | None:
        if self.algo == "xodo":
            return FrequencyScheme("every_iteration")
        if self.algo == "pdo":
            return FrequencyScheme("periodic", period=self.period)
        if self.algo == "xdo":
            return FrequencyScheme("threshold", eps0=self.xdo_eps0)
        return None  # plain CFR self-play

    def output_kind(self) -> str:
        if self.output is not None:
            return self.output
        return "overall" if self.algo == "xodo" else "last_window"

    def describe(self) -> dict:
        game = self.game
        game_desc = str(game) if isinstance(game, GameSpec) else getattr(game, "name", "custom")
        out = {
            "label": self.label,
            "game": game_desc,
            "algo": self.algo,
            "regret": self.regret,
            "eval_every": self.eval_every,
            "output": self.output_kind(),
            "snapshot_every": self.snapshot_every,
        }
        if self.algo == "pdo":
            out["period"] = self.period
        if self.algo == "xdo":
            out["xdo_eps0"] = self.xdo_eps0
        for key in ("target_exploitability", "max_iterations", "max_visited", "max_seconds"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


@dataclass
class LogRow:
    iteration: int
    visited_infosets: int
    wall_time_s: float
    exploitability: float
    window: int
    population_size: int


class RunLog:
    """Time series of evaluation rows emitted by a run."""

    COLUMNS = ("iteration", "visited_infosets", "wall_time_s", "exploitability", "window", "population_size")

    def __init__(self, rows: list | None = None):
        self.rows = rows if rows is not None else []

    def append(self, row: LogRow) -> None:
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def last(self) -> LogRow:
        return self.rows[-1]


class RunHistory:
    """Retained per-iteration state for measured-regret computations.

    Window assignment is recorded for every iteration; strategy snapshots
    only at the configured cadence (cadence 1 = exact mode).
    """

    def __init__(self, game: GameTree, variant: str, snapshot_every: int):
        self.game = game
        self.variant = variant
        self.snapshot_every = snapshot_every
        self.window_of = []  # window index of iteration t (1-based list index t-1)
        self.in_window = []
        self.ts = []
        self.flats = []

    def track(self, window_index: int, in_window: int) -> None:
        self.window_of.append(window_index)
        self.in_window.append(in_window)

    def record(self, t: int, flat: np.ndarray) -> None:
        self.ts.append(t)
        self.flats.append(flat)

    @property
    def total(self) -> int:
        return len(self.window_of)

    def global_weights(self, upto: int | None = None) -> np.ndarray:
        """W_t for t = 1..upto: window length times within-window weight over T."""
        T = self.total if upto is None else min(upto, self.total)
        win = np.asarray(self.window_of[:T])
        tw = np.asarray(self.in_window[:T], dtype=np.float64)
        u = np.ones(T) if self.variant == "vanilla" else tw
        W = np.zeros(T)
        for j in np.unique(win):
            sel = win == j
            W[sel] = sel.sum() * (u[sel] / u[sel].sum()) / T
        return W


class _DriverState:
    """Mutable internals kept on the result so output ops stay exact."""

    def __init__(self, game: GameTree, pop: Population, view: GameTree, tables: RegretTables):
        self.game = game
        self.pop = pop
        self.view = view
        self.tables = tables
        self.fold = np.zeros(game.isets.total_slots)

    def close_window(self) -> None:
        self.fold += (self.tables.count / self.tables.weight_sum) * self.tables.acc
        self.view = restricted_view(self.game, self.pop)
        self.tables.reset(self.view)

    def overall_flat(self) -> np.ndarray:
        mass = self.fold
        if self.tables.count > 0:
            mass = mass + (self.tables.count / self.tables.weight_sum) * self.tables.acc
        if not mass.any():
            raise EmptyWindowError("no iterations completed yet")
        return self.game.isets.normalize_rows(mass, self.tables.view.admitted)

    def output_flat(self, kind: str) -> np.ndarray:
        if kind == "overall":
            return self.overall_flat()
        return self.tables.window_average_flat()


@dataclass
class RunResult:
    """Final strategy plus everything needed to audit the run."""

    config: RunConfig
    game: GameTree
    strategy: JointStrategy
    exploitability: float
    k: int
    window_lengths: list
    windows: list  # per-window dicts: index, length, view_nodes, population_size
    log: RunLog
    stop_reason: str
    visited: int
    history: RunHistory | None
    state: _DriverState
    derived_eps0: float | None = None

    def overall_average(self) -> JointStrategy:
        return JointStrategy.from_flat(self.game, self.state.overall_flat())

    def last_window_average(self) -> JointStrategy:
        return JointStrategy.from_flat(self.game, self.state.tables.window_average_flat())

    def game_stats(self) -> dict:
        return {
            "infosets_p1": self.game.num_infosets(P1),
            "infosets_p2": self.game.num_infosets(P2),
            "nodes": self.game.num_nodes,
            "delta": self.game.payoff_range,
        }


def overall_average_strategy(result: RunResult) -> JointStrategy:
    """Cross-window average with weights |T_j| * w_t / T."""
    return result.overall_average()


def last_window_average_strategy(result: RunResult) -> JointStrategy:
    """Average over the current (last) window only."""
    return result.last_window_average()


def k_statistics(result: RunResult, game: GameTree | None = None) -> dict:
    """Window-count report with the population-size upper bound asserted."""
    game = game or result.game
    total = game.isets.num_infosets
    k = result.k
    if k > total:
        raise AssertionError(f"window count {k} exceeds the infoset total {total}")
    out_flat = result.strategy.flat
    support = game.isets.row_sums((out_flat > 0.0).astype(np.float64))
    return {
        "k": k,
        "infoset_total": total,
        "bound_satisfied": True,
        "max_output_support": int(support.max()) if len(support) else 0,
        "window_lengths": list(result.window_lengths),
    }


def run(config: RunConfig, on_row=None) -> RunResult:
    """Execute one configured run and return its result.

    ``on_row`` (optional) receives each :class:`LogRow` as it is logged;
    evaluation traversals are measurement and are not charged to the
    visited-node counter.
    """
    config.validate()
    game = config.game if isinstance(config.game, GameTree) else make_game(config.game)
    scheme = config.scheme()
    started = time.monotonic()
    visited = 0

    if scheme is None:
        pop = Population.full(game)
    else:
        pop = init_population(game)
        visited += 2 * game.num_nodes

    derived_eps0 = None
    if scheme is not None and scheme.kind == "threshold" and scheme.eps0 is None:
        # data-driven default: half the full game's uniform-play exploitability
        derived_eps0 = exploitability(game, JointStrategy.uniform(game)) / 2.0
        visited += 2 * game.num_nodes
        scheme = FrequencyScheme("threshold", eps0=derived_eps0)

    view = restricted_view(game, pop)
    tables = RegretTables(view, config.regret)
    state = _DriverState(game, pop, view, tables)
    window = WindowState()
    log = RunLog()
    history = None
    if config.snapshot_every:
        history = RunHistory(game, config.regret, config.snapshot_every)
    windows_meta = [
        {"index": 0, "view_nodes": view.num_nodes, "population_size": pop.size}
    ]
    if scheme is not None and scheme.kind == "threshold":
        windows_meta[0]["xdo_threshold"] = window.threshold(scheme.eps0)
    out_kind = config.output_kind()
    stop_reason = None
    last_logged = -1
    last_joint = None

    def evaluate_and_log() -> None:
        nonlocal stop_reason, last_logged, last_joint
        if window.total == last_logged:
            return
        joint = JointStrategy.from_flat(game, state.output_flat(out_kind))
        last_joint = joint
        e = exploitability(game, joint)
        row = LogRow(
            iteration=window.total,
            visited_infosets=visited,
            wall_time_s=time.monotonic() - started,
            exploitability=e,
            window=window.index,
            population_size=pop.size,
        )
        log.append(row)
        if on_row is not None:
            on_row(row)
        last_logged = window.total
        if (
            config.target_exploitability is not None
            and e <= config.target_exploitability
            and stop_reason is None
        ):
            stop_reason = "target"

    while stop_reason is None:
        if config.max_iterations is not None and window.total >= config.max_iterations:
            stop_reason = "max_iterations"
            break
        snapshot = tables.current
        window.total += 1
        window.in_window += 1
        if history is not None:
            history.track(window.index, window.in_window)
            if window.total % history.snapshot_every == 0:
                history.record(window.total, snapshot.copy())
        visited += cfr_iteration(state.view, tables)

        window_closed = False
        if scheme is not None:
            if scheme.kind == "threshold":
                def probe() -> float:
                    nonlocal visited
                    visited += 2 * state.view.num_nodes
                    local = JointStrategy.from_flat(game, tables.window_average_flat())
                    return exploitability(state.view, local)

                br_due = should_compute_br(scheme, window, probe)
            else:
                br_due = should_compute_br(scheme, window)
            if br_due:
                target = JointStrategy.from_flat(game, tables.window_average_flat())
                br1 = best_response(game, target.p2, P1)
                br2 = best_response(game, target.p1, P2)
                visited += 2 * game.num_nodes
                changed1 = merge_best_response(pop, br1, P1)
                changed2 = merge_best_response(pop, br2, P2)
                window_closed = changed1 or changed2

        if window.total % config.eval_every == 0 or window_closed:
            evaluate_and_log()

        if window_closed:
            windows_meta[-1]["length"] = window.in_window
            window.closed_lengths.append(window.in_window)
            state.close_window()
            pop.generation += 1
            window.index += 1
            window.in_window = 0
            meta = {
                "index": window.index,
                "view_nodes": state.view.num_nodes,
                "population_size": pop.size,
            }
            if scheme is not None and scheme.kind == "threshold":
                meta["xdo_threshold"] = window.threshold(scheme.eps0)
            windows_meta.append(meta)

        if stop_reason is not None:
            break
        if config.max_iterations is not None and window.total >= config.max_iterations:
            stop_reason = "max_iterations"
        elif config.max_visited is not None and visited >= config.max_visited:
            stop_reason = "max_visited"
        elif config.max_seconds is not None and time.monotonic() - started >= config.max_seconds:
            stop_reason = "max_seconds"

    evaluate_and_log()
    windows_meta[-1]["length"] = window.in_window
    final = log.last()
    strategy = last_joint
    return RunResult(
        config=config,
        game=game,
        strategy=strategy,
        exploitability=final.exploitability,
        k=window.index + 1,
        window_lengths=window.closed_lengths + [window.in_window],
        windows=windows_meta,
        log=log,
        stop_reason=stop_reason,
        visited=visited,
        history=history,
        state=state,
        derived_eps0=derived_eps0,
    )
