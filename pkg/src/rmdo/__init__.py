"""Double-oracle and CFR-family solvers for two-player zero-sum games."""

from .tree import (
    CHANCE,
    P1,
    P2,
    TERMINAL,
    BehaviorStrategy,
    Chance,
    Decision,
    GameStructureError,
    GameTree,
    JointStrategy,
    Terminal,
    build_game,
    expected_value,
    history_values,
    reach_contributions,
    support_size,
    validate_perfect_recall,
)
from .games import (
    GameSpec,
    GameSpecError,
    kuhn,
    leduc,
    make_game,
    oshi_zumo,
    sequential_blotto,
    tiny,
)
from .oracle import BestResponseResult, best_response, brute_force_best_response, exploitability
from .regret import (
    EmptyWindowError,
    RegretTables,
    WeightScheme,
    cfr_iteration,
    regret_matching,
    reset_for_new_window,
    window_average_strategy,
    window_weight,
)
from .restriction import (
    Population,
    expand_strategy,
    init_population,
    merge_best_response,
    restricted_view,
)
from .driver import (
    FrequencyScheme,
    RunConfig,
    RunLog,
    RunResult,
    WindowState,
    k_statistics,
    last_window_average_strategy,
    overall_average_strategy,
    run,
    should_compute_br,
)
from .bench import (
    ExperimentSuite,
    measured_average_regret,
    read_csv,
    run_experiment,
    write_csv,
)
from .estimators import CFRSolver, DoubleOracleSolver, NotFittedError, check_game

__version__ = "0.1.0"

__all__ = [
    "BehaviorStrategy",
    "BestResponseResult",
    "CFRSolver",
    "CHANCE",
    "Chance",
    "Decision",
    "DoubleOracleSolver",
    "EmptyWindowError",
    "ExperimentSuite",
    "FrequencyScheme",
    "GameSpec",
    "GameSpecError",
    "GameStructureError",
    "GameTree",
    "JointStrategy",
    "NotFittedError",
    "P1",
    "P2",
    "Population",
    "RegretTables",
    "RunConfig",
    "RunLog",
    "RunResult",
    "TERMINAL",
    "Terminal",
    "WeightScheme",
    "WindowState",
    "best_response",
    "brute_force_best_response",
    "build_game",
    "cfr_iteration",
    "check_game",
    "expand_strategy",
    "expected_value",
    "exploitability",
    "history_values",
    "init_population",
    "k_statistics",
    "kuhn",
    "last_window_average_strategy",
    "leduc",
    "make_game",
    "measured_average_regret",
    "merge_best_response",
    "oshi_zumo",
    "overall_average_strategy",
    "reach_contributions",
    "read_csv",
    "regret_matching",
    "reset_for_new_window",
    "restricted_view",
    "run",
    "run_experiment",
    "sequential_blotto",
    "should_compute_br",
    "support_size",
    "tiny",
    "validate_perfect_recall",
    "window_average_strategy",
    "window_weight",
]
