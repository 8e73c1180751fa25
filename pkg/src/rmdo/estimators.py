"""Estimator-style wrappers so the solvers compose with generic tooling.

These follow the scikit-learn parameter conventions: constructor arguments
are stored verbatim, ``get_params``/``set_params`` round-trip them (so
``sklearn.base.clone`` works), ``fit`` runs the solver and exposes learned
state through trailing-underscore attributes.
"""

from __future__ import annotations

import inspect

from .driver import RunConfig, RunResult, run
from .games import GameSpec, make_game
from .tree import GameTree, validate_perfect_recall


class NotFittedError(RuntimeError):
    """Raised when learned attributes are requested before ``fit``."""


def check_game(game) -> GameTree:
    """Coerce a game argument to a validated :class:`GameTree`."""
    if isinstance(game, str):
        game = GameSpec.parse(game, {})
    if isinstance(game, GameSpec):
        game = make_game(game)
    if not isinstance(game, GameTree):
        raise TypeError(f"expected a game, spec or family name, got {type(game).__name__}")
    report = validate_perfect_recall(game)
    if not report.ok:
        raise ValueError(f"invalid game:\n{report}")
    return game


class _ParamsMixin:
    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def _check_fitted(self):
        if getattr(self, "result_", None) is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit(game) first")

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class _SolverBase(_ParamsMixin):
    result_: RunResult | None = None

    def _finish(self, result: RunResult):
        self.result_ = result
        self.game_ = result.game
        self.strategy_ = result.strategy
        self.exploitability_ = result.exploitability
        self.n_windows_ = result.k
        self.n_iterations_ = result.log.last().iteration
        self.visited_nodes_ = result.visited
        self.log_ = result.log
        self.stop_reason_ = result.stop_reason
        return self

    def score(self) -> float:
        """Negated exploitability of the fitted strategy (higher is better)."""
        self._check_fitted()
        return -self.exploitability_

    def action_probabilities(self, player: int, infoset_label: str) -> dict:
        """Fitted action distribution at one of the player's infosets."""
        self._check_fitted()
        return self.strategy_[player].as_dict()[infoset_label]


class DoubleOracleSolver(_SolverBase):
    """Double-oracle solver with a selectable best-response frequency scheme."""

    def __init__(
        self,
        algo: str = "pdo",
        period: int = 50,
        regret: str = "plus",
        xdo_eps0: float | None = None,
        target_exploitability: float | None = None,
        max_iterations: int | None = 1000,
        max_visited: int | None = None,
        max_seconds: float | None = None,
        eval_every: int = 10,
        output: str | None = None,
        snapshot_every: int = 0,
    ):
        self.algo = algo
        self.period = period
        self.regret = regret
        self.xdo_eps0 = xdo_eps0
        self.target_exploitability = target_exploitability
        self.max_iterations = max_iterations
        self.max_visited = max_visited
        self.max_seconds = max_seconds
        self.eval_every = eval_every
        self.output = output
        self.snapshot_every = snapshot_every

    def fit(self, game):
        game = check_game(game)
        config = RunConfig(game=game, **self.get_params())
        return self._finish(run(config))


class CFRSolver(_SolverBase):
    """Plain CFR self-play on the full game (no restriction, no oracles)."""

    def __init__(
        self,
        regret: str = "plus",
        iterations: int = 1000,
        target_exploitability: float | None = None,
        eval_every: int = 10,
        snapshot_every: int = 0,
    ):
        self.regret = regret
        self.iterations = iterations
        self.target_exploitability = target_exploitability
        self.eval_every = eval_every
        self.snapshot_every = snapshot_every

    def fit(self, game):
        game = check_game(game)
        config = RunConfig(
            game=game,
            algo="cfr",
            regret=self.regret,
            max_iterations=self.iterations,
            target_exploitability=self.target_exploitability,
            eval_every=self.eval_every,
            snapshot_every=self.snapshot_every,
        )
        return self._finish(run(config))
