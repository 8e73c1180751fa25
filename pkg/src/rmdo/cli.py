"""Command-line interface: solve, bench, inspect, verify.

Config files use INI syntax (key = value under [sections]); every config
key has a matching command-line flag (dashes for underscores) and flags
win when both are given. Errors print a single JSON object to stderr and
exit with status 2.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .bench import ExperimentSuite, read_csv, run_experiment, write_csv
from .driver import RunConfig, k_statistics, run
from .games import FAMILIES, GameSpec, GameSpecError, make_game
from .oracle import best_response, brute_force_best_response, exploitability
from .regret import WeightScheme, regret_matching, window_weight
from .tree import P1, P2, BehaviorStrategy, JointStrategy, validate_perfect_recall

_GAME_KEYS = ("pot", "dummy", "coins", "k", "m", "rounds", "forces")
_SOLVE_KEYS = {
    "algo": str,
    "period": int,
    "regret": str,
    "target_eps": float,
    "max_iterations": int,
    "max_visited": int,
    "max_seconds": float,
    "eval_every": int,
    "output": str,
    "xdo_eps0": float,
    "snapshot_every": int,
    "csv": str,
}


class CliError(Exception):
    def __init__(self, message: str, flag: str | None = None):
        super().__init__(message)
        self.flag = flag


def _emit_error(exc: Exception, flag: str | None = None) -> int:
    payload = {"error": str(exc)}
    if flag is not None:
        payload["flag"] = flag
    print(json.dumps(payload), file=sys.stderr)
    return 2


def _add_game_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", help=f"game family: {', '.join(FAMILIES)}")
    p.add_argument("--pot", type=int, help="kuhn: per-player bet range upper bound")
    p.add_argument("--dummy", action="store_true", default=None, help="triple every action")
    p.add_argument("--coins", type=int, help="oshi-zumo: starting coins")
    p.add_argument("--k", type=int, help="oshi-zumo: half board length")
    p.add_argument("--m", type=int, help="oshi-zumo: minimum bid")
    p.add_argument("--rounds", type=int, help="blotto: number of force placements")
    p.add_argument("--forces", type=int, help="blotto: per-player force count")


def _read_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise CliError(f"config file not found: {path}", flag="--config")
    return cp


def _game_spec(args, cfg_section) -> GameSpec:
    family = args.game if args.game is not None else (cfg_section or {}).get("family")
    if family is None:
        raise CliError("no game given (set --game or [game] family)", flag="--game")
    raw = {}
    for key in _GAME_KEYS:
        if cfg_section is not None and key in cfg_section:
            raw[key] = cfg_section[key]
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            raw[key] = flag_value
    try:
        return GameSpec.parse(family, raw)
    except GameSpecError as exc:
        raise CliError(str(exc), flag="--game") from exc


def _solve_settings(args, cfg_section) -> dict:
    merged = {}
    for key, typ in _SOLVE_KEYS.items():
        if cfg_section is not None and key in cfg_section:
            text = cfg_section[key].strip()
            if text:
                merged[key] = typ(text)
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    if args.exact_regret:
        merged["snapshot_every"] = 1
    return merged


def _run_config(spec: GameSpec, settings: dict, label: str = "run") -> RunConfig:
    return RunConfig(
        game=spec,
        algo=settings.get("algo", "pdo"),
        regret=settings.get("regret", "plus"),
        period=settings.get("period", 50),
        xdo_eps0=settings.get("xdo_eps0"),
        target_exploitability=settings.get("target_eps"),
        max_iterations=settings.get("max_iterations"),
        max_visited=settings.get("max_visited"),
        max_seconds=settings.get("max_seconds"),
        eval_every=settings.get("eval_every", 10),
        output=settings.get("output"),
        snapshot_every=settings.get("snapshot_every", 0),
        label=label,
    )


def _cmd_solve(args) -> int:
    cp = _read_config(args.config) if args.config else None
    spec = _game_spec(args, cp["game"] if cp and cp.has_section("game") else None)
    settings = _solve_settings(args, cp["solve"] if cp and cp.has_section("solve") else None)
    if not any(settings.get(k) is not None for k in ("target_eps", "max_iterations", "max_visited", "max_seconds")):
        settings["max_iterations"] = 1000
    config = _run_config(spec, settings)
    try:
        config.validate()
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    result = run(config)
    stats = k_statistics(result)
    print(f"game: {spec}")
    algo = config.algo + (f"(period={config.period})" if config.algo == "pdo" else "")
    print(f"algorithm: {algo}  regret: {config.regret}  output: {config.output_kind()}")
    print(f"stop: {result.stop_reason} after {result.log.last().iteration} iterations")
    print(f"visited nodes: {result.visited}")
    print(f"windows (k): {result.k}  bound: {stats['k']} <= {stats['infoset_total']}")
    print(f"final exploitability: {result.exploitability:.6e}")
    if (
        config.target_exploitability is not None
        and result.exploitability > config.target_exploitability
    ):
        print("note: budget exhausted before the target exploitability was reached")
    if settings.get("csv"):
        write_csv(result.log, settings["csv"])
        print(f"log: {settings['csv']}")
    return 0


def _cmd_bench(args) -> int:
    cp = _read_config(args.config)
    if not cp.has_section("game"):
        raise CliError("bench config needs a [game] section", flag="--config")
    spec = _game_spec(args, cp["game"])
    out_dir = args.out or (cp["bench"].get("out", "results") if cp.has_section("bench") else "results")
    runs = []
    for section in cp.sections():
        if not section.startswith("run "):
            continue
        label = section[len("run "):].strip()
        settings = {}
        for key, typ in _SOLVE_KEYS.items():
            if key in cp[section] and cp[section][key].strip():
                settings[key] = typ(cp[section][key].strip())
        runs.append((label, _run_config(spec, settings, label=label)))
    if not runs and not args.allow_empty:
        raise CliError("bench config defines no [run <label>] sections", flag="--config")
    suite = ExperimentSuite(game=spec, runs=tuple(runs), out_dir=out_dir)
    try:
        manifest = run_experiment(suite)
    except ValueError as exc:
        raise CliError(str(exc), flag="--config") from exc
    failures = [e["label"] for e in manifest["runs"] if "error" in e]
    print(f"wrote {len(manifest['runs'])} run(s) to {out_dir}")
    for entry in manifest["runs"]:
        if "error" in entry:
            print(f"  {entry['label']}: FAILED ({entry['error']})")
        else:
            print(
                f"  {entry['label']}: e={entry['final_exploitability']:.3e} "
                f"k={entry['k']} stop={entry['stop_reason']}"
            )
    return 1 if failures else 0


def _cmd_inspect(args) -> int:
    spec = _game_spec(args, None)
    game = make_game(spec)
    report = validate_perfect_recall(game)
    print(f"game: {spec}")
    print(f"nodes: {game.num_nodes}")
    print(f"infosets_p1: {game.num_infosets(P1)}")
    print(f"infosets_p2: {game.num_infosets(P2)}")
    print(f"infosets_total: {game.isets.num_infosets}")
    print(f"actions_total: {game.isets.total_slots}")
    print(f"delta: {game.payoff_range:g}")
    print(f"max_depth: {int(game.depth.max())}")
    print(f"valid: {report.ok}")
    if not report.ok:
        print(report)
        return 1
    return 0


def _verify_checks():
    from .restriction import Population, init_population, restricted_view

    def check_tiny_trace():
        spec = GameSpec.make("tiny")
        game = make_game(spec)
        pop = init_population(game)
        assert pop.serialize() == {"player1": {"p1": [0]}, "player2": {"p2": [1]}}
        res = run(RunConfig(game=game, algo="pdo", period=1, target_exploitability=1e-12, max_iterations=50))
        assert res.k == 1 and abs(res.exploitability) <= 1e-12

    def check_best_response_oracle():
        rng = np.random.default_rng(11)
        for family, kwargs in (("tiny", {}), ("kuhn", {"pot": 1})):
            game = make_game(GameSpec.make(family, **kwargs))
            for _ in range(10):
                for player in (P1, P2):
                    opp = _random_strategy(game, 1 - player, rng)
                    fast = best_response(game, opp, player).value
                    slow = brute_force_best_response(game, opp, player).value
                    assert abs(fast - slow) < 1e-12

    def check_regret_matching():
        rng = np.random.default_rng(5)
        for _ in range(50):
            dist = regret_matching(rng.normal(size=rng.integers(1, 8)))
            assert np.all(dist >= 0) and abs(dist.sum() - 1.0) < 1e-9

    def check_window_weights():
        for variant in ("vanilla", "plus"):
            scheme = WeightScheme(variant)
            for length in (1, 2, 5, 17):
                total = sum(window_weight(scheme, t, length) for t in range(1, length + 1))
                assert abs(total - 1.0) < 1e-9

    def check_lemma_bound():
        game = make_game(GameSpec.make("kuhn", pot=1))
        res = run(RunConfig(game=game, algo="pdo", period=50, max_iterations=300))
        stats = k_statistics(res)
        assert stats["bound_satisfied"] and stats["k"] <= stats["infoset_total"]

    def check_pdo1_equals_xodo():
        game = make_game(GameSpec.make("kuhn", pot=1))
        a = run(RunConfig(game=game, algo="pdo", period=1, max_iterations=100, snapshot_every=1, output="last_window"))
        b = run(RunConfig(game=game, algo="xodo", max_iterations=100, snapshot_every=1, output="last_window"))
        assert a.window_lengths == b.window_lengths and a.visited == b.visited
        assert all(np.array_equal(x, y) for x, y in zip(a.history.flats, b.history.flats))

    def check_csv_round_trip():
        game = make_game(GameSpec.make("tiny"))
        res = run(RunConfig(game=game, algo="xodo", max_iterations=30))
        with tempfile.TemporaryDirectory() as td:
            path = Path(td) / "log.csv"
            write_csv(res.log, path)
            back = read_csv(path)
        assert [r.__dict__ for r in back] == [r.__dict__ for r in res.log]

    return (
        ("tiny golden trace", check_tiny_trace),
        ("best response equals brute force", check_best_response_oracle),
        ("regret matching yields distributions", check_regret_matching),
        ("window weights sum to one", check_window_weights),
        ("window count bound", check_lemma_bound),
        ("pdo(1) equals xodo", check_pdo1_equals_xodo),
        ("csv round trip", check_csv_round_trip),
    )


def _random_strategy(game, player, rng):
    isets = game.isets
    flat = np.zeros(isets.total_slots)
    for s in isets.infosets_of(player):
        row = rng.random(isets.n_actions[s]) + 1e-3
        flat[isets.offset[s] : isets.offset[s + 1]] = row / row.sum()
    return BehaviorStrategy(game, player, flat)


def _cmd_verify(args) -> int:
    failures = 0
    for name, check in _verify_checks():
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"PASS {name}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmdo",
        description="Double-oracle and CFR solvers for two-player zero-sum games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one solver configuration")
    _add_game_flags(solve)
    solve.add_argument("--algo", choices=("pdo", "xodo", "xdo", "cfr"))
    solve.add_argument("--period", type=int, help="pdo: iterations between best responses")
    solve.add_argument("--regret", choices=("plus", "vanilla"))
    solve.add_argument("--target-eps", dest="target_eps", type=float)
    solve.add_argument("--max-iterations", dest="max_iterations", type=int)
    solve.add_argument("--max-visited", dest="max_visited", type=int)
    solve.add_argument("--max-seconds", dest="max_seconds", type=float)
    solve.add_argument("--eval-every", dest="eval_every", type=int)
    solve.add_argument("--output", choices=("overall", "last_window"))
    solve.add_argument("--xdo-eps0", dest="xdo_eps0", type=float)
    solve.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    solve.add_argument("--exact-regret", action="store_true", help="retain every iteration's strategy")
    solve.add_argument("--csv", help="write the run log to this path")
    solve.add_argument("--config", help="INI config file ([game] and [solve] sections)")
    solve.set_defaults(func=_cmd_solve)

    bench = sub.add_parser("bench", help="run an experiment suite from a config file")
    _add_game_flags(bench)
    bench.add_argument("--config", required=True, help="INI config with [game] and [run <label>] sections")
    bench.add_argument("--out", help="output directory (overrides [bench] out)")
    bench.add_argument("--allow-empty", action="store_true", help="accept a suite with no runs")
    bench.set_defaults(func=_cmd_bench)

    inspect = sub.add_parser("inspect", help="print game statistics")
    _add_game_flags(inspect)
    inspect.set_defaults(func=_cmd_inspect)

    verify = sub.add_parser("verify", help="run the built-in invariant checks")
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        return _emit_error(exc, exc.flag)
    except GameSpecError as exc:
        return _emit_error(exc, "--game")
    except (ValueError, OSError) as exc:
        return _emit_error(exc)


if __name__ == "__main__":
    sys.exit(main())
