"""Experiment orchestration: measured regrets, CSV logs, suite execution.

The CSV schema is the public wire format consumed by external tooling:

    iteration,visited_infosets,wall_time_s,exploitability,window,population_size

Floats are serialized with 17 significant digits so parsing a file
recovers the logged rows bit-exactly (wall time is machine-dependent and
excluded from any determinism comparison).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .driver import LogRow, RunConfig, RunLog, RunResult, k_statistics, run
from .games import GameSpec, make_game
from .oracle import best_response
from .tree import P1, BehaviorStrategy, GameTree, node_values

CSV_HEADER = ",".join(RunLog.COLUMNS)

_INT_COLUMNS = ("iteration", "visited_infosets", "window", "population_size")


class SnapshotsUnavailableError(RuntimeError):
    """Raised when a measured-regret query needs snapshots the run did not keep."""


def _fmt(value: float) -> str:
    return format(value, ".17g")


def format_row(row: LogRow) -> str:
    return ",".join(
        (
            str(row.iteration),
            str(row.visited_infosets),
            _fmt(row.wall_time_s),
            _fmt(row.exploitability),
            str(row.window),
            str(row.population_size),
        )
    )


def write_csv(log: RunLog, path) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in log:
            fh.write(format_row(row) + "\n")


def read_csv(path) -> RunLog:
    log = RunLog()
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            log.append(
                LogRow(
                    iteration=int(parts[0]),
                    visited_infosets=int(parts[1]),
                    wall_time_s=float(parts[2]),
                    exploitability=float(parts[3]),
                    window=int(parts[4]),
                    population_size=int(parts[5]),
                )
            )
    return log


def measured_average_regret(result: RunResult, player: int, upto: int | None = None) -> float:
    """Weighted-average regret against a full-game best response.

    Uses the run's retained strategy snapshots with the same global weights
    the output averaging uses; with snapshot cadence 1 this is exact, with a
    sparser cadence it is an estimate over the retained subset.
    """
    history = result.history
    if history is None or not history.ts:
        raise SnapshotsUnavailableError(
            "run kept no strategy snapshots; set snapshot_every (e.g. --exact-regret)"
        )
    T = history.total if upto is None else min(upto, history.total)
    kept = [i for i, t in enumerate(history.ts) if t <= T]
    if not kept:
        raise SnapshotsUnavailableError(f"no snapshots at or before iteration {T}")
    weights = history.global_weights(T)
    w = np.asarray([weights[history.ts[i] - 1] for i in kept])
    w = w / w.sum()

    game = history.game
    isets = game.isets
    sign = 1.0 if player == P1 else -1.0
    mixture_mass = np.zeros(isets.total_slots)
    played_value = 0.0
    for wi, i in zip(w, kept):
        flat = history.flats[i]
        own = isets.own_reach(flat)
        mixture_mass += wi * own[isets.slot_iset] * flat
        played_value += wi * sign * node_values(game, flat, P1)[0]

    mixture = isets.normalize_rows(mixture_mass, np.ones(isets.total_slots, dtype=bool))
    opponent = 1 - player
    opp = BehaviorStrategy(
        game, opponent, np.where(isets.slot_player == opponent, mixture, 0.0)
    )
    br = best_response(game, opp, player)
    return br.value - played_value


@dataclass(frozen=True)
class ExperimentSuite:
    """A shared game plus labeled run configurations and an output directory."""

    game: object  # GameSpec or GameTree
    runs: tuple  # ((label, RunConfig), ...)
    out_dir: str = "results"

    def validate(self) -> None:
        # label problems abort the whole suite; per-run config problems are
        # caught during execution and recorded in the manifest instead
        labels = [label for label, _ in self.runs]
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise ValueError(f"duplicate run labels: {', '.join(dup)}")
        for label, _ in self.runs:
            if not label or "/" in label:
                raise ValueError(f"invalid run label {label!r}")


def suite_concurrency(n_runs: int) -> int:
    cap = os.environ.get("RMDO_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_runs, limit))


def run_experiment(suite: ExperimentSuite) -> dict:
    """Execute every configured run, streaming one CSV per label.

    Failures are recorded in the manifest without disturbing other runs.
    Returns the manifest (also written to ``<out_dir>/manifest.json``).
    """
    suite.validate()
    out_dir = Path(suite.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    game = suite.game if isinstance(suite.game, GameTree) else make_game(suite.game)

    def one(label: str, cfg: RunConfig) -> dict:
        cfg = replace(cfg, game=game, label=label)
        csv_path = out_dir / f"{label}.csv"
        with open(csv_path, "w") as fh:
            fh.write(CSV_HEADER + "\n")

            def on_row(row: LogRow) -> None:
                fh.write(format_row(row) + "\n")
                fh.flush()

            result = run(cfg, on_row=on_row)
        entry = {
            "label": label,
            "config": cfg.describe(),
            "game_stats": result.game_stats(),
            "k": result.k,
            "windows": result.windows,
            "final_exploitability": result.exploitability,
            "stop_reason": result.stop_reason,
            "visited": result.visited,
            "csv": csv_path.name,
            "k_statistics": k_statistics(result),
        }
        pop = result.state.pop
        entry["population"] = pop.serialize() if pop.size <= 20_000 else {"size": pop.size}
        return entry

    entries = []
    workers = suite_concurrency(len(suite.runs))
    if suite.runs:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [(label, pool.submit(one, label, cfg)) for label, cfg in suite.runs]
            for label, fut in futures:
                try:
                    entries.append(fut.result())
                except Exception as exc:  # recorded, not fatal to the suite
                    entries.append({"label": label, "error": f"{type(exc).__name__}: {exc}"})

    game_name = str(suite.game) if isinstance(suite.game, GameSpec) else game.name
    manifest = {"game": game_name, "runs": entries}
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
