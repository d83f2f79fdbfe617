"""Experiment configuration: INI (or JSON) in, validated dataclass out.

Grammar (INI, ``#`` comments)::

    [game]
    delta = 0.01

    [player1]            # and [player2]
    r = 4                # selling price
    h = 0.6              # holding cost
    c = 2                # ordering cost, must be below r
    alpha = 1            # share of the opponent's unmet demand received
    demand = uniform 0 1 # or: cells p1 p2 ... (one probability per delta-cell)
    action_upper = 2     # optional prior support for this player's action

    [run]
    stages = 500
    seeds = 0..19        # comma list, inclusive ranges a..b, or a mix
    likelihood = exact   # or: interval
    window = 50          # trailing window for summary statistics
    snapshots = none     # none | all | comma list of stages
    output = runs/example1
    jobs = 1

A JSON document with the same sections and keys is accepted too.
"""
from __future__ import annotations

import configparser
import json
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

from ..belief import KERNELS
from ..game import DemandGrid, GameParams, PlayerParams
from ..simulator import SimulationConfig


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class DemandSpec:
    kind: str
    lower: float = 0.0
    upper: float = 1.0
    cells: tuple[float, ...] = ()

    def grid(self, delta: float) -> DemandGrid:
        if self.kind == "uniform":
            return DemandGrid.uniform(self.upper, delta, self.lower)
        return DemandGrid.from_cells(self.cells, delta)


@dataclass(frozen=True)
class ExperimentConfig:
    p1: PlayerParams
    p2: PlayerParams
    demand1: DemandSpec
    demand2: DemandSpec
    delta: float = 0.01
    a1: float | None = None
    a2: float | None = None
    n_stages: int = 500
    seeds: tuple[int, ...] = (0,)
    output: str = "runs/default"
    likelihood: str = "exact"
    window: int = 50
    snapshots: object = ()
    jobs: int = 1

    def game_params(self) -> GameParams:
        uppers = None
        if self.a1 is not None or self.a2 is not None:
            default = GameParams(self.p1, self.p2, self.demand1.grid(self.delta), self.demand2.grid(self.delta))
            uppers = (self.a1 or default.action_upper[0], self.a2 or default.action_upper[1])
        return GameParams(self.p1, self.p2, self.demand1.grid(self.delta), self.demand2.grid(self.delta), uppers)

    def simulation_config(self) -> SimulationConfig:
        return SimulationConfig(self.game_params(), self.likelihood, self.snapshots)

    def resolved(self) -> dict:
        """Every setting with defaults filled in, as plain JSON-able data."""
        a1, a2 = self.game_params().action_upper
        out = {
            "game": {"delta": self.delta},
            "run": {
                "stages": self.n_stages,
                "seeds": list(self.seeds),
                "likelihood": self.likelihood,
                "window": self.window,
                "snapshots": self.snapshots if self.snapshots == "all" else list(self.snapshots),
                "output": self.output,
                "jobs": self.jobs,
            },
        }
        for i, (p, d, a) in enumerate(((self.p1, self.demand1, a1), (self.p2, self.demand2, a2)), start=1):
            entry = asdict(p)
            entry["demand"] = {k: v for k, v in asdict(d).items() if v != ()}
            if d.kind == "cells":
                entry["demand"]["cells"] = list(d.cells)
            entry["action_upper"] = a
            out[f"player{i}"] = entry
        return out

    def with_overrides(self, seeds=None, stages=None, output=None) -> "ExperimentConfig":
        changes = {}
        if seeds:
            changes["seeds"] = tuple(int(s) for s in seeds)
        if stages is not None:
            if stages < 1:
                raise ConfigError("run.stages", "must be at least 1")
            changes["n_stages"] = int(stages)
        if output is not None:
            changes["output"] = str(output)
        return replace(self, **changes)


def shipped_configs() -> list[str]:
    return sorted(p.name.rsplit(".", 1)[0] for p in resources.files("invlearn.configs").iterdir()
                  if p.name.endswith((".ini", ".json")))


def parse_config(path) -> ExperimentConfig:
    """Load and validate a config file, or a shipped config by name."""
    text, suffix, label = _read(path)
    if suffix == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(label, f"invalid JSON: {e}") from None
    else:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text, source=label)
        except configparser.Error as e:
            raise ConfigError(label, f"invalid INI: {e}") from None
        raw = {s: dict(parser[s]) for s in parser.sections()}
    return from_dict(raw)


def _read(path):
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), p.suffix.lower(), str(p)
    for ext in (".ini", ".json"):
        res = resources.files("invlearn.configs") / f"{path}{ext}"
        if res.is_file():
            return res.read_text(encoding="utf-8"), ext, f"<shipped {path}{ext}>"
    raise ConfigError(str(path), "no such config file or shipped config "
                                 f"(shipped: {', '.join(shipped_configs())})")


def from_dict(raw: dict) -> ExperimentConfig:
    unknown = set(raw) - {"game", "player1", "player2", "run"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    game = raw.get("game", {})
    run = raw.get("run", {})
    delta = _num(game, "delta", "game", 0.01)
    if not delta > 0:
        raise ConfigError("game.delta", "must be positive")

    players, demands, uppers = [], [], []
    for i in (1, 2):
        sec = f"player{i}"
        if sec not in raw:
            raise ConfigError(sec, "missing section")
        entry = raw[sec]
        extra = set(entry) - {"r", "h", "c", "alpha", "demand", "action_upper"}
        if extra:
            raise ConfigError(f"{sec}.{sorted(extra)[0]}", "unknown field")
        values = {k: _num(entry, k, sec) for k in ("r", "h", "c", "alpha")}
        try:
            players.append(PlayerParams(**values))
        except ValueError as e:
            field = "c" if "profitability" in str(e) else next((k for k in values if str(e).startswith(k)), "r")
            raise ConfigError(f"{sec}.{field}", str(e)) from None
        demands.append(_demand(entry.get("demand", "uniform 0 1"), f"{sec}.demand", delta))
        a = entry.get("action_upper")
        uppers.append(None if a in (None, "") else _num(entry, "action_upper", sec))

    extra = set(run) - {"stages", "seeds", "likelihood", "window", "snapshots", "output", "jobs"}
    if extra:
        raise ConfigError(f"run.{sorted(extra)[0]}", "unknown field")
    stages = _int(run, "stages", 500)
    if stages < 1:
        raise ConfigError("run.stages", "must be at least 1")
    window = _int(run, "window", 50)
    if window < 1:
        raise ConfigError("run.window", "must be at least 1")
    jobs = _int(run, "jobs", 1)
    likelihood = str(run.get("likelihood", "exact")).strip()
    if likelihood not in KERNELS:
        raise ConfigError("run.likelihood", f"expected one of {KERNELS}, got {likelihood!r}")
    seeds = _seeds(run.get("seeds", "0"))

    cfg = ExperimentConfig(
        players[0], players[1], demands[0], demands[1], delta, uppers[0], uppers[1],
        stages, seeds, str(run.get("output", "runs/default")), likelihood, window,
        _snapshots(run.get("snapshots", "none")), max(1, jobs),
    )
    try:
        cfg.game_params()
    except ValueError as e:
        raise ConfigError("player", str(e)) from None
    return cfg


def _num(section, key, prefix, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"{prefix}.{key}", "missing field")
        return default
    try:
        return float(section[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{prefix}.{key}", f"not a number: {section[key]!r}") from None


def _int(section, key, default):
    v = section.get(key, default)
    try:
        out = int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"run.{key}", f"not an integer: {v!r}") from None
    if isinstance(v, float) and v != out:
        raise ConfigError(f"run.{key}", f"not an integer: {v!r}")
    return out


def _demand(spec, path, delta) -> DemandSpec:
    if isinstance(spec, dict):
        kind = spec.get("kind", "uniform")
        try:
            if kind == "uniform":
                out = DemandSpec("uniform", float(spec.get("lower", 0.0)), float(spec["upper"]))
            else:
                out = DemandSpec("cells", cells=tuple(float(x) for x in spec["cells"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(path, f"bad demand specification: {e}") from None
    else:
        parts = str(spec).replace(",", " ").split()
        if not parts:
            raise ConfigError(path, "empty demand specification")
        kind, args = parts[0], parts[1:]
        try:
            if kind == "uniform":
                if len(args) != 2:
                    raise ValueError("uniform needs a lower and an upper bound")
                out = DemandSpec("uniform", float(args[0]), float(args[1]))
            elif kind == "cells":
                out = DemandSpec("cells", cells=tuple(float(x) for x in args))
            else:
                raise ValueError(f"unknown distribution {kind!r} (use uniform or cells)")
        except ValueError as e:
            raise ConfigError(path, str(e)) from None
    try:
        out.grid(delta)
    except ValueError as e:
        raise ConfigError(path, str(e)) from None
    return out


def _seeds(spec) -> tuple[int, ...]:
    if isinstance(spec, int):
        return (spec,)
    if isinstance(spec, list):
        items = [str(x) for x in spec]
    else:
        items = str(spec).replace(",", " ").split()
    seeds = []
    try:
        for item in items:
            if ".." in item:
                a, b = item.split("..")
                seeds.extend(range(int(a), int(b) + 1))
            else:
                seeds.append(int(item))
    except ValueError:
        raise ConfigError("run.seeds", f"cannot parse {spec!r}") from None
    if not seeds:
        raise ConfigError("run.seeds", "at least one seed is required")
    return tuple(seeds)


def _snapshots(spec):
    if isinstance(spec, list):
        return tuple(sorted(int(x) for x in spec))
    text = str(spec).strip().lower()
    if text in ("", "none"):
        return ()
    if text == "all":
        return "all"
    try:
        return tuple(sorted(int(x) for x in text.replace(",", " ").split()))
    except ValueError:
        raise ConfigError("run.snapshots", f"cannot parse {spec!r}") from None
