"""Repeated play: MAP estimate, best response, demand, sales, belief update."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .belief import Belief, belief_init, belief_update, likelihood_row, map_estimate
from .equilibrium import ActionGrid, best_response, forbidden_region, full_supports, nash_solve
from .game import GameParams, PlayerView, sales_realize, sample_demand


@dataclass(frozen=True)
class PlayerState:
    """What one player carries between stages.

    There is deliberately no slot for the opponent's actions or economics:
    the belief and the player's own (sale, stock) log are all it learns from.
    """

    id: int
    view: PlayerView
    belief: Belief
    history: tuple[tuple[float, float], ...] = ()
    kernel: str = "exact"
    fixed_action: float | None = None

    def decide(self) -> tuple[float, float]:
        """Return ``(map_estimate, action)`` for the coming stage."""
        guess = map_estimate(self.belief)
        if self.fixed_action is not None:
            return guess, self.fixed_action
        return guess, best_response(self.view, self.id, guess)

    def observe(self, sale: float, action: float) -> "PlayerState":
        row = likelihood_row(self.view, self.id, sale, action, self.kernel)
        return replace(self, belief=belief_update(self.belief, row),
                       history=self.history + ((sale, action),))


def initial_state(params: GameParams, player: int, kernel: str = "exact",
                  fixed_action: float | None = None) -> PlayerState:
    grid = ActionGrid(params.delta, params.upper(3 - player))
    return PlayerState(player, params.view(player), belief_init(grid), (), kernel, fixed_action)


@dataclass(frozen=True)
class StageRecord:
    n: int
    y1: float
    y2: float
    map1: float
    map2: float
    xi1: float
    xi2: float
    s1: float
    s2: float
    dist_to_nash: float
    rejected1: bool = False
    rejected2: bool = False


@dataclass(frozen=True)
class SimulationConfig:
    """Inputs of a single run besides the seed and stage count.

    ``snapshot_stages`` is ``"all"`` or a collection of stage indices whose
    start-of-stage beliefs are kept. ``freeze`` pins a player's action.
    """

    params: GameParams
    kernel: str = "exact"
    snapshot_stages: object = ()
    freeze: dict = field(default_factory=dict)

    def wants_snapshot(self, n: int) -> bool:
        return self.snapshot_stages == "all" or n in self.snapshot_stages


@dataclass(frozen=True, eq=False)
class Trajectory:
    records: tuple[StageRecord, ...]
    seed: int
    params: GameParams
    nash: tuple[float, float]
    snapshots: dict = field(default_factory=dict)
    final_beliefs: tuple[Belief, Belief] | None = None

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)


def stage_rng(seed: int, n: int) -> np.random.Generator:
    """Generator for stage ``n`` only, keyed by ``(seed, n)``."""
    return np.random.default_rng(np.random.SeedSequence([seed, n]))


def stage_advance(p1: PlayerState, p2: PlayerState, params: GameParams,
                  rng: np.random.Generator, nash: tuple[float, float], n: int = 1):
    map1, y1 = p1.decide()
    map2, y2 = p2.decide()
    xi1 = sample_demand(params.d1, rng)
    xi2 = sample_demand(params.d2, rng)
    s1 = sales_realize(y1, y2, xi1, xi2, params.p1.alpha)
    s2 = sales_realize(y2, y1, xi2, xi1, params.p2.alpha)
    q1 = p1.observe(s1, y1)
    q2 = p2.observe(s2, y2)
    rec = StageRecord(
        n, y1, y2, map1, map2, xi1, xi2, s1, s2,
        max(abs(y1 - nash[0]), abs(y2 - nash[1])),
        q1.belief.rejected_updates > p1.belief.rejected_updates,
        q2.belief.rejected_updates > p2.belief.rejected_updates,
    )
    return rec, q1, q2


def run_simulation(config: SimulationConfig | GameParams, seed: int, n_stages: int) -> Trajectory:
    if n_stages < 1:
        raise ValueError("n_stages must be at least 1")
    if isinstance(config, GameParams):
        config = SimulationConfig(config)
    params = config.params
    nash = nash_solve(params)
    p1 = initial_state(params, 1, config.kernel, config.freeze.get(1))
    p2 = initial_state(params, 2, config.kernel, config.freeze.get(2))
    records, snaps = [], {}
    for n in range(1, n_stages + 1):
        if config.wants_snapshot(n):
            snaps[n] = (p1.belief.weights, p2.belief.weights)
        rec, p1, p2 = stage_advance(p1, p2, params, stage_rng(seed, n), nash, n)
        records.append(rec)
    return Trajectory(tuple(records), seed, params, nash, snaps, (p1.belief, p2.belief))


def convergence_metric(t: Trajectory, window: int) -> tuple[float, float]:
    """Mean and max distance to Nash over the last ``window`` stages."""
    if not 1 <= window <= len(t):
        raise ValueError(f"window must be in [1, {len(t)}], got {window}")
    tail = t.column("dist_to_nash")[-window:]
    return float(tail.mean()), float(tail.max())


def trailing_means(t: Trajectory, window: int) -> dict[str, float]:
    return {k: float(t.column(k)[-window:].mean()) for k in ("y1", "y2", "map1", "map2")}


def permanent_exit_stage(values, region, eps: float = 0.0) -> int | None:
    """First stage from which ``values`` never again falls in ``region``.

    Stages are 1-based; ``None`` if the last value is still inside.
    """
    inside = [region.contains(v, eps) for v in values]
    if inside and inside[-1]:
        return None
    last = max((i for i, flag in enumerate(inside) if flag), default=-1)
    return last + 2


def forbidden_region_checks(t: Trajectory, eps: float | None = None) -> dict:
    """Forbidden-region diagnostics for one trajectory.

    Played actions must avoid the regions built from the full prior supports,
    and each MAP estimate must eventually leave the eps-shrunk region for good.
    """
    params = t.params
    eps = 2 * params.delta if eps is None else eps
    b1, b2 = full_supports(params)
    u1, u2 = forbidden_region(params, b1, b2, t.nash)
    y1, y2 = t.column("y1"), t.column("y2")
    return {
        "u1": u1,
        "u2": u2,
        "y2_in_u1": int(sum(u1.contains(v) for v in y2)),
        "y1_in_u2": int(sum(u2.contains(v) for v in y1)),
        "map1_exit": permanent_exit_stage(t.column("map1"), u1, eps),
        "map2_exit": permanent_exit_stage(t.column("map2"), u2, eps),
    }

