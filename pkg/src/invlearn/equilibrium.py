"""Best responses, Nash equilibrium and the interval-contraction machinery."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .game import GameParams, PlayerView, _GRID_EPS, _utility_curve, _view_of, n_cells, total_demand_dist

# Relative slack when comparing expected utilities for ties.
_TIE_RTOL = 1e-12


class NashNotFound(RuntimeError):
    pass


class OracleDisagreement(AssertionError):
    """The fractile oracle and the grid argmax disagree by more than 2 delta."""


@dataclass(frozen=True)
class ActionGrid:
    """Actions ``0, delta, ..., M delta`` with ``M = ceil(upper / delta)``.

    The same grid indexes belief cells: cell ``k`` covers ``[k delta, (k+1) delta)``.
    """

    delta: float
    upper: float

    @property
    def m(self) -> int:
        return n_cells(self.upper, self.delta)

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.m + 1) * self.delta

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.delta

    def cell_of(self, y: float) -> int:
        return min(max(int(math.floor(y / self.delta + _GRID_EPS)), 0), self.m - 1)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, y) -> bool:
        return self.lo - _GRID_EPS <= y <= self.hi + _GRID_EPS

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo - _GRID_EPS <= other.lo and other.hi <= self.hi + _GRID_EPS


@dataclass(frozen=True)
class ForbiddenRegion:
    """Opponent actions a believer can rule out.

    ``lower`` stands for ``[lower.lo, lower.hi)`` and ``upper`` for
    ``(upper.lo, upper.hi]``; either may be absent.
    """

    believer: int
    lower: Interval | None = None
    upper: Interval | None = None

    @property
    def empty(self) -> bool:
        return self.lower is None and self.upper is None

    def contains(self, y: float, eps: float = 0.0) -> bool:
        """Membership in the region shrunk by ``eps`` at its inner boundaries."""
        if self.lower is not None and self.lower.lo <= y < self.lower.hi - eps - _GRID_EPS:
            return True
        if self.upper is not None and self.upper.lo + eps + _GRID_EPS < y <= self.upper.hi:
            return True
        return False


@dataclass(frozen=True)
class ContractionStage:
    n: int
    b1: Interval
    b2: Interval
    phi1: float
    phi2: float


@dataclass(frozen=True)
class ContractionReport:
    stages: tuple[ContractionStage, ...]
    nash: tuple[float, float]
    converged: bool
    final_gap: float

    @property
    def final(self) -> ContractionStage:
        return self.stages[-1]

    def nested(self) -> bool:
        return all(
            a.b1.contains_interval(b.b1) and a.b2.contains_interval(b.b2)
            for a, b in zip(self.stages, self.stages[1:])
        )


def action_grid(params: GameParams, player: int) -> ActionGrid:
    return ActionGrid(params.delta, params.upper(player))


@lru_cache(maxsize=8192)
def _best_response(view: PlayerView, y_opp: float) -> float:
    ys = ActionGrid(view.delta, view.own_upper).points
    g = _utility_curve(view, y_opp, ys)
    best = g.max()
    k = int(np.flatnonzero(g >= best - _TIE_RTOL * max(1.0, abs(best)))[0])
    return float(ys[k])


def best_response(params: GameParams, player: int, y_opp: float) -> float:
    """Grid argmax of expected utility; ties go to the smallest action."""
    if y_opp < 0:
        raise ValueError("y_opp must be nonnegative")
    return _best_response(_view_of(params, player), float(y_opp))


def br_fractile_check(params: GameParams, player: int, y_opp: float) -> float:
    """Smallest grid action whose total-demand CDF reaches the critical fractile.

    Independent of :func:`best_response`: it inverts the floored-spillover
    convolution instead of maximizing the pair-sum utility. Raises
    :class:`OracleDisagreement` if the two answers differ by more than 2 delta.
    """
    v = _view_of(params, player)
    dist = total_demand_dist(v, player, y_opp)
    ys = ActionGrid(v.delta, v.own_upper).points
    k = np.flatnonzero(dist.cdf_at(ys) >= v.own.fractile - 1e-12)
    y = float(ys[k[0]]) if k.size else float(ys[-1])
    br = best_response(v, player, y_opp)
    if abs(y - br) > 2 * v.delta + _GRID_EPS:
        raise OracleDisagreement(
            f"player {player}, y_opp={y_opp}: fractile gives {y}, grid argmax gives {br}"
        )
    return y


def nash_solve(params: GameParams, tol: float | None = None, max_iter: int = 500,
               start: tuple[float, float] = (0.0, 0.0)) -> tuple[float, float]:
    """Alternating best-response iteration from ``start``."""
    delta = params.delta
    if tol is None:
        tol = delta / 2
    if tol < delta / 2 - _GRID_EPS:
        raise ValueError(f"tol={tol} is below half the grid step {delta / 2}")
    y1, y2 = start
    for _ in range(max_iter):
        n1 = best_response(params, 1, y2)
        n2 = best_response(params, 2, n1)
        if abs(n1 - y1) < tol and abs(n2 - y2) < tol:
            return n1, n2
        y1, y2 = n1, n2
    raise NashNotFound(
        f"best-response iteration did not settle within {max_iter} rounds "
        f"(last iterate {y1}, {y2}); parameters may lie outside the contraction regime"
    )


def phi_compose(params: GameParams, player: int, y_start: float, n: int) -> float:
    """``n``-fold alternating composition ending in ``BR_player``.

    ``y_start`` is an action of the opponent; the result is always an action
    of ``player``: ``BR_i``, then ``BR_i o BR_j o BR_i``, and so on.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    other = 3 - player
    y = best_response(params, player, y_start)
    for _ in range(n - 1):
        y = best_response(params, player, best_response(params, other, y))
    return y


def forbidden_region(params: GameParams, b1: Interval, b2: Interval,
                     nash: tuple[float, float] | None = None) -> tuple[ForbiddenRegion, ForbiddenRegion]:
    """Parts of each belief support that the opponent can never play.

    ``b1`` is player 1's support for player 2's action, ``b2`` player 2's
    support for player 1's action. Because best responses are nonincreasing,
    player 2 only ever plays inside ``[BR_2(b2.hi), BR_2(b2.lo)]``; whatever
    of ``b1`` lies outside that range is returned, and symmetrically for b2.
    """
    y1s, y2s = nash if nash is not None else nash_solve(params)
    if y2s not in b1 or y1s not in b2:
        raise ValueError(
            f"Nash point ({y1s}, {y2s}) is not inside the supports b1={b1}, b2={b2}"
        )
    return (
        _region(1, b1, best_response(params, 2, b2.hi), best_response(params, 2, b2.lo)),
        _region(2, b2, best_response(params, 1, b1.hi), best_response(params, 1, b1.lo)),
    )


def _region(believer, support, beta_lo, beta_hi):
    lower = Interval(support.lo, beta_lo) if support.lo < beta_lo - _GRID_EPS else None
    upper = Interval(beta_hi, support.hi) if support.hi > beta_hi + _GRID_EPS else None
    return ForbiddenRegion(believer, lower, upper)


def contraction_report(params: GameParams, b1: Interval, b2: Interval, depth: int,
                       nash: tuple[float, float] | None = None,
                       tol: float | None = None) -> ContractionReport:
    """Nested support intervals with the slack terms set to zero.

    Each step maps ``b1 -> [BR_2(b2.hi), BR_2(b2.lo)]`` and
    ``b2 -> [BR_1(b1.hi), BR_1(b1.lo)]``, intersected with the current
    intervals so nesting holds even where grid ties flatten the maps.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    nash = nash if nash is not None else nash_solve(params)
    tol = 2 * params.delta if tol is None else tol
    stages = [ContractionStage(0, b1, b2, math.nan, math.nan)]
    for n in range(1, depth + 1):
        n1 = Interval(max(b1.lo, best_response(params, 2, b2.hi)), min(b1.hi, best_response(params, 2, b2.lo)))
        n2 = Interval(max(b2.lo, best_response(params, 1, b1.hi)), min(b2.hi, best_response(params, 1, b1.lo)))
        b1, b2 = n1, n2
        stages.append(ContractionStage(
            n, b1, b2,
            phi_compose(params, 1, stages[0].b1.hi, n),
            phi_compose(params, 2, stages[0].b2.lo, n),
        ))
    gap = max(b1.width, b2.width)
    near = max(abs(b1.hi - nash[1]), abs(b1.lo - nash[1]), abs(b2.hi - nash[0]), abs(b2.lo - nash[0]))
    return ContractionReport(tuple(stages), nash, bool(gap <= tol and near <= tol), gap)


def full_supports(params: GameParams) -> tuple[Interval, Interval]:
    """Prior supports ``b1 = [0, a_2]`` and ``b2 = [0, a_1]``."""
    return Interval(0.0, params.upper(2)), Interval(0.0, params.upper(1))
