"""Two-player inventory competition with demand spillover.

Each player stocks ``y_i`` before its local demand ``d_i`` arrives. A fraction
``alpha_i`` of the opponent's unmet demand, ``(d_j - y_j)^+``, switches over,
so player ``i`` faces the total demand ``d_i + alpha_i (d_j - y_j)^+``.

Demand distributions live on a shared grid of step ``delta``; cell ``k``
(0-based) holds the probability of ``[k delta, (k+1) delta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_GRID_EPS = 1e-9


def n_cells(upper: float, delta: float) -> int:
    """Number of delta-cells needed to cover ``[0, upper]``."""
    return max(1, math.ceil(upper / delta - _GRID_EPS))


@dataclass(frozen=True)
class PlayerParams:
    r: float
    h: float
    c: float
    alpha: float

    def __post_init__(self):
        for name in ("r", "h", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not self.r > self.c:
            raise ValueError(
                f"profitability constraint violated: selling price r={self.r} must "
                f"exceed ordering cost c={self.c}"
            )

    @property
    def fractile(self) -> float:
        """Critical newsvendor fractile ``(r - c) / (r + h)``."""
        return (self.r - self.c) / (self.r + self.h)


@dataclass(frozen=True, eq=False)
class DemandGrid:
    """Local demand discretized on a delta-grid.

    ``kind`` is ``"uniform"`` (continuous uniform on ``[lower, upper]``,
    sampled exactly by inverse CDF) or ``"cells"`` (an arbitrary cell pmf,
    sampled at cell midpoints). Hashing is by identity so grids can key caches.
    """

    delta: float
    cells: np.ndarray
    kind: str = "cells"
    lower: float = 0.0
    upper: float = 0.0
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        cells = np.asarray(self.cells, dtype=float).copy()
        if cells.ndim != 1 or cells.size == 0:
            raise ValueError("cells must be a nonempty vector")
        if (cells < 0).any():
            raise ValueError("cell probabilities must be nonnegative")
        total = cells.sum()
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"cell probabilities sum to {total}, expected 1")
        cells /= total
        cells.flags.writeable = False
        cdf = np.cumsum(cells)
        cdf.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "cdf", cdf)
        if self.kind == "cells":
            object.__setattr__(self, "upper", cells.size * self.delta)
        elif self.kind != "uniform":
            raise ValueError(f"unknown demand kind {self.kind!r}")

    @classmethod
    def uniform(cls, upper: float, delta: float, lower: float = 0.0) -> "DemandGrid":
        if not 0.0 <= lower < upper:
            raise ValueError(f"need 0 <= lower < upper, got [{lower}, {upper}]")
        n = n_cells(upper, delta)
        edges = np.arange(n + 1) * delta
        overlap = np.clip(np.minimum(edges[1:], upper) - np.maximum(edges[:-1], lower), 0.0, None)
        return cls(delta, overlap / (upper - lower), kind="uniform", lower=lower, upper=upper)

    @classmethod
    def from_cells(cls, cells, delta: float) -> "DemandGrid":
        return cls(delta, np.asarray(cells, dtype=float), kind="cells")

    @property
    def n(self) -> int:
        return self.cells.size

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.delta

    @property
    def d_max(self) -> float:
        return self.upper

    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.lower + self.upper)
        return float(self.cells @ self.midpoints)

    def expected_excess(self, y: float) -> float:
        """``E (d - y)^+`` under the generator distribution."""
        if self.kind == "uniform":
            lo, hi = self.lower, self.upper
            t = min(max(y, lo), hi)
            above = (hi - t) * (0.5 * (hi + t) - y)
            return above / (hi - lo)
        return float(self.cells @ np.maximum(self.midpoints - y, 0.0))

    def quantile(self, u: float) -> float:
        """Inverse CDF of the generator distribution at ``u`` in [0, 1)."""
        if self.kind == "uniform":
            return self.lower + u * (self.upper - self.lower)
        k = int(np.searchsorted(self.cdf, u, side="right"))
        return (min(k, self.n - 1) + 0.5) * self.delta


@dataclass(frozen=True)
class PlayerView:
    """Everything player ``i`` knows about the game.

    Own economics, both local demand distributions and the two prior
    supports. Nothing about the opponent's prices or costs.
    """

    own: PlayerParams
    own_demand: DemandGrid
    opp_demand: DemandGrid
    own_upper: float
    opp_upper: float

    @property
    def delta(self) -> float:
        return self.own_demand.delta


@dataclass(frozen=True)
class GameParams:
    p1: PlayerParams
    p2: PlayerParams
    d1: DemandGrid
    d2: DemandGrid
    action_upper: tuple[float, float] | None = None

    def __post_init__(self):
        if not math.isclose(self.d1.delta, self.d2.delta, rel_tol=0, abs_tol=1e-15):
            raise ValueError("both demand grids must share one delta")
        if self.action_upper is None:
            a1 = self.d1.d_max + self.p1.alpha * self.d2.d_max
            a2 = self.d2.d_max + self.p2.alpha * self.d1.d_max
            object.__setattr__(self, "action_upper", (a1, a2))
        else:
            a1, a2 = (float(a) for a in self.action_upper)
            if not (a1 > 0 and a2 > 0):
                raise ValueError("action upper bounds must be positive")
            object.__setattr__(self, "action_upper", (a1, a2))

    @property
    def delta(self) -> float:
        return self.d1.delta

    def player(self, i: int) -> PlayerParams:
        return (self.p1, self.p2)[_check_index(i)]

    def demand(self, i: int) -> DemandGrid:
        return (self.d1, self.d2)[_check_index(i)]

    def upper(self, i: int) -> float:
        return self.action_upper[_check_index(i)]

    def view(self, i: int) -> PlayerView:
        j = 3 - i
        return PlayerView(self.player(i), self.demand(i), self.demand(j), self.upper(i), self.upper(j))


def _check_index(i: int) -> int:
    if i not in (1, 2):
        raise ValueError(f"player index must be 1 or 2, got {i!r}")
    return i - 1


@dataclass(frozen=True, eq=False)
class TotalDemandDist:
    """Cell pmf of total demand on the shared delta-grid."""

    delta: float
    values: np.ndarray

    @property
    def cdf(self) -> np.ndarray:
        """``cdf[q]`` is the probability of total demand below ``(q+1) delta``."""
        return np.cumsum(self.values)

    @property
    def support_upper(self) -> float:
        nz = np.flatnonzero(self.values)
        return (nz[-1] + 1) * self.delta if nz.size else 0.0

    def mean(self) -> float:
        return float(self.values @ ((np.arange(self.values.size) + 0.5) * self.delta))

    def cdf_at(self, t):
        """CDF at ``t``, linear within each cell."""
        t = np.asarray(t, dtype=float)
        edges = np.concatenate([[0.0], self.cdf])
        pos = np.clip(t / self.delta, 0.0, self.values.size)
        q = np.minimum(np.floor(pos).astype(int), self.values.size - 1)
        frac = pos - q
        return edges[q] + frac * self.values[q]


def _view_of(params, player):
    return params if isinstance(params, PlayerView) else params.view(player)


def total_demand_dist(params: GameParams, player: int, y_opp: float) -> TotalDemandDist:
    """Distribution of ``d_i + alpha_i (d_j - y_opp)^+`` by discrete convolution.

    Spillover from each opponent demand cell is evaluated at the cell midpoint
    and floored onto the grid.
    """
    if y_opp < 0:
        raise ValueError("y_opp must be nonnegative")
    v = _view_of(params, player)
    delta = v.delta
    own, opp = v.own_demand.cells, v.opp_demand.cells
    spill = v.own.alpha * np.maximum(v.opp_demand.midpoints - y_opp, 0.0)
    shift = np.floor(spill / delta + _GRID_EPS).astype(int)
    live = np.flatnonzero(opp)
    shifts, inverse = np.unique(shift[live], return_inverse=True)
    out = np.zeros(own.size + int(shifts[-1]))
    if shifts.size == 1:
        # No spillover variation: the own grid, shifted, without rounding noise.
        out[shifts[0]:shifts[0] + own.size] = own
        return TotalDemandDist(delta, out)
    weights = np.bincount(inverse, weights=opp[live])
    for sh, w in zip(shifts, weights):
        out[sh:sh + own.size] += w * own
    return TotalDemandDist(delta, out)


def payoff_realized(params: PlayerParams, y, dbar):
    """``r min(y, dbar) - h (y - dbar)^+ - c y``."""
    y = np.asarray(y, dtype=float)
    dbar = np.asarray(dbar, dtype=float)
    out = params.r * np.minimum(y, dbar) - params.h * np.maximum(y - dbar, 0.0) - params.c * y
    return out.item() if out.ndim == 0 else out


@lru_cache(maxsize=2048)
def _demand_atoms(view: PlayerView, y_opp: float):
    # Total-demand atoms over all (own, opponent) cell pairs at cell midpoints.
    own, opp = view.own_demand, view.opp_demand
    vals = own.midpoints[:, None] + view.own.alpha * np.maximum(opp.midpoints[None, :] - y_opp, 0.0)
    wts = own.cells[:, None] * opp.cells[None, :]
    keep = wts > 0
    vals, wts = vals[keep], wts[keep]
    order = np.argsort(vals, kind="stable")
    vals, wts = vals[order], wts[order]
    return vals, np.cumsum(wts), np.cumsum(wts * vals)


def _utility_curve(view: PlayerView, y_opp: float, ys) -> np.ndarray:
    vals, cw, cwv = _demand_atoms(view, float(y_opp))
    ys = np.asarray(ys, dtype=float)
    idx = np.searchsorted(vals, ys, side="right")
    below = np.where(idx > 0, cw[np.maximum(idx - 1, 0)], 0.0)
    below_v = np.where(idx > 0, cwv[np.maximum(idx - 1, 0)], 0.0)
    p = view.own
    # E[r min(y,D) - h (y-D)^+] - c y = (r-c) y - (r+h) E(y-D)^+
    return (p.r - p.c) * ys - (p.r + p.h) * (ys * below - below_v)


def expected_utility(params: GameParams, player: int, y_self, y_opp: float):
    """Expected payoff ``G_i`` of stocking ``y_self`` against ``y_opp``.

    Exact double sum over demand-cell pairs with midpoint representatives.
    Accepts a scalar or an array of ``y_self`` values.
    """
    if np.any(np.asarray(y_self) < 0) or y_opp < 0:
        raise ValueError("actions must be nonnegative")
    out = _utility_curve(_view_of(params, player), y_opp, y_self)
    return out.item() if out.ndim == 0 else out


def sample_demand(grid: DemandGrid, rng: np.random.Generator) -> float:
    return grid.quantile(rng.random())


def sales_realize(y_self: float, y_opp: float, xi_self: float, xi_opp: float, alpha_self: float) -> float:
    """Units sold: stock capped by local demand plus received spillover."""
    return min(y_self, xi_self + alpha_self * max(xi_opp - y_opp, 0.0))
