"""Discrete belief over the opponent's action and its Bayes update.

Two likelihood kernels are available for a sales observation ``s`` made
while holding stock ``y``:

``"exact"``
    The sales law under the discretized model: both local demands are
    piecewise uniform on their cells and the opponent's action is uniform
    within the hypothesised cell. Uncensored sales (``s < y``) contribute a
    density, a stockout (``s == y``) the probability that total demand
    reached ``y``.

``"interval"``
    Cell-pair enumeration: a pair of demand cells counts fully whenever the
    range of sales it can produce contains ``s``. Its weights are not
    normalized by the width of that range, so hypotheses with more
    spillover uncertainty are systematically favoured.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .equilibrium import ActionGrid
from .game import GameParams, PlayerView, _GRID_EPS, _view_of

KERNELS = ("exact", "interval")


@dataclass(frozen=True, eq=False)
class Belief:
    grid: ActionGrid
    weights: np.ndarray
    log_weights: np.ndarray
    rejected_updates: int = 0

    @property
    def m(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class LikelihoodRow:
    values: np.ndarray
    kernel: str = "exact"


def _frozen(a):
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


def belief_init(grid: ActionGrid) -> Belief:
    m = grid.m
    return Belief(grid, _frozen(np.full(m, 1.0 / m)), _frozen(np.full(m, -np.log(m))))


def map_estimate(b: Belief) -> float:
    """Midpoint of the most probable cell (first one on ties)."""
    return (int(np.argmax(b.weights)) + 0.5) * b.grid.delta


def belief_update(b: Belief, row: LikelihoodRow) -> Belief:
    """Posterior proportional to likelihood times prior, in log space.

    A row that is zero wherever the prior has mass cannot come from the
    model; the prior is kept and ``rejected_updates`` is incremented.
    """
    lik = np.asarray(row.values, dtype=float)
    if lik.shape != b.weights.shape:
        raise ValueError(f"likelihood row has {lik.size} cells, belief has {b.m}")
    if (lik < 0).any():
        raise ValueError("likelihood values must be nonnegative")
    if lik[0] > 0 and (lik == lik[0]).all():
        return b
    with np.errstate(divide="ignore"):
        lw = b.log_weights + np.log(lik)
    top = lw.max()
    if not np.isfinite(top):
        return Belief(b.grid, b.weights, b.log_weights, b.rejected_updates + 1)
    w = np.exp(lw - top)
    total = w.sum()
    return Belief(b.grid, _frozen(w / total), _frozen(lw - top - np.log(total)), b.rejected_updates)


def likelihood_row(params: GameParams, observer: int, s_obs: float, y_self: float,
                   kernel: str = "exact") -> LikelihoodRow:
    """Likelihood of one own-sales observation for every opponent action cell."""
    if s_obs > y_self + _GRID_EPS:
        raise ValueError(f"sales {s_obs} exceed the stock level {y_self}")
    if s_obs < 0:
        raise ValueError("sales must be nonnegative")
    v = _view_of(params, observer)
    if kernel == "exact":
        values = _exact_row(v, float(s_obs), float(y_self))
    elif kernel == "interval":
        values = _interval_row(v, float(s_obs), float(y_self))
    else:
        raise ValueError(f"unknown likelihood kernel {kernel!r}; expected one of {KERNELS}")
    return LikelihoodRow(_frozen(values), kernel)


def loglik_profile(history, params: GameParams, observer: int, kernel: str = "exact") -> np.ndarray:
    """Average log-likelihood per opponent cell over ``(s_obs, y_self)`` pairs."""
    history = list(history)
    if not history:
        raise ValueError("history must be nonempty")
    total = 0.0
    with np.errstate(divide="ignore"):
        for s, y in history:
            total = total + np.log(likelihood_row(params, observer, s, y, kernel).values)
    return total / len(history)


class _SpillTables:
    """Closed forms for the spillover CDF given an opponent action cell.

    With the opponent's demand in cell ``m`` and its action uniform in cell
    ``k``, ``(d_j - y_j) / delta`` is ``m - k`` plus a triangular variable on
    ``[-1, 1]``. Mixing over ``m`` gives ``P(d_j - y_j <= v) = Q(v / delta + k)``
    where ``Q`` is piecewise quadratic with integer knots; ``R`` is its
    antiderivative, needed for stockout probabilities.
    """

    def __init__(self, opp_cells: np.ndarray):
        p = np.asarray(opp_cells, dtype=float)
        self.n = p.size
        self.p = np.concatenate([p, [0.0, 0.0]])
        self.below = np.concatenate([[0.0], np.cumsum(p)])
        ks = np.arange(-1, self.n + 1)
        steps = self._below(ks) + self._p(ks) * (5.0 / 6.0) + self._p(ks + 1) / 6.0
        # r_int[i] = R(i - 1)
        self.r_int = np.concatenate([[0.0], np.cumsum(steps)])

    def _p(self, i):
        inside = (i >= 0) & (i < self.n)
        return np.where(inside, self.p[np.clip(i, 0, self.n - 1)], 0.0)

    def _below(self, i):
        return self.below[np.clip(i, 0, self.n)]

    def q(self, x):
        whole = np.floor(x)
        f = x - whole
        i = whole.astype(int)
        return self._below(i) + self._p(i) * (1.0 - 0.5 * (1.0 - f) ** 2) + self._p(i + 1) * 0.5 * f * f

    def r(self, x):
        xc = np.clip(x, -1.0, self.n + 1.0)
        i = np.minimum(np.floor(xc).astype(int), self.n)
        f = xc - i
        val = (self.r_int[i + 1] + self._below(i) * f
               + self._p(i) * (f - (1.0 - (1.0 - f) ** 3) / 6.0)
               + self._p(i + 1) * f ** 3 / 6.0)
        return val + np.maximum(x - (self.n + 1.0), 0.0)


@lru_cache(maxsize=64)
def _tables(view: PlayerView) -> _SpillTables:
    return _SpillTables(view.opp_demand.cells)


def _exact_row(v: PlayerView, s: float, y: float) -> np.ndarray:
    delta, alpha = v.delta, v.own.alpha
    m = ActionGrid(delta, v.opp_upper).m
    own = v.own_demand.cells
    if alpha == 0.0:
        # No spillover: the observation is uninformative about the opponent.
        if s < y:
            l = min(int(np.floor(s / delta)), own.size - 1)
            val = own[l] / delta
        else:
            val = float(own @ np.clip((v.own_demand.midpoints + 0.5 * delta - y) / delta, 0.0, 1.0))
        return np.full(m, val)
    t = _tables(v)
    k = np.arange(m)[None, :]
    lo_edge = (np.arange(own.size) * delta)[:, None]
    scale = alpha * delta

    if s < y:
        def spill_cdf(z):
            return np.where(z >= 0.0, t.q(k + np.maximum(z, 0.0) / scale), 0.0)
        dens = spill_cdf(s - lo_edge) - spill_cdf(s - lo_edge - delta)
        return np.clip(own @ dens, 0.0, None) / delta

    z1 = np.maximum(y - lo_edge, 0.0)
    z0 = np.maximum(y - lo_edge - delta, 0.0)
    short = alpha * (t.r(k + z1 / scale) - t.r(k + z0 / scale))
    return np.clip(1.0 - own @ short, 0.0, 1.0)


def _interval_row(v: PlayerView, s: float, y: float) -> np.ndarray:
    # 1-based cells: own demand l, opponent demand m, opponent action k.
    delta, alpha = v.delta, v.own.alpha
    own, opp = v.own_demand.cells, v.opp_demand.cells
    m_cells = ActionGrid(delta, v.opp_upper).m
    n_own = own.size
    cum = np.concatenate([[0.0], np.cumsum(own)])
    mm = np.arange(1, opp.size + 1)[:, None]
    kk = np.arange(1, m_cells + 1)[None, :]
    low_spill = alpha * np.maximum((mm - 1 - kk) * delta, 0.0)
    high_spill = alpha * np.maximum((mm - kk + 1) * delta, 0.0)
    if s < y:
        # min(y, (l-1)D + low) <= s  and  s <= min(y, lD + high)
        l_lo = np.ceil((s - high_spill) / delta - _GRID_EPS)
        l_hi = np.floor((s - low_spill) / delta + _GRID_EPS) + 1
    else:
        # stockout: only the upper bound must reach y
        l_lo = np.ceil((y - high_spill) / delta - _GRID_EPS)
        l_hi = np.full_like(l_lo, n_own)
    l_lo = np.clip(l_lo, 1, n_own + 1).astype(int)
    l_hi = np.clip(l_hi, 0, n_own).astype(int)
    mass = np.where(l_hi >= l_lo, cum[l_hi] - cum[np.minimum(l_lo - 1, n_own)], 0.0)
    return opp @ mass
