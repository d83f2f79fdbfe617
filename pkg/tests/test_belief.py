import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from invlearn import (
    LikelihoodRow,
    SimulationConfig,
    belief_init,
    belief_update,
    likelihood_row,
    loglik_profile,
    map_estimate,
    run_simulation,
)
from invlearn.equilibrium import ActionGrid
from invlearn.game import DemandGrid, GameParams, PlayerParams

from conftest import make_game


def toy_game(alpha=1.0, cells1=(0.2, 0.5, 0.3), cells2=(0.4, 0.4, 0.2)):
    """Three demand cells of width 0.1 per player; opponent grid has six cells."""
    return GameParams(
        PlayerParams(4.0, 0.6, 2.0, alpha),
        PlayerParams(4.0, 0.6, 1.0, alpha),
        DemandGrid.from_cells(cells1, 0.1),
        DemandGrid.from_cells(cells2, 0.1),
    )


def interval_by_hand(params, observer, s, y):
    """Literal cell-pair enumeration with 1-based cells l, m, k."""
    v = params.view(observer)
    d, a = v.delta, v.own.alpha
    m_cells = ActionGrid(d, v.opp_upper).m
    out = np.zeros(m_cells)
    for k in range(1, m_cells + 1):
        for l, pl in enumerate(v.own_demand.cells, start=1):
            for m, pm in enumerate(v.opp_demand.cells, start=1):
                lo = min(y, (l - 1) * d + a * max((m - 1) * d - k * d, 0.0))
                hi = min(y, l * d + a * max(m * d - (k - 1) * d, 0.0))
                if lo - 1e-12 <= s <= hi + 1e-12:
                    out[k - 1] += pl * pm
    return out


def exact_by_quadrature(params, observer, s, y, n_act=200, n_dem=400):
    """Midpoint quadrature over the opponent's action within its cell and its demand.

    Own demand is piecewise uniform, so its density and CDF are explicit; the
    sale is a density below the stock and a stockout probability at it.
    """
    v = params.view(observer)
    d, a = v.delta, v.own.alpha
    m_cells = ActionGrid(d, v.opp_upper).m
    own = v.own_demand.cells
    edges = np.arange(own.size + 1) * d
    own_cdf = np.concatenate([[0.0], np.cumsum(own)])

    def f_own(x):
        idx = np.floor(x / d).astype(int)
        ok = (x >= 0) & (idx < own.size)
        return np.where(ok, own[np.clip(idx, 0, own.size - 1)] / d, 0.0)

    def F_own(x):
        return np.interp(x, edges, own_cdf)

    opp = v.opp_demand.cells
    u = (np.arange(n_dem) + 0.5) / n_dem
    dj = ((np.arange(opp.size)[:, None] + u[None, :]) * d).ravel()
    wj = np.repeat(opp / n_dem, n_dem)
    out = np.zeros(m_cells)
    for k in range(m_cells):
        yj = (k + (np.arange(n_act) + 0.5) / n_act) * d
        spill = a * np.maximum(dj[None, :] - yj[:, None], 0.0)
        if s < y:
            vals = f_own(s - spill)
        else:
            vals = 1.0 - F_own(y - spill)
        out[k] = (vals @ wj).mean()
    return out


class TestBeliefInit:
    def test_uniform(self):
        b = belief_init(ActionGrid(0.01, 2.0))
        assert b.m == 200
        assert np.allclose(b.weights, 0.005)
        assert b.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert map_estimate(b) == pytest.approx(0.005)

    def test_read_only(self):
        b = belief_init(ActionGrid(0.01, 2.0))
        with pytest.raises(ValueError):
            b.weights[0] = 1.0


class TestIntervalKernel:
    @pytest.mark.parametrize("s,y", [(0.05, 0.2), (0.15, 0.25), (0.2, 0.2), (0.27, 0.27), (0.0, 0.1), (0.33, 0.4)])
    @pytest.mark.parametrize("observer", [1, 2])
    def test_matches_enumeration(self, s, y, observer):
        g = toy_game()
        row = likelihood_row(g, observer, s, y, kernel="interval").values
        assert np.allclose(row, interval_by_hand(g, observer, s, y), atol=1e-12)

    def test_matches_enumeration_half_spillover(self):
        g = toy_game(alpha=0.5)
        for s, y in ((0.12, 0.3), (0.3, 0.3), (0.21, 0.45)):
            assert np.allclose(likelihood_row(g, 1, s, y, kernel="interval").values,
                               interval_by_hand(g, 1, s, y), atol=1e-12)

    @pytest.mark.parametrize("s,y", [(0.05, 0.2), (0.15, 0.25), (0.25, 0.35), (0.02, 0.4)])
    def test_covers_exact_density(self, s, y):
        # Each cell pair's sales density is at most its mass over delta.
        g = toy_game()
        interval = likelihood_row(g, 1, s, y, kernel="interval").values
        exact = likelihood_row(g, 1, s, y, kernel="exact").values
        assert np.all(interval >= g.delta * exact - 1e-12)

    @pytest.mark.parametrize("y", [0.05, 0.2, 0.31, 0.45])
    def test_covers_exact_stockout(self, y):
        g = toy_game()
        interval = likelihood_row(g, 1, y, y, kernel="interval").values
        exact = likelihood_row(g, 1, y, y, kernel="exact").values
        assert np.all(interval >= exact - 1e-12)


class TestExactKernel:
    @pytest.mark.parametrize("s,y", [(0.05, 0.2), (0.15, 0.25), (0.22, 0.41), (0.2, 0.2), (0.33, 0.33)])
    def test_matches_quadrature(self, s, y):
        g = toy_game()
        row = likelihood_row(g, 1, s, y).values
        assert np.allclose(row, exact_by_quadrature(g, 1, s, y), atol=2e-3, rtol=2e-3)

    def test_matches_quadrature_example1(self, ex1):
        for s, y in ((0.3, 0.45), (0.45, 0.45), (0.6, 0.8)):
            row = likelihood_row(ex1, 2, s, y).values
            ref = exact_by_quadrature(ex1, 2, s, y, n_act=20, n_dem=20)
            assert np.allclose(row, ref, atol=2e-3, rtol=2e-3)

    @pytest.mark.parametrize("y", [0.12, 0.25, 0.4])
    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_sales_law_normalized(self, y, alpha):
        g = toy_game(alpha=alpha)
        n = 2000
        ss = (np.arange(n) + 0.5) / n * y
        dens = np.array([likelihood_row(g, 1, s, y).values for s in ss])
        total = dens.mean(axis=0) * y + likelihood_row(g, 1, y, y).values
        assert np.allclose(total, 1.0, atol=2e-3)

    def test_matches_monte_carlo_stockout(self, ex1):
        rng = np.random.default_rng(5)
        k, y = 30, 0.8
        yj = (k + rng.random(500_000)) * ex1.delta
        s = np.minimum(y, rng.random(500_000) + np.maximum(rng.random(500_000) - yj, 0.0))
        want = np.mean(s >= y)
        assert likelihood_row(ex1, 2, y, y).values[k] == pytest.approx(want, abs=3e-3)


class TestKernelShared:
    @pytest.mark.parametrize("kernel", ["exact", "interval"])
    def test_alpha_zero_constant(self, kernel):
        g = make_game(alpha1=0.0)
        for s, y in ((0.2, 0.5), (0.5, 0.5)):
            row = likelihood_row(g, 1, s, y, kernel).values
            assert row[0] > 0 and np.all(row == row[0])

    @pytest.mark.parametrize("kernel", ["exact", "interval"])
    @pytest.mark.parametrize("y", [0.3, 0.45, 0.8])
    def test_stockout_nonincreasing(self, ex1, kernel, y):
        row = likelihood_row(ex1, 1, y, y, kernel).values
        assert np.all(np.diff(row) <= 1e-12)

    @pytest.mark.parametrize("kernel", ["exact", "interval"])
    def test_model_sales_have_support(self, ex1, kernel):
        rng = np.random.default_rng(2)
        for _ in range(200):
            y1, y2 = rng.uniform(0, 2, 2)
            x1, x2 = rng.random(2)
            s = min(y1, x1 + max(x2 - y2, 0.0))
            row = likelihood_row(ex1, 1, s, y1, kernel).values
            assert np.all(row >= 0) and row.max() > 0
            k = min(int(y2 / ex1.delta), row.size - 1)
            assert row[k] > 0

    def test_contract(self, ex1):
        with pytest.raises(ValueError):
            likelihood_row(ex1, 1, 0.5, 0.4)
        with pytest.raises(ValueError):
            likelihood_row(ex1, 1, -0.1, 0.4)
        with pytest.raises(ValueError):
            likelihood_row(ex1, 1, 0.1, 0.4, kernel="bogus")


grid = ActionGrid(0.1, 1.0)
rows = arrays(np.float64, 10, elements=st.floats(1e-6, 10.0))


class TestUpdate:
    def test_constant_row_keeps_prior(self):
        b = belief_init(grid)
        assert belief_update(b, LikelihoodRow(np.full(10, 0.3))) is b

    def test_indicator(self):
        b = belief_update(belief_init(grid), LikelihoodRow(np.eye(10)[3]))
        assert np.array_equal(b.weights, np.eye(10)[3])
        assert map_estimate(b) == pytest.approx(0.35)

    def test_zero_row_rejected(self):
        b = belief_update(belief_init(grid), LikelihoodRow(np.eye(10)[3]))
        c = belief_update(b, LikelihoodRow(np.eye(10)[5]))
        assert c.rejected_updates == 1
        assert np.array_equal(c.weights, b.weights)

    def test_bad_rows(self):
        b = belief_init(grid)
        with pytest.raises(ValueError):
            belief_update(b, LikelihoodRow(np.ones(9)))
        with pytest.raises(ValueError):
            belief_update(b, LikelihoodRow(-np.ones(10)))

    def test_tie_break(self):
        row = np.ones(10)
        row[[2, 7]] = 5.0
        assert map_estimate(belief_update(belief_init(grid), LikelihoodRow(row))) == pytest.approx(0.25)

    @given(rows, rows)
    def test_composition(self, r1, r2):
        b = belief_init(grid)
        two = belief_update(belief_update(b, LikelihoodRow(r1)), LikelihoodRow(r2))
        one = belief_update(b, LikelihoodRow(r1 * r2))
        assert np.allclose(two.weights, one.weights, atol=1e-9)

    @given(st.lists(rows, min_size=2, max_size=6), st.randoms())
    def test_commutative(self, rs, rnd):
        b = belief_init(grid)
        order = list(range(len(rs)))
        rnd.shuffle(order)
        a, c = b, b
        for r in rs:
            a = belief_update(a, LikelihoodRow(r))
        for i in order:
            c = belief_update(c, LikelihoodRow(rs[i]))
        assert np.allclose(a.weights, c.weights, atol=1e-9)

    @given(st.lists(arrays(np.float64, 10, elements=st.floats(0.0, 1e3)), min_size=1, max_size=30))
    @settings(max_examples=60)
    def test_probability_vector(self, rs):
        b = belief_init(grid)
        for r in rs:
            b = belief_update(b, LikelihoodRow(r))
        assert np.all(b.weights >= 0)
        assert abs(b.weights.sum() - 1) <= 1e-9
        w = np.exp(b.log_weights)
        assert np.allclose(w / w.sum(), b.weights, atol=1e-9)

    def test_long_run_no_underflow(self, ex1):
        b = belief_init(ActionGrid(0.01, 2.0))
        row = likelihood_row(ex1, 1, 0.45, 0.45)
        for _ in range(5000):
            b = belief_update(b, row)
        assert abs(b.weights.sum() - 1) <= 1e-9
        assert np.isfinite(b.log_weights.max())


class TestProfile:
    def test_single_observation(self, ex1):
        prof = loglik_profile([(0.3, 0.45)], ex1, 1)
        with np.errstate(divide="ignore"):
            assert np.array_equal(prof, np.log(likelihood_row(ex1, 1, 0.3, 0.45).values))

    def test_average(self, ex1):
        hist = [(0.3, 0.45), (0.45, 0.45), (0.1, 0.5)]
        with np.errstate(divide="ignore"):
            want = sum(np.log(likelihood_row(ex1, 1, s, y).values) for s, y in hist) / 3
        assert np.allclose(loglik_profile(hist, ex1, 1), want)

    def test_empty(self, ex1):
        with pytest.raises(ValueError):
            loglik_profile([], ex1, 1)


def test_mass_near_truth_grows(ex1):
    # Player 2 learns a frozen player 1 at 0.6; 5-cell window around cell 60.
    stages = (1, 25, 50, 100, 150)
    mass = []
    for seed in range(20):
        cfg = SimulationConfig(ex1, snapshot_stages=stages, freeze={1: 0.6})
        t = run_simulation(cfg, seed, stages[-1])
        mass.append([t.snapshots[n][1][58:63].sum() for n in stages])
    trend = np.mean(mass, axis=0)
    assert np.all(np.diff(trend) >= 0), trend
