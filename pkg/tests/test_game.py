import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invlearn import (
    DemandGrid,
    PlayerParams,
    expected_utility,
    payoff_realized,
    sales_realize,
    sample_demand,
    total_demand_dist,
)
from invlearn.game import n_cells

from conftest import make_game

P1 = PlayerParams(4.0, 0.6, 2.0, 1.0)


def brute_utility(params, player, y, y_opp):
    """Plain double loop over demand-cell pairs at cell midpoints."""
    v = params.view(player)
    total = 0.0
    for l, pl in enumerate(v.own_demand.cells):
        if pl == 0:
            continue
        for m, pm in enumerate(v.opp_demand.cells):
            if pm == 0:
                continue
            dbar = (l + 0.5) * v.delta + v.own.alpha * max((m + 0.5) * v.delta - y_opp, 0.0)
            total += pl * pm * payoff_realized(v.own, y, dbar)
    return total


class TestPlayerParams:
    def test_profitability_rejected(self):
        with pytest.raises(ValueError, match="profitability constraint"):
            PlayerParams(4.0, 0.6, 5.0, 1.0)
        with pytest.raises(ValueError, match="profitability constraint"):
            PlayerParams(4.0, 0.6, 4.0, 1.0)

    @pytest.mark.parametrize("kw", [dict(r=-1), dict(h=0), dict(c=0), dict(alpha=1.5), dict(alpha=-0.1)])
    def test_bad_values(self, kw):
        args = dict(r=4.0, h=0.6, c=2.0, alpha=1.0) | kw
        with pytest.raises(ValueError):
            PlayerParams(**args)

    def test_fractile(self):
        assert P1.fractile == pytest.approx(2 / 4.6)


class TestDemandGrid:
    def test_uniform_cells(self):
        g = DemandGrid.uniform(1.0, 0.01)
        assert g.n == 100
        assert np.allclose(g.cells, 0.01)
        assert abs(g.cells.sum() - 1) <= 1e-12
        assert np.all(np.diff(g.cdf) >= 0) and abs(g.cdf[-1] - 1) <= 1e-12

    def test_partial_cells(self):
        g = DemandGrid.uniform(0.25, 0.1, lower=0.05)
        assert g.n == 3
        assert np.allclose(g.cells, [0.25, 0.5, 0.25])

    def test_from_cells_validation(self):
        with pytest.raises(ValueError):
            DemandGrid.from_cells([0.5, 0.6], 0.1)
        with pytest.raises(ValueError):
            DemandGrid.from_cells([1.2, -0.2], 0.1)
        with pytest.raises(ValueError):
            DemandGrid.from_cells([1.0], 0.0)

    def test_n_cells_tolerates_float_noise(self):
        assert n_cells(2.0, 0.01) == 200
        assert n_cells(0.3, 0.1) == 3

    def test_game_rejects_mixed_delta(self):
        from invlearn import GameParams
        with pytest.raises(ValueError):
            GameParams(P1, P1, DemandGrid.uniform(1, 0.01), DemandGrid.uniform(1, 0.02))

    def test_default_action_upper(self, ex1):
        assert ex1.action_upper == (2.0, 2.0)
        g = make_game(alpha1=0.5, alpha2=0.0)
        assert g.action_upper == (1.5, 1.0)


class TestTotalDemand:
    def test_no_spillover_when_opponent_covers_demand(self, ex1):
        d = total_demand_dist(ex1, 1, 1.0)
        assert np.array_equal(d.values, ex1.d1.cells)

    def test_alpha_zero(self):
        g = make_game(alpha1=0.0)
        for y in (0.0, 0.3, 0.9):
            assert np.array_equal(total_demand_dist(g, 1, y).values, g.d1.cells)

    def test_triangular_cdf(self, ex1):
        d = total_demand_dist(ex1, 1, 0.0)
        t = np.linspace(0, 1, 41)
        assert np.max(np.abs(d.cdf_at(t) - t ** 2 / 2)) < 2 * ex1.delta

    def test_atoms_and_support(self, ex1):
        for y in (0.0, 0.25, 0.6, 1.3):
            d = total_demand_dist(ex1, 2, y)
            assert abs(d.values.sum() - 1) < 1e-10
            assert d.support_upper <= 1.0 + max(1.0 - y, 0.0) + ex1.delta + 1e-12

    @given(st.floats(0, 2), st.sampled_from([0.0, 0.5, 1.0]))
    @settings(max_examples=40, deadline=None)
    def test_mean(self, y, alpha):
        g = make_game(alpha1=alpha, delta=0.02)
        d = total_demand_dist(g, 1, y)
        want = g.d1.mean() + alpha * g.d2.expected_excess(y)
        assert abs(d.mean() - want) <= 2 * g.delta

    def test_negative_action(self, ex1):
        with pytest.raises(ValueError):
            total_demand_dist(ex1, 1, -0.1)


class TestPayoff:
    def test_examples(self):
        assert payoff_realized(P1, 0.0, 0.7) == 0.0
        assert payoff_realized(P1, 1.0, 0.0) == pytest.approx(-2.6)
        assert payoff_realized(P1, 0.5, 0.9) == pytest.approx(1.0)

    @given(st.floats(0, 5), st.floats(0, 5))
    def test_upper_bound(self, y, dbar):
        assert payoff_realized(P1, y, dbar) <= (P1.r - P1.c) * y + 1e-12

    def test_vectorized(self):
        out = payoff_realized(P1, np.array([0.0, 1.0]), 0.0)
        assert out.shape == (2,)


class TestExpectedUtility:
    def test_zero_stock(self, ex1):
        assert expected_utility(ex1, 1, 0.0, 0.4) == 0.0

    @pytest.mark.parametrize("player,y,y_opp", [(1, 0.45, 0.8), (2, 0.8, 0.45), (1, 0.0, 0.0),
                                                (2, 1.7, 0.1), (1, 0.33, 1.5)])
    def test_matches_double_sum(self, player, y, y_opp):
        g = make_game(delta=0.05)
        assert expected_utility(g, player, y, y_opp) == pytest.approx(brute_utility(g, player, y, y_opp), abs=1e-12)

    def test_matches_monte_carlo(self, ex1):
        rng = np.random.default_rng(7)
        d1, d2 = rng.random(400_000), rng.random(400_000)
        dbar = d1 + np.maximum(d2 - 0.8, 0.0)
        mc = payoff_realized(ex1.p1, 0.45, dbar).mean()
        assert expected_utility(ex1, 1, 0.45, 0.8) == pytest.approx(mc, abs=5e-3)

    @given(st.floats(0, 2), st.sampled_from([1, 2]))
    @settings(max_examples=30, deadline=None)
    def test_concave(self, y_opp, player):
        g = make_game(delta=0.02)
        ys = np.arange(0, 101) * g.delta
        u = expected_utility(g, player, ys, y_opp)
        assert np.max(np.diff(u, 2)) <= 1e-9

    def test_standalone_newsvendor_argmax(self, ex1):
        ys = np.arange(0, 201) * ex1.delta
        u = expected_utility(ex1, 1, ys, 5.0)
        assert ys[np.argmax(u)] == pytest.approx(0.43)

    def test_negative_input(self, ex1):
        with pytest.raises(ValueError):
            expected_utility(ex1, 1, -0.1, 0.0)


class TestSampling:
    def test_inverse_cdf(self):
        g = DemandGrid.uniform(1.0, 0.01)
        assert g.quantile(0.5) == 0.5
        assert DemandGrid.uniform(3.0, 0.01, lower=1.0).quantile(0.25) == 1.5

    def test_mean(self):
        g = DemandGrid.uniform(1.0, 0.01)
        rng = np.random.default_rng(0)
        assert abs(np.mean([sample_demand(g, rng) for _ in range(100_000)]) - 0.5) < 0.005

    def test_seeded(self):
        g = DemandGrid.uniform(1.0, 0.01)
        a = [sample_demand(g, np.random.default_rng(3)) for _ in range(3)]
        b = [sample_demand(g, np.random.default_rng(3)) for _ in range(3)]
        assert a == b

    def test_cells_sample_midpoints(self):
        g = DemandGrid.from_cells([0.0, 1.0, 0.0], 0.1)
        rng = np.random.default_rng(1)
        assert all(abs(sample_demand(g, rng) - 0.15) < 1e-12 for _ in range(20))


class TestSales:
    def test_examples(self):
        assert sales_realize(0.0, 0.5, 0.3, 0.9, 1.0) == 0.0
        assert sales_realize(1.0, 0.5, 0.3, 0.9, 1.0) == pytest.approx(0.7)
        assert sales_realize(0.5, 0.5, 0.3, 0.9, 1.0) == 0.5

    def test_alpha_scales_spillover(self):
        assert sales_realize(1.0, 0.5, 0.3, 0.9, 0.5) == pytest.approx(0.5)

    @given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_bounds(self, y, yo, xs, xo, a):
        s = sales_realize(y, yo, xs, xo, a)
        assert 0.0 <= s <= y
