"""
The one-stage game
==================

Two stores stock before demand arrives. Unmet demand at one store partly
walks over to the other, so each store's best stock level depends on the
rival's. This script builds the default game, looks at the total demand a
store faces, and traces an expected-profit curve.
"""
import numpy as np

from invlearn import example1, expected_utility, payoff_realized, sales_realize, total_demand_dist

game = example1()
print("player 1:", game.p1)
print("player 2:", game.p2)
print("prior action supports a1, a2 =", game.action_upper)

# Profit of one realized stage: stock 1 unit, nobody shows up.
print("g(y=1, dbar=0) =", payoff_realized(game.p1, 1.0, 0.0))

# Sales are capped by stock; the rival's shortfall spills over.
print("sales with xi=(0.3, 0.9), y=(1, 0.5):", sales_realize(1.0, 0.5, 0.3, 0.9, game.p1.alpha))

# If the rival stocks nothing, all of its demand spills over and total demand
# is the sum of two uniforms (triangular on [0, 2]).
d = total_demand_dist(game, 1, 0.0)
for t in (0.25, 0.5, 1.0):
    print(f"F_total({t}) = {float(d.cdf_at(t)):.4f}   t^2/2 = {t * t / 2:.4f}")

# Expected profit is concave in own stock; its peak moves left as the rival stocks more.
ys = np.arange(0, 101) * game.delta
for y_opp in (0.0, 0.45, 0.8, 1.0):
    g = expected_utility(game, 1, ys, y_opp)
    print(f"rival at {y_opp:.2f}: best stock {ys[np.argmax(g)]:.2f}, profit {g.max():.4f}")

# Pure newsvendor check: with no spillover the peak sits at the critical fractile.
print("critical fractile of player 1:", round(game.p1.fractile, 4))
