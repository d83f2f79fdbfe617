"""
Learning a rival's stock from your own sales
============================================

A store never sees the rival's stock. It only sees its own sales, which are
higher when the rival runs out. The likelihood of a sale under each
hypothesised rival stock drives a grid Bayes filter.
"""
import numpy as np

from invlearn import (
    SimulationConfig,
    belief_init,
    belief_update,
    example1,
    likelihood_row,
    loglik_profile,
    map_estimate,
    run_simulation,
)
from invlearn.equilibrium import action_grid

game = example1()
grid = action_grid(game, 2)
b = belief_init(grid)
print("prior MAP:", map_estimate(b))

# A stockout at 0.45 is more likely when the rival stocks little.
row = likelihood_row(game, 1, 0.45, 0.45)
print("P(stockout | rival cell) at 0.05, 0.8, 1.5:", np.round(row.values[[5, 80, 150]], 4))
b = belief_update(b, row)
print("MAP after one stockout:", map_estimate(b))

# The cruder interval kernel over-covers and leans toward small rival stocks.
crude = likelihood_row(game, 1, 0.3, 0.45, kernel="interval")
exact = likelihood_row(game, 1, 0.3, 0.45)
print("interval / (delta * exact) at cells 10, 80:",
      np.round(crude.values[[10, 80]] / (game.delta * exact.values[[10, 80]]), 3))

# Freeze player 2 at 0.6 and let player 1 learn for a while.
t = run_simulation(SimulationConfig(game, freeze={2: 0.6}), seed=0, n_stages=1000)
prof = loglik_profile(zip(t.column("s1"), t.column("y1")), game, 1)
print("log-likelihood profile argmax:", (np.argmax(prof) + 0.5) * game.delta)
print("MAP over the last 100 stages:", t.column("map1")[-100:].mean().round(3))
