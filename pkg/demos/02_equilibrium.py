"""
Best responses, equilibrium and the shrinking intervals
=======================================================

Best responses are nonincreasing, so alternating them from the corners of
the prior supports squeezes both players onto the Nash point. The same
monotonicity rules out parts of the prior support outright.
"""
from invlearn import (
    best_response,
    br_fractile_check,
    contraction_report,
    example1,
    forbidden_region,
    full_supports,
    nash_solve,
    phi_compose,
)

game = example1()
y1, y2 = nash_solve(game)
print(f"Nash point on the grid: ({y1:.2f}, {y2:.2f})")

# Grid argmax and the fractile inversion are independent computations.
for y_opp in (0.0, 0.45, 0.79, 1.5):
    print(f"BR_1({y_opp}) = {best_response(game, 1, y_opp):.2f}   fractile oracle {br_fractile_check(game, 1, y_opp):.2f}")

# Composed best responses from the top of player 2's support home in on y1*.
print("phi_1^n(2):", [phi_compose(game, 1, 2.0, n) for n in range(1, 8)])

# What each player can rule out before seeing a single sale.
b1, b2 = full_supports(game)
u1, u2 = forbidden_region(game, b1, b2)
print("player 1 rules out y2 in", u1)
print("player 2 rules out y1 in", u2)

rep = contraction_report(game, b1, b2, depth=50)
for s in rep.stages[:6]:
    print(f"n={s.n}: b1=[{s.b1.lo:.2f}, {s.b1.hi:.2f}]  b2=[{s.b2.lo:.2f}, {s.b2.hi:.2f}]")
print("nested:", rep.nested(), " converged:", rep.converged, " final gap:", rep.final_gap)
