"""
Repeated play
=============

Each stage both players best-respond to their MAP estimate, demand is drawn,
and each updates on its own sale. Output goes to CSV and SVG.
"""
from pathlib import Path

from invlearn import convergence_metric, example1, run_simulation, trailing_means
from invlearn.experiment import emit_csv, emit_svg_plot
from invlearn.simulator import forbidden_region_checks

game = example1()
t = run_simulation(game, seed=0, n_stages=500)
print("computed Nash:", t.nash)
print("first stages (y1, y2):", [(r.y1, r.y2) for r in t.records[:5]])
print("trailing-50 means:", {k: round(v, 3) for k, v in trailing_means(t, 50).items()})
print("trailing-50 (mean, max) distance to Nash:", convergence_metric(t, 50))

chk = forbidden_region_checks(t)
print("actions inside the forbidden regions:", chk["y2_in_u1"], chk["y1_in_u2"])
print("MAP estimates leave them for good at stages:", chk["map1_exit"], chk["map2_exit"])

out = Path("demo_output")
emit_csv(t, out / "seed_0.csv")
emit_svg_plot(t, "actions", out / "actions.svg")
emit_svg_plot(t, "beliefs", out / "beliefs.svg")
print("wrote", sorted(str(p) for p in out.iterdir()))
