"""
Agreement decay and the box exception
=====================================

Two independent edge coin sequences over the same point set agree on a
single pair with probability p^2 + (1-p)^2.  Under a hexagon every in-range
pair must agree for a partial isomorphism to survive, so the success
fraction collapses as the prefix grows.  Box metrics escape: rescaled to
integer-difference-free projections, independent samples admit explicit
isomorphisms at rates the hexagon cannot touch.
"""

import os
import tempfile
from fractions import Fraction as F

from larg_lab import (
    ExperimentConfig,
    PointSet,
    Vec2,
    Window,
    back_and_forth_isomorphism,
    box_isomorphism_demo,
    box_shape,
    compatibility_probability,
    rational_hexagon,
    rescale_to_idf,
    rows_to_csv,
    run_decay_experiment,
    sample_larg,
    sample_poisson_window,
)

# ---------------------------------------------------------------------------
# the decay run

cfg = ExperimentConfig(
    shape="hexagon",
    window=(0, 0, 1, 1),
    intensity=60.0,
    n_values=(3, 5, 8, 12),
    p=0.5,
    trials=60,
    base_seed=9,
)
rows = run_decay_experiment(cfg)
p_star = compatibility_probability(cfg.p, True)
print(f"per-pair agreement probability p* = {p_star}")
print("n   fraction   wilson 95%          reference bound")
for r in rows:
    print(f"{r.n:<3} {r.fraction:<10.4f} [{r.ci_lo:.4f}, {r.ci_hi:.4f}]  "
          f"{r.paper_bound:.3g}")

# rows serialize to a fixed-column CSV for plotting elsewhere
path = os.path.join(tempfile.mkdtemp(), "decay.csv")
rows_to_csv(rows, path)
with open(path) as fh:
    print("\nCSV head:", fh.readline().strip())

# ---------------------------------------------------------------------------
# the box exception

small_box = box_shape(Vec2(F(2), F(0)), Vec2(F(0), F(2)))
hexa = rational_hexagon()
raw = sample_poisson_window(Window(F(0), F(0), F(2), F(2)), 3.0, seed=3, mode="rational")
alpha, pts = rescale_to_idf(raw, small_box.generators + hexa.generators, seed=3)
print(f"\n{len(pts)} points rescaled by alpha = {alpha} to idf projections")

report = box_isomorphism_demo(pts, small_box, p=0.5, seeds=range(12), budget=4000)
print(f"box demo over {report.trials} seed pairs: {report.found} isomorphic, "
      f"{report.none} none, {report.undetermined} undetermined "
      f"(success rate {report.success_rate:.2f})")

# the same coins read through the hexagon metric: more pairs in range,
# more coins that must agree, fewer matches
trials = 60
box_hits = hex_hits = 0
for s in range(trials):
    for shape, tally in ((small_box, "box"), (hexa, "hex")):
        G = sample_larg(pts, shape, 1, 0.5, edge_seed=2 * s + 1)
        H = sample_larg(pts, shape, 1, 0.5, edge_seed=2 * s + 2)
        hit = back_and_forth_isomorphism(G, H, pts, shape)[0] == "isomorphic"
        if tally == "box":
            box_hits += hit
        else:
            hex_hits += hit
print(f"matched coins, {trials} trials: box agrees {box_hits}, "
      f"hexagon agrees {hex_hits}")
