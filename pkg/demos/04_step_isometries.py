"""
Step-isometries: floor-preserving maps that are not isometries
==============================================================

The 1D recipe: send x to floor(x) + g(frac(x)) for a strictly increasing g
fixing 0.  Distances change, but their floors never do.  Applied to both
dual coordinates of a box metric the recipe survives in the plane; under a
shape with a third direction class it breaks, and the verifier finds the
breaking pair.
"""

from fractions import Fraction as F

from larg_lab import (
    PointSet,
    Vec2,
    Window,
    box_product_point_map,
    canonical_interleaving,
    explicit_1d_point_map,
    is_isometry,
    is_step_isometry,
    rational_hexagon,
    regular_hexagon,
    rescale_to_idf,
    sample_poisson_window,
    square_linf,
)

# the canonical 1D counterexample on points along the x-axis
xs = [F(7), F(15, 2), F(22, 7), F(9, 5), F(31, 6)]
line = PointSet(
    tuple(Vec2(x, F(0)) for x in xs),
    Window(F(0), F(-1), F(10), F(1)),
    seed=0,
    mode="rational",
)
pmap = explicit_1d_point_map(line)
square = square_linf()
print("1D map: step-isometry?", is_step_isometry(pmap, square).ok)
iso = is_isometry(pmap, square)
print(f"        isometry? {iso.ok}, witness pair {iso.witness}: "
      f"{iso.left} became {iso.right}")

# the box-product lift: apply g to both box coordinates
g = canonical_interleaving()
pts = sample_poisson_window(Window(F(0), F(0), F(4), F(4)), 15.0, seed=2, mode="rational")
_, pts = rescale_to_idf(pts, square.generators, seed=1)
boxmap = box_product_point_map(pts, square, g, g)
print(f"\nbox lift on {len(pts)} points: step-isometry?",
      is_step_isometry(boxmap, square).ok)

# the same construction measured against the regular hexagon: the third
# direction class catches it
floats = sample_poisson_window(Window(0.0, 0.0, 12.0, 12.0), 4.0, seed=12)
hexmap = box_product_point_map(floats, square, g, g)
verdict = is_step_isometry(hexmap, regular_hexagon())
print(f"same lift under the regular hexagon: ok={verdict.ok}, "
      f"witness {verdict.witness} floors {verdict.left} vs {verdict.right}")

# the rational hexagon rejects it too, in exact arithmetic
verdict = is_step_isometry(boxmap, rational_hexagon())
print(f"and under the rational hexagon:      ok={verdict.ok}, "
      f"witness {verdict.witness}")
