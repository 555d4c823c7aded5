"""
Norm shapes and the distances they induce
=========================================

A convex, point-symmetric shape is the unit ball of a norm.  The norm of v
is the largest projection a.v over the shape's generators, so a polygon
with k direction classes needs exactly k dot products per distance.
"""

from fractions import Fraction as F

from larg_lab import (
    LpShape,
    Vec2,
    box_shape,
    diamond_l1,
    distance,
    rational_hexagon,
    regular_hexagon,
    square_linf,
)

# the five stock shapes
hexagon = rational_hexagon()       # generators (1,0), (0,1), (1,1)
square = square_linf()             # max(|dx|, |dy|)
diamond = diamond_l1()             # |dx| + |dy|, as a rotated box
slanted = box_shape(Vec2(F(2), F(1)), Vec2(F(-1), F(3)))
circle = LpShape(2.0)

u = Vec2(F(1, 3), F(1, 7))
v = Vec2(F(5, 6), F(3, 4))
print("same pair, five metrics:")
for name, shape in [
    ("hexagon", hexagon),
    ("square", square),
    ("diamond", diamond),
    ("slanted box", slanted),
    ("euclidean", circle),
]:
    d = distance(shape, u, v)
    print(f"  {name:12s} d = {d} ~ {float(d):.6f}")

# rational inputs stay exact under polygonal metrics: the hexagon distance
# of rational points is a Fraction, never a rounded float
d = distance(hexagon, u, v)
print("\nexact hexagon distance:", d, type(d).__name__)

# the regular hexagon needs sqrt(3), so it lives in float mode
print("regular hexagon distance:", f"{distance(regular_hexagon(), u, v):.6f}")

# a box metric is any parallelogram: exactly two generator directions.
# Boxes are the predictable metrics; everything here downstream (grids,
# enumerations, decay experiments) treats them as the special case.
print("\nbox? ", {name: s.is_box() for name, s in
                  [("hexagon", hexagon), ("square", square), ("slanted", slanted)]})
