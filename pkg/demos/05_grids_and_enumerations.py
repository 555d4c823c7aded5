"""
Line grids and good enumerations
================================

Two finite structures that make countable point sets tractable.  Line
families grow by intersecting and re-spanning: from a base pair whose
spacing is irrational the offsets mod 1 equidistribute, while a rational
spacing stays locked in a finite cycle.  Good enumerations order a sample
so each hop is short and every point carries a three-reference certificate
that pins it down; an anchor plus three distances then reconstructs images
of translated points exactly.
"""

from fractions import Fraction as F

from larg_lab import (
    AnchoringError,
    PointSet,
    SqrtExt,
    Vec2,
    Window,
    distance,
    fractional_part,
    generate_grid,
    good_enumeration,
    grid_offsets,
    offset_gaps,
    rational_hexagon,
    reconstruct_from_anchor,
    rescale_to_idf,
    sample_poisson_window,
    validate_good_enumeration,
)

hexa = rational_hexagon()
gens = hexa.generators

# ---------------------------------------------------------------------------
# grids from an irrational base spacing

r = SqrtExt(-1, 1, 2)  # sqrt(2) - 1, exact
base = (Vec2(F(0), F(0)), Vec2(r, F(0)))
print("line family over base spacing sqrt(2)-1:")
for depth in range(5):
    family = generate_grid(base, gens, depth, 3)
    print(f"  depth {depth}: {len(family)} lines")

family = generate_grid(base, gens, 5, 3)
offsets = grid_offsets(family, gens[0])
print(f"\noffsets mod 1 along {gens[0]}: {len(offsets)} values, "
      f"max gap {max(offset_gaps(offsets)):.4f}")
want = fractional_part(2 * r + 1)
print("  contains frac(2r+1)?", want in set(offsets))

# a rational spacing never leaves its cycle
base3 = (Vec2(F(0), F(0)), Vec2(F(1, 3), F(0)))
family3 = generate_grid(base3, gens, 5, 3)
print("spacing 1/3 offsets:", sorted(set(grid_offsets(family3, gens[0]))))

# ---------------------------------------------------------------------------
# good enumerations

pts = sample_poisson_window(Window(F(0), F(0), F(5), F(5)), 8.0, seed=21, mode="rational")
_, pts = rescale_to_idf(pts, gens, seed=4)
enum = good_enumeration(pts, hexa)
validate_good_enumeration(enum)
hops = [
    float(distance(hexa, pts.points[enum.order[i]], pts.points[enum.order[i + 1]]))
    for i in range(len(enum.order) - 1)
]
print(f"\ngood enumeration of {len(pts)} points: anchor {enum.anchor()}, "
      f"{len(enum.unplaced)} unplaced, max hop {max(hops):.4f}")

# ---------------------------------------------------------------------------
# anchored reconstruction of a translation

# each certificate names three references whose face normals pin its point;
# imagining the sample shifted by t, three distances recover every image
t = Vec2(F(5, 7), F(-3, 11))
recovered = skipped = 0
for pos in range(3, len(enum.order)):
    x = pts.points[enum.order[pos]]
    cert = enum.certificates[pos]
    refs = [pts.points[enum.order[j]] for j in cert.refs]
    dists = [distance(hexa, x, m) for m in refs]
    try:
        y = reconstruct_from_anchor(hexa, refs, [m + t for m in refs], x, dists)
    except AnchoringError:
        skipped += 1  # reference triple fails the strict triangle inequality
        continue
    assert y == x + t
    recovered += 1
print(f"reconstructed {recovered} of {len(enum.order) - 3} certified points "
      f"exactly as x + {t} from three distances each ({skipped} skipped)")
