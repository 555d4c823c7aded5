"""Families of lines grown from base points by repeated intersection.

Starting from the lines through a base set with normals drawn from a
generator list (plus their integer parallels), each level adds, for every
intersection point of two existing non-parallel lines, the lines through
that point with the remaining generator normals. With at least three
direction classes the offsets along one normal accumulate values z1*r + z2
and, for irrational r, become dense mod 1. With only two classes nothing
new ever appears.

All offsets live in whatever scalar field the inputs use: Fraction, sqrt
extensions, or floats. Levels store only the lines first seen at that
level; `all_lines` flattens.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import exact_div, exact_floor, fractional_part, is_exact
from .geometry import Line, Vec2

__all__ = [
    "GridError",
    "LineFamily",
    "generate_grid",
    "grid_offsets",
    "offset_gaps",
]

# float offsets are deduplicated on a fixed binary rounding
_FLOAT_KEY_SCALE = float(1 << 33)


class GridError(ValueError):
    pass


def _offset_key(c):
    if is_exact(c):
        return c
    return round(c * _FLOAT_KEY_SCALE)


def _ceil_scalar(x) -> int:
    if is_exact(x):
        return -exact_floor(-x)
    return math.ceil(x)


def _floor_scalar(x) -> int:
    if is_exact(x):
        return exact_floor(x)
    return math.floor(x)


@dataclass(frozen=True)
class LineFamily:
    """Levels of lines; levels[i] holds the lines first appearing at level i."""

    base_points: tuple[Vec2, ...]
    generators: tuple[Vec2, ...]
    window: object
    levels: tuple[tuple[Line, ...], ...]

    def __len__(self):
        return sum(len(lv) for lv in self.levels)

    def all_lines(self) -> tuple[Line, ...]:
        return tuple(ell for lv in self.levels for ell in lv)

    def lines_with_normal(self, a: Vec2) -> tuple[Line, ...]:
        if a not in self.generators:
            raise GridError(f"normal {a} is not one of the family generators")
        return tuple(ell for ell in self.all_lines() if ell.normal == a)


def _dedup_direction_classes(generators) -> tuple[Vec2, ...]:
    reps: list[Vec2] = []
    for g in generators:
        if g.x == 0 and g.y == 0:
            raise GridError("zero vector cannot be a generator")
        if not any(g.cross(r) == 0 for r in reps):
            reps.append(g)
    return tuple(reps)


def generate_grid(base_points, generators, depth: int, window) -> LineFamily:
    """Grow the intersection-closed line family to the given depth.

    Every line is windowed: its offset must lie within `window` of the
    offset of some base point along the same normal. Integer parallels of
    each discovered line are added as far as the window allows, at every
    level.
    """
    base = tuple(base_points)
    if not base:
        raise GridError("need at least one base point")
    gens = _dedup_direction_classes(generators)
    if len(gens) < 2:
        raise GridError("generators span fewer than two direction classes")
    if depth < 0:
        raise GridError("depth must be nonnegative")
    if not window > 0:
        raise GridError("window must be positive")

    nclasses = len(gens)
    base_proj = [tuple(g.dot(b) for b in base) for g in gens]

    def windowed_parallels(k: int, c):
        # all integer shifts of c within `window` of some base projection
        out = {}
        for pb in base_proj[k]:
            lo = _ceil_scalar(pb - window - c)
            hi = _floor_scalar(pb + window - c)
            for z in range(lo, hi + 1):
                val = c + z
                out.setdefault(_offset_key(val), val)
        return out

    # combination coefficients: gens[k3] = alpha * gens[k1] + beta * gens[k2]
    combo = {}
    for k1 in range(nclasses):
        for k2 in range(nclasses):
            if gens[k1].cross(gens[k2]) == 0:
                continue
            den = gens[k1].cross(gens[k2])
            for k3 in range(nclasses):
                if k3 == k1 or k3 == k2:
                    continue
                alpha = exact_div(gens[k3].cross(gens[k2]), den)
                beta = exact_div(gens[k1].cross(gens[k3]), den)
                combo[(k1, k2, k3)] = (alpha, beta)

    seen: list[dict] = [{} for _ in range(nclasses)]
    levels: list[tuple[tuple[int, object], ...]] = []

    def commit(new_by_class) -> tuple:
        fresh = []
        for k in range(nclasses):
            for key, val in new_by_class[k].items():
                if key not in seen[k]:
                    seen[k][key] = val
                    fresh.append((k, val))
        fresh.sort(key=lambda kv: (kv[0], float(kv[1])))
        return tuple(fresh)

    level0 = [{} for _ in range(nclasses)]
    for k in range(nclasses):
        for pb in base_proj[k]:
            level0[k].update(windowed_parallels(k, pb))
    frontier = commit(level0)
    levels.append(frontier)

    for _ in range(depth):
        if not frontier:
            levels.append(())
            continue
        older = [kc for lv in levels[:-1] for kc in lv]
        hits: list[dict] = [{} for _ in range(nclasses)]
        for i, (k1, c1) in enumerate(frontier):
            for k2, c2 in older + list(frontier[i + 1 :]):
                if k1 == k2:
                    continue
                for k3 in range(nclasses):
                    if k3 == k1 or k3 == k2:
                        continue
                    alpha, beta = combo[(k1, k2, k3)]
                    # unit coefficients are the common case; skip the multiply
                    t1 = c1 if alpha == 1 else (-c1 if alpha == -1 else alpha * c1)
                    t2 = c2 if beta == 1 else (-c2 if beta == -1 else beta * c2)
                    c3 = t1 + t2
                    hits[k3].setdefault(_offset_key(c3), c3)
        new_by_class = [{} for _ in range(nclasses)]
        for k3 in range(nclasses):
            for c3 in hits[k3].values():
                new_by_class[k3].update(windowed_parallels(k3, c3))
        frontier = commit(new_by_class)
        levels.append(frontier)

    line_levels = tuple(
        tuple(Line(gens[k], c) for k, c in lv) for lv in levels
    )
    return LineFamily(base, gens, window, line_levels)


def grid_offsets(family: LineFamily, a: Vec2) -> list:
    """Offsets of all family lines with normal a, reduced mod 1, sorted."""
    lines = family.lines_with_normal(a)
    out = {}
    for ell in lines:
        frac = fractional_part(ell.offset)
        out.setdefault(_offset_key(frac), frac)
    return sorted(out.values(), key=float)


def offset_gaps(offsets) -> list:
    """Circular mod-1 gaps between consecutive offsets, same order."""
    if not offsets:
        raise GridError("no offsets to measure")
    vals = sorted(float(c) for c in offsets)
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    gaps.append(vals[0] + 1.0 - vals[-1])
    return gaps
