"""Plane geometry over norm-derived metrics.

A metric here always comes from a unit shape: a convex, point-symmetric body
P with the origin in its interior, and d(x, y) = ||x - y||_P.  Two shape kinds
are supported: polygons given by generator normals (the norm is a max of
absolute dot products) and smooth L^p curves for finite p > 1 (closed-form
norm plus a tangent-normal approximation scheme).

Scalars are either all-exact (int/Fraction/SqrtExt) or floats; every operation
here is generic over that choice except where noted (L^p norms evaluate in
float).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from .exact import (
    BoundaryAmbiguityError,
    exact_div,
    format_scalar,
    guarded_floor,
    is_exact,
    parse_scalar,
)

__all__ = [
    "Vec2",
    "Line",
    "PolygonShape",
    "LpShape",
    "MetricConfig",
    "BoundaryAmbiguityError",
    "norm",
    "distance",
    "truncated_distance",
    "smooth_generators",
    "face_of",
    "is_triangular_set",
    "support",
    "parallel_line_distance",
    "integer_parallel",
    "shape_to_json",
    "shape_from_json",
    "square_linf",
    "diamond_l1",
    "rational_hexagon",
    "regular_hexagon",
    "box_shape",
]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Vec2:
    """Immutable plane vector; coordinates exact scalars or floats."""

    x: object
    y: object

    def __post_init__(self):
        for c in (self.x, self.y):
            if isinstance(c, float) and not math.isfinite(c):
                raise GeometryError(f"non-finite coordinate {c!r}")
            if isinstance(c, bool) or not (isinstance(c, float) or is_exact(c)):
                raise GeometryError(f"unsupported coordinate type {type(c).__name__}")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __mul__(self, s) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec2"):
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2"):
        return self.x * other.y - self.y * other.x

    def is_exact(self) -> bool:
        return is_exact(self.x) and is_exact(self.y)

    def to_floats(self) -> tuple[float, float]:
        return (float(self.x), float(self.y))


def _is_zero(v: Vec2) -> bool:
    return v.x == 0 and v.y == 0


def _parallel(a: Vec2, b: Vec2) -> bool:
    # representation-level predicate: exact zero cross product
    return a.cross(b) == 0


@dataclass(frozen=True)
class Line:
    """Oriented line a.x = r given by normal a and offset r."""

    normal: Vec2
    offset: object

    def __post_init__(self):
        if _is_zero(self.normal):
            raise GeometryError("line normal must be nonzero")

    def is_parallel(self, other: "Line") -> bool:
        return _parallel(self.normal, other.normal)

    def side_of(self, v: Vec2) -> int:
        """-1 / 0 / +1 for a.v < r / = r / > r."""
        s = self.normal.dot(v) - self.offset
        return (s > 0) - (s < 0)


# ---------------------------------------------------------------------------
# shapes


def _angle_cmp(u: Vec2, v: Vec2) -> int:
    """Counterclockwise order from angle 0, exact (no trig)."""

    def half(w: Vec2) -> int:
        # 0 for the upper half-plane including +x axis, 1 for the rest
        if w.y > 0 or (w.y == 0 and w.x > 0):
            return 0
        return 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = u.cross(v)
    return 0 if c == 0 else (-1 if c > 0 else 1)


class PolygonShape:
    """Unit shape cut out by |a.x| <= 1 over a finite generator set.

    Generators are stored one per direction class; both signs are applied at
    evaluation time through the absolute value.  Each generator is scaled so
    its face line a.x = 1 supports the shape, hence the norm is
    ||x|| = max_a |a.x|.
    """

    kind = "polygonal"

    def __init__(self, generators: Iterable[Vec2]):
        gens = tuple(generators)
        if len(gens) < 2:
            raise GeometryError("need at least 2 generators to bound the plane")
        for g in gens:
            if not isinstance(g, Vec2):
                raise GeometryError("generators must be Vec2")
            if _is_zero(g):
                raise GeometryError("zero generator")
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if _parallel(gens[i], gens[j]):
                    raise GeometryError(
                        f"generators {i} and {j} are parallel; store one per direction"
                    )
        self.generators = gens
        self._vertices: tuple[Vec2, ...] | None = None

    def __repr__(self):
        return f"PolygonShape({list(self.generators)!r})"

    def is_box(self) -> bool:
        """Exactly two direction classes: the shape is a parallelogram."""
        return len(self.generators) == 2

    def norm(self, v: Vec2):
        best = None
        for a in self.generators:
            val = abs(a.dot(v))
            if best is None or val > best:
                best = val
        return best

    def signed_generators(self) -> tuple[Vec2, ...]:
        out = []
        for g in self.generators:
            out.append(g)
            out.append(-g)
        return tuple(sorted(out, key=cmp_to_key(_angle_cmp)))

    def vertices(self) -> tuple[Vec2, ...]:
        """Polygon vertices in counterclockwise order (computed once).

        Valid only for properly scaled generator sets (every face line
        a.x = 1 touches the shape); redundant constraints are rejected.
        """
        if self._vertices is None:
            signed = self.signed_generators()
            k = len(signed)
            verts = []
            for i in range(k):
                a, b = signed[i], signed[(i + 1) % k]
                den = a.cross(b)
                # adjacent constraint lines a.x = 1, b.x = 1
                x = exact_div(b.y - a.y, den)
                y = exact_div(a.x - b.x, den)
                verts.append(Vec2(x, y))
            exact = all(v.is_exact() for v in verts)
            slack = 0 if exact else 1e-9
            for v in verts:
                for a in signed:
                    if a.dot(v) > 1 + slack:
                        raise GeometryError(
                            "generator set is not scaled to the shape: vertex "
                            f"{v} violates |{a}.x| <= 1"
                        )
            self._vertices = tuple(verts)
        return self._vertices

    def support(self, direction: Vec2):
        """sup over the unit shape of direction.x (the support function)."""
        return max(direction.dot(v) for v in self.vertices())


class LpShape:
    """Smooth L^p unit circle, finite p > 1.  Norms evaluate in float."""

    kind = "lp"

    def __init__(self, p: float, generator_budget: int = 64):
        p = float(p)
        if not (p > 1) or math.isinf(p):
            raise GeometryError(f"p must be finite and > 1, got {p}")
        if generator_budget < 3:
            raise GeometryError("generator budget must be >= 3")
        self.p = p
        self.generator_budget = int(generator_budget)

    def __repr__(self):
        return f"LpShape(p={self.p}, generator_budget={self.generator_budget})"

    def is_box(self) -> bool:
        return False

    def norm(self, v: Vec2) -> float:
        x, y = abs(float(v.x)), abs(float(v.y))
        if x == 0.0 and y == 0.0:
            return 0.0
        # factor out the max to keep powers in range
        m = x if x >= y else y
        return m * ((x / m) ** self.p + (y / m) ** self.p) ** (1.0 / self.p)

    def generators(self, count: int | None = None) -> tuple[Vec2, ...]:
        return smooth_generators(self.p, count or self.generator_budget)

    def approx_norm(self, v: Vec2, count: int | None = None) -> float:
        """Lower approximation max |a.v| over the generator set."""
        return max(abs(a.dot(Vec2(*v.to_floats()))) for a in self.generators(count))

    def support(self, direction: Vec2) -> float:
        # support function of the L^p ball is the dual norm, 1/p + 1/q = 1
        q = self.p / (self.p - 1.0)
        x, y = abs(float(direction.x)), abs(float(direction.y))
        if x == 0.0 and y == 0.0:
            return 0.0
        m = x if x >= y else y
        return m * ((x / m) ** q + (y / m) ** q) ** (1.0 / q)


NormShape = PolygonShape | LpShape


@dataclass(frozen=True)
class MetricConfig:
    """A metric: unit shape plus adjacency threshold delta (default 1)."""

    shape: NormShape
    delta: object = 1

    def __post_init__(self):
        if not (self.delta > 0):
            raise GeometryError("delta must be positive")


# ---------------------------------------------------------------------------
# metric operations


def norm(shape: NormShape, x: Vec2):
    return shape.norm(x)


def distance(shape: NormShape, x: Vec2, y: Vec2):
    return shape.norm(x - y)


def truncated_distance(shape: NormShape, x: Vec2, y: Vec2) -> int:
    """floor of d(x, y); refuses floats within 1e-9 of an integer."""
    d = distance(shape, x, y)
    return guarded_floor(d, what=f"distance of {x} and {y}")


def _vdc(k: int) -> float:
    """Base-2 van der Corput value in [0, 1)."""
    x, f = 0.0, 0.5
    while k:
        if k & 1:
            x += f
        f *= 0.5
        k >>= 1
    return x


def smooth_generators(p: float, count: int) -> tuple[Vec2, ...]:
    """Tangent normals of the L^p circle, one per direction class.

    Touch points are parametrized by the first `count` angles of the van der
    Corput sequence over [0, pi), so sets are nested as count grows and the
    approximation max |a.x| is monotone nondecreasing in count.  Each normal
    is scaled so a.b = 1 at its touch point b, hence max_a |a.x| <= ||x||_p
    with equality in the limit.
    """
    p = float(p)
    if not (p > 1) or math.isinf(p):
        raise GeometryError(f"p must be finite and > 1, got {p}")
    if count < 2:
        raise GeometryError("count must be >= 2")
    gens = []
    for k in range(count):
        th = math.pi * _vdc(k)
        c, s = math.cos(th), math.sin(th)
        # boundary point of |x|^p + |y|^p = 1 at parameter th
        bx = math.copysign(abs(c) ** (2.0 / p), c)
        by = math.copysign(abs(s) ** (2.0 / p), s)
        # normal scaled to a.b = 1: a = (sgn(bx)|bx|^(p-1), sgn(by)|by|^(p-1))
        ax = math.copysign(abs(bx) ** (p - 1.0), bx)
        ay = math.copysign(abs(by) ** (p - 1.0), by)
        gens.append(Vec2(ax, ay))
    return tuple(gens)


def face_of(shape: PolygonShape, a: Vec2) -> tuple[Vec2, Vec2]:
    """Endpoints of the boundary face supported by a.x = 1.

    `a` must be a stored generator or the negation of one (exact match).
    """
    if not isinstance(shape, PolygonShape):
        raise GeometryError("faces exist only for polygonal shapes")
    match = None
    for g in shape.generators:
        if g == a or -g == a:
            match = a
            break
    if match is None:
        raise GeometryError(f"{a} is not a stored generator or its negation")
    verts = shape.vertices()
    exactly = all(v.is_exact() for v in verts) and a.is_exact()
    on_face = []
    for v in verts:
        val = a.dot(v)
        if (val == 1) if exactly else (abs(val - 1.0) <= 1e-9):
            on_face.append(v)
    if len(on_face) != 2 or on_face[0] == on_face[1]:
        raise GeometryError(f"face of {a} is degenerate: {on_face}")
    return (on_face[0], on_face[1])


def is_triangular_set(shape: NormShape, x: Vec2, y: Vec2, z: Vec2) -> bool:
    """True iff the three sorted pairwise distances satisfy a strict triangle
    inequality: d_small + d_mid > d_large.  Points must be distinct."""
    if x == y or y == z or x == z:
        raise GeometryError("triangular set needs three distinct points")
    d = sorted([distance(shape, x, y), distance(shape, y, z), distance(shape, x, z)])
    return d[0] + d[1] > d[2]


def support(shape: NormShape, direction: Vec2):
    return shape.support(direction)


def parallel_line_distance(shape: NormShape, l1: Line, l2: Line):
    """Metric distance between parallel lines.

    Normalizing the shared normal a so sup_{unit shape} a.x = 1 makes the
    distance |r1 - r2|; for stored generators that scale is already 1.
    """
    if not l1.is_parallel(l2):
        raise GeometryError("lines are not parallel")
    a = l1.normal
    # express l2 in l1's normal: l2.normal = lam * a
    if a.x != 0:
        lam = exact_div(l2.normal.x, a.x)
    else:
        lam = exact_div(l2.normal.y, a.y)
    gap = abs(l1.offset - exact_div(l2.offset, lam))
    return exact_div(gap, shape.support(a))


def integer_parallel(shape: NormShape, line: Line, z: int) -> Line:
    """The parallel of `line` at metric distance |z| on the +normal side."""
    return Line(line.normal, line.offset + z * shape.support(line.normal))


# ---------------------------------------------------------------------------
# named shapes


def square_linf() -> PolygonShape:
    """Unit square of the sup metric."""
    return PolygonShape([Vec2(1, 0), Vec2(0, 1)])


def diamond_l1() -> PolygonShape:
    """Unit diamond of the taxicab metric."""
    return PolygonShape([Vec2(1, 1), Vec2(1, -1)])


def box_shape(a1: Vec2, a2: Vec2) -> PolygonShape:
    """Parallelogram shape from two non-parallel generators."""
    return PolygonShape([a1, a2])


def rational_hexagon() -> PolygonShape:
    """Point-symmetric hexagon with rational generators (exact-mode friendly)."""
    return PolygonShape([Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)])


def regular_hexagon() -> PolygonShape:
    """Regular hexagon with unit-distance faces (float coordinates)."""
    gens = []
    for k in range(3):
        th = k * math.pi / 3.0
        gens.append(Vec2(math.cos(th), math.sin(th)))
    return PolygonShape(gens)


# ---------------------------------------------------------------------------
# serialization


def shape_to_json(shape: NormShape) -> str:
    if isinstance(shape, PolygonShape):
        gens = [[format_scalar(g.x), format_scalar(g.y)] for g in shape.generators]
        return json.dumps({"kind": "polygonal", "generators": gens})
    if isinstance(shape, LpShape):
        return json.dumps(
            {"kind": "lp", "p": shape.p, "generator_budget": shape.generator_budget}
        )
    raise GeometryError(f"cannot serialize {shape!r}")


def shape_from_json(text: str) -> NormShape:
    obj = json.loads(text)
    kind = obj.get("kind")
    if kind == "polygonal":
        gens = [Vec2(parse_scalar(gx), parse_scalar(gy)) for gx, gy in obj["generators"]]
        return PolygonShape(gens)
    if kind == "lp":
        return LpShape(obj["p"], obj.get("generator_budget", 64))
    raise GeometryError(f"unknown shape kind {kind!r}")
