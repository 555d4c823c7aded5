"""Step-isometries: construction, verification, and counterexamples.

A step-isometry preserves the floor of every pairwise distance.  The classic
way to build one that is not an isometry: pick a strictly increasing map g of
fractional parts fixing 0 and send x to floor(x) + g(frac(x)).  Applied to
both dual coordinates of a box (parallelogram) metric this stays a
step-isometry; under any other shape it breaks, and the verifier here finds
the breaking pair.

Verification runs in one of three lanes: an integer fast path (all-rational
polygon data, floors are exact floordivs over a common denominator), a
generic exact loop, and a vectorized float lane that refuses to guess when a
distance sits within 1e-9 of an integer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import (
    BoundaryAmbiguityError,
    FLOAT_INTEGER_GUARD,
    exact_div,
    format_scalar,
    is_exact,
    parse_scalar,
)
from .geometry import (
    Line,
    LpShape,
    NormShape,
    PolygonShape,
    Vec2,
    distance,
    truncated_distance,
)
from .larg import GeoGraph
from .pointsets import PointSet, pointset_from_json, pointset_to_json

__all__ = [
    "StepIsoError",
    "Interleaving1D",
    "canonical_interleaving",
    "explicit_step_isometry_1d",
    "apply_fractional_map",
    "box_product_map",
    "PointMap",
    "identity_point_map",
    "explicit_1d_point_map",
    "box_product_point_map",
    "pointmap_to_json",
    "pointmap_from_json",
    "Verdict",
    "is_step_isometry",
    "is_isometry",
    "respects_line",
    "StatCheckReport",
    "stepiso_statistical_check",
]


class StepIsoError(ValueError):
    pass


# ---------------------------------------------------------------------------
# fractional-part maps


@dataclass(frozen=True)
class Interleaving1D:
    """Piecewise-linear strictly increasing map of [0, 1) fixing 0.

    `knots` are (t, g(t)) pairs starting at (0, 0); the map interpolates
    linearly between knots and from the last knot to the implicit endpoint
    (1, 1).  Strict monotonicity in both coordinates keeps the fractional
    order of any two inputs, which is exactly what step-isometries need.
    """

    knots: tuple[tuple[object, object], ...]

    def __post_init__(self):
        ks = tuple((t, u) for t, u in self.knots)
        object.__setattr__(self, "knots", ks)
        if not ks or ks[0] != (0, 0):
            raise StepIsoError("first knot must be (0, 0)")
        prev_t, prev_u = None, None
        for t, u in ks:
            if not (0 <= t < 1 and 0 <= u < 1):
                raise StepIsoError(f"knot ({t}, {u}) outside [0, 1)")
            if prev_t is not None and not (t > prev_t and u > prev_u):
                raise StepIsoError("knots must strictly increase in both coordinates")
            prev_t, prev_u = t, u

    @classmethod
    def identity(cls) -> "Interleaving1D":
        return cls(((0, 0),))

    @classmethod
    def two_piece(cls, t, u) -> "Interleaving1D":
        """Map [0, t] linearly onto [0, u] and [t, 1) onto [u, 1)."""
        return cls(((0, 0), (t, u)))

    def is_identity(self) -> bool:
        return all(t == u for t, u in self.knots)

    def __call__(self, s):
        if not (0 <= s < 1):
            raise StepIsoError(f"fractional part {s!r} outside [0, 1)")
        # walk to the segment containing s; knot lists are short
        i = 0
        while i + 1 < len(self.knots) and self.knots[i + 1][0] <= s:
            i += 1
        t0, u0 = self.knots[i]
        t1, u1 = self.knots[i + 1] if i + 1 < len(self.knots) else (1, 1)
        return u0 + (s - t0) * exact_div(u1 - u0, t1 - t0)


def canonical_interleaving() -> Interleaving1D:
    """The two-piece map sending [0, 1/2] onto [0, 1/3]: the standard
    fractional interleaving whose lift is a step-isometry but not an
    isometry."""
    return Interleaving1D.two_piece(Fraction(1, 2), Fraction(1, 3))


def explicit_step_isometry_1d(x):
    """floor(x) + (2/3) frac(x) on the lower half cell, else
    floor(x) + (4/3) frac(x) - 1/3.  Exact input gives exact output."""
    fl = math.floor(x)
    fr = x - fl
    if fr <= Fraction(1, 2):
        return fl + Fraction(2, 3) * fr
    return fl + Fraction(4, 3) * fr - Fraction(1, 3)


def apply_fractional_map(g: Interleaving1D, x):
    """floor(x) + g(frac(x)): keeps the integer part, remaps the rest."""
    fl = math.floor(x)
    return fl + g(x - fl)


def box_product_map(shape: NormShape, g1: Interleaving1D, g2: Interleaving1D, v: Vec2) -> Vec2:
    """Apply g1, g2 to the two dual coordinates of a box shape.

    With generators a1, a2 the dual coordinates are u_i = a_i.v; the image w
    is the unique point with a_i.w = floor(u_i) + g_i(frac(u_i)).
    """
    if not (isinstance(shape, PolygonShape) and shape.is_box()):
        raise StepIsoError("box product maps need a box (two-generator) shape")
    a1, a2 = shape.generators
    w1 = apply_fractional_map(g1, a1.dot(v))
    w2 = apply_fractional_map(g2, a2.dot(v))
    den = a1.cross(a2)
    return Vec2(
        exact_div(w1 * a2.y - w2 * a1.y, den),
        exact_div(a1.x * w2 - a2.x * w1, den),
    )


# ---------------------------------------------------------------------------
# point maps


@dataclass(frozen=True)
class PointMap:
    """A finite map: domain points (by index) to image points.

    kind is a provenance tag ("arbitrary", "box-product", "explicit-1d");
    components carries the fractional maps for constructed kinds.
    """

    domain: PointSet
    images: tuple[Vec2, ...]
    kind: str = "arbitrary"
    components: tuple[Interleaving1D, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.domain):
            raise StepIsoError(
                f"{len(self.images)} images for {len(self.domain)} domain points"
            )
        seen = set()
        for w in self.images:
            if not isinstance(w, Vec2):
                raise StepIsoError("images must be Vec2")
            key = (w.x, w.y)
            if key in seen:
                raise StepIsoError(f"map is not injective: image {w} repeats")
            seen.add(key)

    def __len__(self):
        return len(self.images)

    @classmethod
    def from_function(
        cls, domain: PointSet, fn: Callable[[Vec2], Vec2], kind: str = "arbitrary",
        components: tuple = (),
    ) -> "PointMap":
        return cls(domain, tuple(fn(p) for p in domain.points), kind, components)


def identity_point_map(domain: PointSet) -> PointMap:
    return PointMap(domain, domain.points, "arbitrary")


def explicit_1d_point_map(domain: PointSet) -> PointMap:
    """The canonical 1D counterexample applied to x, leaving y alone.

    Meant for sets on a horizontal line, where the metric restricts to |dx|.
    """
    g = canonical_interleaving()
    return PointMap.from_function(
        domain,
        lambda p: Vec2(explicit_step_isometry_1d(p.x), p.y),
        "explicit-1d",
        (g,),
    )


def box_product_point_map(
    domain: PointSet, shape: NormShape, g1: Interleaving1D, g2: Interleaving1D
) -> PointMap:
    return PointMap.from_function(
        domain, lambda p: box_product_map(shape, g1, g2, p), "box-product", (g1, g2)
    )


def pointmap_to_json(pmap: PointMap) -> str:
    obj = {
        "kind": pmap.kind,
        "domain": json.loads(pointset_to_json(pmap.domain)),
        "images": [[format_scalar(w.x), format_scalar(w.y)] for w in pmap.images],
    }
    return json.dumps(obj)


def pointmap_from_json(text: str) -> PointMap:
    """Reload a stored map; fractional-map components are not persisted."""
    obj = json.loads(text)
    domain = pointset_from_json(json.dumps(obj["domain"]))
    images = tuple(Vec2(parse_scalar(x), parse_scalar(y)) for x, y in obj["images"])
    return PointMap(domain, images, obj.get("kind", "arbitrary"))


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Verdict:
    """Outcome of a pairwise check; witness is the first failing pair in
    lexicographic index order, with the two compared values."""

    ok: bool
    witness: tuple[int, int] | None = None
    left: object = None
    right: object = None
    checked: int = 0


def _all_rational(vectors: Sequence[Vec2]) -> bool:
    return all(
        isinstance(v.x, (int, Fraction)) and isinstance(v.y, (int, Fraction))
        for v in vectors
    )


def _int_projection_table(points: Sequence[Vec2], gens: Sequence[Vec2]):
    """Per generator: (integer projections, common denominator).

    floor(|p_i - p_j| projected) is then abs(n_i - n_j) // den, an exact
    integer operation."""
    table = []
    for a in gens:
        vals = [a.dot(p) for p in points]
        den = 1
        for v in vals:
            if isinstance(v, Fraction):
                den = math.lcm(den, v.denominator)
        table.append(([int(v * den) for v in vals], den))
    return table


def _float_pair_scan(dom_rows, img_rows, n) -> Verdict:
    """Row-vectorized floor comparison over pairs i < j.

    dom_rows(i) / img_rows(i) return distance vectors from i to i+1..n-1.
    Distances within the float guard of an integer abort the scan.
    """
    checked = 0
    for i in range(n - 1):
        dd = dom_rows(i)
        di = img_rows(i)
        checked += dd.size
        for vals in (dd, di):
            off = np.abs(vals - np.rint(vals))
            bad = np.nonzero(off < FLOAT_INTEGER_GUARD)[0]
            if bad.size:
                j = i + 1 + int(bad[0])
                raise BoundaryAmbiguityError(
                    f"distance of pair ({i}, {j}) is {vals[bad[0]]!r}, within "
                    f"{FLOAT_INTEGER_GUARD} of an integer; use rational mode"
                )
        left, right = np.floor(dd), np.floor(di)
        mism = np.nonzero(left != right)[0]
        if mism.size:
            k = int(mism[0])
            return Verdict(False, (i, i + 1 + k), int(left[k]), int(right[k]), checked)
    return Verdict(True, checked=checked)


def _polygon_row_fn(points: Sequence[Vec2], shape: PolygonShape):
    arr = np.array([p.to_floats() for p in points], dtype=float)
    gens = np.array([g.to_floats() for g in shape.generators], dtype=float)
    proj = arr @ gens.T  # n x k

    def rows(i):
        return np.abs(proj[i] - proj[i + 1 :]).max(axis=1)

    return rows


def _lp_row_fn(points: Sequence[Vec2], shape: LpShape):
    arr = np.array([p.to_floats() for p in points], dtype=float)
    p = shape.p

    def rows(i):
        d = np.abs(arr[i] - arr[i + 1 :])
        return (d[:, 0] ** p + d[:, 1] ** p) ** (1.0 / p)

    return rows


def is_step_isometry(pmap: PointMap, shape: NormShape) -> Verdict:
    """Do all pairs keep their truncated distance under the map?

    Exact data is decided exactly; float data raises BoundaryAmbiguityError
    (naming the pair) whenever a distance is too close to an integer to
    truncate safely.  The witness returned carries both floors.
    """
    pts = pmap.domain.points
    ims = pmap.images
    n = len(pts)
    if n < 2:
        return Verdict(True, checked=0)
    exact = all(p.is_exact() for p in pts) and all(w.is_exact() for w in ims)

    if (
        exact
        and isinstance(shape, PolygonShape)
        and _all_rational(shape.generators)
        and _all_rational(pts)
        and _all_rational(ims)
    ):
        dom = _int_projection_table(pts, shape.generators)
        img = _int_projection_table(ims, shape.generators)
        checked = 0
        for i in range(n):
            for j in range(i + 1, n):
                td_d = 0
                for ints, den in dom:
                    v = ints[i] - ints[j]
                    if v < 0:
                        v = -v
                    q = v // den
                    if q > td_d:
                        td_d = q
                td_i = 0
                for ints, den in img:
                    v = ints[i] - ints[j]
                    if v < 0:
                        v = -v
                    q = v // den
                    if q > td_i:
                        td_i = q
                checked += 1
                if td_d != td_i:
                    return Verdict(False, (i, j), td_d, td_i, checked)
        return Verdict(True, checked=checked)

    if exact and isinstance(shape, PolygonShape):
        checked = 0
        for i in range(n):
            for j in range(i + 1, n):
                td_d = truncated_distance(shape, pts[i], pts[j])
                td_i = truncated_distance(shape, ims[i], ims[j])
                checked += 1
                if td_d != td_i:
                    return Verdict(False, (i, j), td_d, td_i, checked)
        return Verdict(True, checked=checked)

    row_fn = _polygon_row_fn if isinstance(shape, PolygonShape) else _lp_row_fn
    return _float_pair_scan(row_fn(pts, shape), row_fn(ims, shape), n)


def is_isometry(pmap: PointMap, shape: NormShape, tol=None) -> Verdict:
    """Do all pairs keep their exact distance (within tol for floats)?

    Exact data defaults to tol 0.  The witness carries both distances.
    """
    pts = pmap.domain.points
    ims = pmap.images
    n = len(pts)
    if n < 2:
        return Verdict(True, checked=0)
    exact = all(p.is_exact() for p in pts) and all(w.is_exact() for w in ims)

    if exact and isinstance(shape, PolygonShape):
        if tol is None:
            tol = 0
        checked = 0
        for i in range(n):
            for j in range(i + 1, n):
                d = distance(shape, pts[i], pts[j])
                e = distance(shape, ims[i], ims[j])
                checked += 1
                if abs(d - e) > tol:
                    return Verdict(False, (i, j), d, e, checked)
        return Verdict(True, checked=checked)

    if tol is None:
        tol = FLOAT_INTEGER_GUARD
    row_fn = _polygon_row_fn if isinstance(shape, PolygonShape) else _lp_row_fn
    dom_rows = row_fn(pts, shape)
    img_rows = row_fn(ims, shape)
    checked = 0
    for i in range(n - 1):
        dd = dom_rows(i)
        di = img_rows(i)
        checked += dd.size
        mism = np.nonzero(np.abs(dd - di) > tol)[0]
        if mism.size:
            k = int(mism[0])
            return Verdict(False, (i, i + 1 + k), float(dd[k]), float(di[k]), checked)
    return Verdict(True, checked=checked)


def respects_line(pmap: PointMap, ell: Line, ell_image: Line) -> bool:
    """Does the map send ell's open half-planes into ell_image's?

    True iff for every domain point v: a.v < r implies a'.f(v) < r' and
    a.v > r implies a'.f(v) > r'.  A domain point on ell has no side, which
    is an error; an image landing on ell_image violates both implications.
    Rescaling (a, r) to (lam*a, lam*r) with lam > 0 changes nothing.
    """
    for v, w in zip(pmap.domain.points, pmap.images):
        s = ell.side_of(v)
        if s == 0:
            raise StepIsoError(f"domain point {v} lies on the line; side undefined")
        if ell_image.side_of(w) != s:
            return False
    return True


# ---------------------------------------------------------------------------
# statistical check against graph pairs


@dataclass(frozen=True)
class StatCheckReport:
    """Truncation violations of a verified graph isomorphism.

    crossings counts pairs where exactly one of the two distances is below
    delta: each such pair is only consistent with independent samples if the
    short side drew a non-edge, so the chance honest samples admit this
    candidate is at most survival_bound = (1-p)^crossings.
    """

    n: int
    pairs: int
    violations: tuple[tuple[int, int], ...]
    crossings: int
    survival_bound: float

    @property
    def is_step_isometry(self) -> bool:
        return not self.violations


def stepiso_statistical_check(
    G: GeoGraph, H: GeoGraph, candidate: PointMap, shape: NormShape
) -> StatCheckReport:
    """Check a candidate graph isomorphism for truncated-distance violations.

    The candidate must map the shared point set of G and H onto itself and
    must be a graph isomorphism (checked first; error if not).  Violations
    of floor(d/delta) preservation are then collected exhaustively.
    """
    ps = candidate.domain
    if G.point_set_ref != ps.fingerprint() or H.point_set_ref != ps.fingerprint():
        raise StepIsoError("graphs and candidate must share one point set")
    if G.delta != H.delta or G.n != H.n or G.n != len(ps):
        raise StepIsoError("graphs disagree on size or delta")
    index = {(p.x, p.y): i for i, p in enumerate(ps.points)}
    perm = []
    for w in candidate.images:
        i = index.get((w.x, w.y))
        if i is None:
            raise StepIsoError(f"image {w} is not a point of the shared set")
        perm.append(i)
    adj_g = G.adjacency_matrix()
    perm_arr = np.array(perm)
    adj_h = H.adjacency_matrix()[np.ix_(perm_arr, perm_arr)]
    if not np.array_equal(adj_g, adj_h):
        bad = np.nonzero(adj_g != adj_h)
        i, j = int(bad[0][0]), int(bad[1][0])
        raise StepIsoError(
            f"candidate is not a graph isomorphism: pair ({i}, {j}) maps to "
            f"({perm[i]}, {perm[j]}) with mismatched adjacency"
        )

    delta = G.delta
    n = len(ps)
    violations = []
    crossings = 0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(shape, ps[i], ps[j])
            e = distance(shape, ps[perm[i]], ps[perm[j]])
            pairs += 1
            if (d < delta) != (e < delta):
                crossings += 1
            fd = _delta_floor(d, delta, (i, j))
            fe = _delta_floor(e, delta, (perm[i], perm[j]))
            if fd != fe:
                violations.append((i, j))
    bound = float((1.0 - G.p) ** crossings)
    return StatCheckReport(n, pairs, tuple(violations), crossings, bound)


def _delta_floor(d, delta, pair):
    scaled = exact_div(d, delta) if is_exact(d) and is_exact(delta) else d / delta
    if isinstance(scaled, float):
        if abs(scaled - round(scaled)) < FLOAT_INTEGER_GUARD:
            raise BoundaryAmbiguityError(
                f"distance of pair {pair} over delta is {scaled!r}, too close to "
                "an integer to truncate; use rational mode"
            )
        return math.floor(scaled)
    return math.floor(scaled)
