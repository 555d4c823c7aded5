"""Triangular anchors, determination certificates, good enumerations.

A triangular set pins an isometry down: once its three images are known,
any further point is recovered from its distances to three reference
points, provided each distance is achieved on its own face of the unit
ball and the three face normals are pairwise non-parallel. This module
derives such certificates, reconstructs points from anchor data, and
builds enumerations of finite samples in which every point past the
anchor carries a certificate.

Box shapes are excluded throughout: with only two face directions no
triple of pairwise non-parallel normals exists.
"""

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .exact import FLOAT_INTEGER_GUARD, exact_div, is_exact
from .geometry import (
    LpShape,
    NormShape,
    PolygonShape,
    Vec2,
    distance,
    is_triangular_set,
)
from .pointsets import PointSet

__all__ = [
    "AnchoringError",
    "Certificate",
    "GoodEnumeration",
    "determining_generator",
    "good_enumeration",
    "reconstruct_from_anchor",
    "validate_good_enumeration",
]

_REL_TOL = 1e-9


class AnchoringError(ValueError):
    pass


def _require_non_box(shape: NormShape):
    if isinstance(shape, PolygonShape) and shape.is_box():
        raise AnchoringError("box shapes have only two face directions; anchoring needs three")


def determining_generator(shape: NormShape, v: Vec2) -> Vec2:
    """The unique signed generator g with g.v = norm(v).

    Ties (v pointing at a vertex of the dual decomposition) are refused:
    such a vector does not determine a face.
    """
    if v.x == 0 and v.y == 0:
        raise AnchoringError("zero vector has no determining generator")
    if isinstance(shape, PolygonShape):
        vals = [a.dot(v) for a in shape.generators]
        best = max(abs(c) for c in vals)
        if is_exact(best):
            hits = [i for i, c in enumerate(vals) if abs(c) == best]
        else:
            hits = [i for i, c in enumerate(vals) if abs(abs(c) - best) <= _REL_TOL * best]
        if len(hits) > 1:
            raise AnchoringError(
                f"distance from {v} achieved on {len(hits)} faces; no unique determining generator"
            )
        a = shape.generators[hits[0]]
        return a if vals[hits[0]] > 0 else -a
    # smooth shape: gradient of the norm at v, unique for v != 0
    vx, vy = float(v.x), float(v.y)
    n = shape.norm(Vec2(vx, vy))
    p = shape.p
    gx = math.copysign(abs(vx) ** (p - 1), vx) / n ** (p - 1)
    gy = math.copysign(abs(vy) ** (p - 1), vy) / n ** (p - 1)
    return Vec2(gx, gy)


def _solve_two_lines(g1: Vec2, c1, g2: Vec2, c2) -> Vec2:
    den = g1.cross(g2)
    if den == 0:
        raise AnchoringError("certificate generators are parallel; point not determined")
    x = exact_div(c1 * g2.y - c2 * g1.y, den)
    y = exact_div(g1.x * c2 - g2.x * c1, den)
    return Vec2(x, y)


def reconstruct_from_anchor(shape: NormShape, anchor_points, anchor_images, x: Vec2, dists) -> Vec2:
    """Recover the image of x from the anchor images and three distances.

    Each distance dists[i] = d(x, anchor_points[i]) must be achieved on a
    single face whose normal is read off the domain side; the face normals
    must be pairwise non-parallel. The image solves the first two face
    constraints; the third acts as a consistency check, and all three
    distances are re-verified against the result.
    """
    m = tuple(anchor_points)
    w = tuple(anchor_images)
    s = tuple(dists)
    if len(m) != 3 or len(w) != 3 or len(s) != 3:
        raise AnchoringError("anchor needs exactly three points, images, and distances")
    _require_non_box(shape)
    if not is_triangular_set(shape, *m):
        raise AnchoringError("anchor points do not form a triangular set")
    for i in range(3):
        if x == m[i]:
            return w[i]

    exact = all(v.is_exact() for v in m + w + (x,)) and all(is_exact(c) for c in s)
    tol = 0 if exact else _REL_TOL

    if isinstance(shape, LpShape):
        # smooth ball: the distance sphere touches its supporting line at
        # one point, in the direction read off the domain side
        cands = []
        for i in range(3):
            v = x - m[i]
            n = shape.norm(v)
            scale = float(s[i]) / n
            cands.append(Vec2(float(w[i].x) + scale * float(v.x), float(w[i].y) + scale * float(v.y)))
        for i in range(1, 3):
            gap = max(abs(cands[i].x - cands[0].x), abs(cands[i].y - cands[0].y))
            if gap > max(1.0, abs(cands[0].x), abs(cands[0].y)) * 1e-7:
                raise AnchoringError("smooth reconstruction constraints disagree")
        return cands[0]

    gens = tuple(determining_generator(shape, x - m[i]) for i in range(3))
    for i in range(3):
        for j in range(i + 1, 3):
            if gens[i].cross(gens[j]) == 0:
                raise AnchoringError("certificate generators are pairwise parallel; invalid")
    consts = tuple(gens[i].dot(w[i]) + s[i] for i in range(3))
    y = _solve_two_lines(gens[0], consts[0], gens[1], consts[1])
    res = gens[2].dot(y) - consts[2]
    if exact:
        if res != 0:
            raise AnchoringError(f"third face constraint violated by {res}")
    elif abs(res) > tol * max(1.0, abs(float(consts[2]))):
        raise AnchoringError(f"third face constraint violated by {res}")
    for i in range(3):
        d = distance(shape, y, w[i])
        if exact:
            if d != s[i]:
                raise AnchoringError(f"reconstructed point misses distance {i}: {d} != {s[i]}")
        elif abs(float(d) - float(s[i])) > tol * max(1.0, abs(float(s[i]))):
            raise AnchoringError(f"reconstructed point misses distance {i}")
    return y


# ---------------------------------------------------------------------------
# good enumerations


@dataclass(frozen=True)
class Certificate:
    """Positions (into the order) of three references and their face normals."""

    refs: tuple[int, int, int]
    generators: tuple[Vec2, Vec2, Vec2]

    def __post_init__(self):
        j, k, l = self.refs
        if not 0 <= j < k < l:
            raise AnchoringError("certificate positions must be strictly increasing")


@dataclass(frozen=True)
class GoodEnumeration:
    """An ordering with consecutive hops < 1 and per-point certificates.

    certificates[i] is None for the three anchor points and carries, for
    each later point, the references and signed generators that determine
    it. unplaced lists indices the walk could not reach or certify.
    """

    point_set: PointSet
    shape: NormShape
    order: tuple[int, ...]
    certificates: tuple
    unplaced: tuple[int, ...]

    def __post_init__(self):
        if len(self.order) != len(self.certificates):
            raise AnchoringError("one certificate slot per ordered point")

    def anchor(self) -> tuple[int, int, int]:
        return tuple(self.order[:3])


def _try_certificate(shape, pts, order, target_idx):
    """Three placed references with pairwise non-parallel face normals."""
    refs = []
    gens = []
    for pos, ref_idx in enumerate(order):
        try:
            g = determining_generator(shape, pts[target_idx] - pts[ref_idx])
        except AnchoringError:
            continue
        if any(g.cross(h) == 0 for h in gens):
            continue
        refs.append(pos)
        gens.append(g)
        if len(gens) == 3:
            return Certificate(tuple(refs), tuple(gens))
    return None


def good_enumeration(points: PointSet, shape: NormShape) -> GoodEnumeration:
    """Order a sample so consecutive points are close and all certified.

    Builds the in-range graph (pairs at distance < 1), picks a triangular
    anchor with pairwise distances < 1, then walks: each remaining point is
    reached by a hop path through still-unplaced points, and every point
    placed must admit a certificate against the points placed so far.
    Points that cannot be reached or certified are reported unplaced.
    """
    _require_non_box(shape)
    pts = points.points
    n = len(pts)
    if n < 3:
        raise AnchoringError("need at least three points")

    near = [[] for _ in range(n)]
    dist_to = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(shape, pts[i], pts[j])
            dist_to[i, j] = dist_to[j, i] = float(d)
            if d < 1:
                near[i].append(j)
                near[j].append(i)
    near_sets = [set(adj) for adj in near]

    # anchor centrally: growth radiates outward, so later points keep placed
    # references on several sides, which certificates need
    xs = sorted(float(p.x) for p in pts)
    ys = sorted(float(p.y) for p in pts)
    cx, cy = xs[n // 2], ys[n // 2]
    central = sorted(
        range(n), key=lambda i: max(abs(float(pts[i].x) - cx), abs(float(pts[i].y) - cy))
    )

    def anchor_candidates():
        used = set()
        for i in central:
            if i in used:
                continue
            for a in near[i]:
                for b in near[i]:
                    if b <= a or b not in near_sets[a]:
                        continue
                    if is_triangular_set(shape, pts[i], pts[a], pts[b]):
                        used.update((i, a, b))
                        yield (i, a, b)
                        break
                else:
                    continue
                break

    def run(anchor):
        order = list(anchor)
        certificates: list = [None, None, None]
        placed = set(anchor)

        def hop_path(start, goal):
            # shortest path start -> goal through unplaced points only
            if goal in near_sets[start]:
                return [goal]
            prev = {start: None}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in near[u]:
                    if v in placed or v in prev:
                        continue
                    prev[v] = u
                    if v == goal:
                        path = []
                        cur = v
                        while cur != start:
                            path.append(cur)
                            cur = prev[cur]
                        return path[::-1]
                    queue.append(v)
            return None

        def place(idx) -> bool:
            cert = _try_certificate(shape, pts, order, idx)
            if cert is None:
                return False
            order.append(idx)
            certificates.append(cert)
            placed.add(idx)
            return True

        # serve targets nearest the walk's current end so it clears each
        # region before moving on; a failed point stays pending and becomes
        # eligible again after any placement, since placements only ever add
        # reference directions
        pending = {i for i in range(n) if i not in placed}
        last_try = dict.fromkeys(pending, -1)
        while pending:
            end = order[-1]
            epoch = len(order)
            eligible = [i for i in pending if last_try[i] < epoch]
            if not eligible:
                break
            u = min(eligible, key=lambda i: (dist_to[end, i], i))
            path = hop_path(end, u)
            advanced = False
            for step in path or ():
                if not place(step):
                    last_try[step] = len(order)
                    break
                pending.discard(step)
                advanced = True
            if not advanced:
                last_try[u] = epoch
        return order, certificates, pending

    best = None
    for anchor in itertools.islice(anchor_candidates(), 6):
        order, certificates, pending = run(anchor)
        if best is None or len(pending) < len(best[2]):
            best = (order, certificates, pending)
        if not pending:
            break
    if best is None:
        raise AnchoringError("no triangular set with pairwise distances < 1 found")

    order, certificates, pending = best

    # a point the walk could not reach may still certify against the final
    # order; splice it in wherever both walk neighbours are in range, shifting
    # the positions later certificates refer to
    changed = True
    while changed and pending:
        changed = False
        for u in sorted(pending):
            cert = _try_certificate(shape, pts, order, u)
            if cert is None:
                continue
            for i in range(max(cert.refs) + 1, len(order) + 1):
                if order[i - 1] not in near_sets[u]:
                    continue
                if i < len(order) and order[i] not in near_sets[u]:
                    continue
                order.insert(i, u)
                certificates.insert(i, cert)
                for pos in range(i + 1, len(order)):
                    c = certificates[pos]
                    certificates[pos] = Certificate(
                        tuple(r if r < i else r + 1 for r in c.refs), c.generators
                    )
                pending.discard(u)
                changed = True
                break

    return GoodEnumeration(
        points, shape, tuple(order), tuple(certificates), tuple(sorted(pending))
    )


def validate_good_enumeration(enum: GoodEnumeration) -> None:
    """Re-check every defining condition from scratch; raise on violation."""
    pts = enum.point_set.points
    shape = enum.shape
    _require_non_box(shape)
    order = enum.order
    n = len(pts)

    if sorted(list(order) + list(enum.unplaced)) != list(range(n)):
        raise AnchoringError("order and unplaced do not partition the point set")
    if len(order) < 3:
        raise AnchoringError("enumeration shorter than an anchor")
    seen = set()
    for i in order:
        key = (pts[i].x, pts[i].y)
        if key in seen:
            raise AnchoringError("repeated point in enumeration")
        seen.add(key)

    for a, b in zip(order, order[1:]):
        if not distance(shape, pts[a], pts[b]) < 1:
            raise AnchoringError(f"consecutive points {a}, {b} at distance >= 1")

    i0, i1, i2 = order[:3]
    for a, b in ((i0, i1), (i0, i2), (i1, i2)):
        if not distance(shape, pts[a], pts[b]) < 1:
            raise AnchoringError("anchor pair at distance >= 1")
    if not is_triangular_set(shape, pts[i0], pts[i1], pts[i2]):
        raise AnchoringError("anchor is not a triangular set")

    for pos in range(3):
        if enum.certificates[pos] is not None:
            raise AnchoringError("anchor points carry no certificate")
    for pos in range(3, len(order)):
        cert = enum.certificates[pos]
        if cert is None:
            raise AnchoringError(f"point at position {pos} lacks a certificate")
        j, k, l = cert.refs
        if not 0 <= j < k < l < pos:
            raise AnchoringError(f"certificate positions {cert.refs} not all before {pos}")
        target = pts[order[pos]]
        for ref_pos, g in zip(cert.refs, cert.generators):
            expect = determining_generator(shape, target - pts[order[ref_pos]])
            if g != expect:
                raise AnchoringError(
                    f"certificate generator {g} does not determine the distance at position {pos}"
                )
        g1, g2, g3 = cert.generators
        if g1.cross(g2) == 0 or g1.cross(g3) == 0 or g2.cross(g3) == 0:
            raise AnchoringError(f"certificate generators at position {pos} not pairwise non-parallel")
