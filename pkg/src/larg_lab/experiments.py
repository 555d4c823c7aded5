"""Monte Carlo experiments over LARG samples.

Two stories are measured here. For non-box shapes, independent samples over
the same point set stop admitting partial isomorphisms as the compared prefix
grows: each additional certified point multiplies the survival chance by the
pair-compatibility probability, so the empirical fraction decays toward zero
under the reference curve n^(2k+2) (p*)^(n-1). For box shapes the opposite
holds: after the linear change of coordinates that turns the box metric into
L-infinity, back-and-forth extension respecting truncated coordinates finds
explicit isomorphisms routinely.

Trial streams are counter-based, so runs are reproducible row for row no
matter how the worker pool schedules them.
"""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .anchoring import GoodEnumeration, good_enumeration, validate_good_enumeration
from .exact import exact_div, exact_floor, guarded_floor
from .geometry import (
    GeometryError,
    LpShape,
    NormShape,
    PolygonShape,
    Vec2,
    box_shape,
    diamond_l1,
    distance,
    rational_hexagon,
    regular_hexagon,
    square_linf,
)
from .larg import GeoGraph, compatibility_probability, pair_uniform_array, sample_larg
from .pointsets import PointSet, Window, is_idf, sample_poisson_window

__all__ = [
    "BoxDemoReport",
    "DecayRow",
    "ExperimentConfig",
    "ExperimentError",
    "back_and_forth_isomorphism",
    "box_isomorphism_demo",
    "box_to_linf_transform",
    "paper_decay_bound",
    "partial_isomorphism_exists",
    "rows_from_csv",
    "rows_to_csv",
    "run_decay_experiment",
    "shape_from_spec",
    "wilson_interval",
]

_MASK64 = (1 << 64) - 1
_REL_TOL = 1e-9


class ExperimentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def shape_from_spec(spec: str) -> NormShape:
    """Build a shape from a short config string.

    Accepted: "hexagon", "regular-hexagon", "square", "diamond",
    "lp:<p>", and "box:ax,ay;bx,by" with exact rational components.
    """
    s = spec.strip().lower()
    if s == "hexagon":
        return rational_hexagon()
    if s == "regular-hexagon":
        return regular_hexagon()
    if s == "square":
        return square_linf()
    if s == "diamond":
        return diamond_l1()
    if s.startswith("lp:"):
        try:
            return LpShape(float(s[3:]))
        except (ValueError, GeometryError) as exc:
            raise ExperimentError(f"bad lp spec {spec!r}: {exc}") from exc
    if s.startswith("box:"):
        try:
            parts = [tok.split(",") for tok in s[4:].split(";")]
            (ax, ay), (bx, by) = parts
            return box_shape(
                Vec2(Fraction(ax), Fraction(ay)), Vec2(Fraction(bx), Fraction(by))
            )
        except (ValueError, ZeroDivisionError, GeometryError) as exc:
            raise ExperimentError(f"bad box spec {spec!r}: {exc}") from exc
    raise ExperimentError(f"unknown shape spec {spec!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a decay run needs, JSON round-trippable."""

    shape: str = "hexagon"
    window: tuple = (0, 0, 1, 1)
    intensity: float = 120.0
    mode: str = "rational"
    n_values: tuple = (5, 10, 20, 40)
    p: float = 0.5
    trials: int = 200
    base_seed: int = 1
    anchor_policy: str = "exhaustive"
    out_csv: str | None = None
    out_json: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if len(self.window) != 4:
            raise ExperimentError("window must be (x0, y0, x1, y1)")
        if self.trials < 1:
            raise ExperimentError("trials must be at least 1")
        if not self.n_values or list(self.n_values) != sorted(self.n_values):
            raise ExperimentError("n_values must be non-empty and sorted ascending")
        if self.n_values[0] < 3:
            raise ExperimentError("prefix sizes start at the anchor, n >= 3")
        if not 0.0 < self.p < 1.0:
            raise ExperimentError(f"p must be in (0, 1), got {self.p}")
        if self.intensity <= 0:
            raise ExperimentError("intensity must be positive")
        if self.mode not in ("float", "rational"):
            raise ExperimentError(f"unknown sampling mode {self.mode!r}")
        if self.anchor_policy not in ("exhaustive", "identity"):
            raise ExperimentError(f"unknown anchor policy {self.anchor_policy!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ExperimentError("config JSON must be an object")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ExperimentError(f"bad config: {exc}") from exc


# ---------------------------------------------------------------------------
# statistics


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval; stays honest at zero counts and small trials."""
    if trials < 1:
        raise ExperimentError("trials must be at least 1")
    if not 0 <= successes <= trials:
        raise ExperimentError("successes must lie in [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def paper_decay_bound(n: int, k: int, p_star: float) -> float:
    """Reference curve n^(2k+2) (p*)^(n-1); k = number of direction classes."""
    if n < 3 or k < 2:
        raise ExperimentError("bound needs n >= 3 and k >= 2")
    return float(n) ** (2 * k + 2) * p_star ** (n - 1)


@dataclass(frozen=True)
class DecayRow:
    n: int
    trials: int
    successes: int
    fraction: float
    ci_lo: float
    ci_hi: float
    paper_bound: float


# ---------------------------------------------------------------------------
# partial isomorphism search


def _solve_projections(a1: Vec2, c1, a2: Vec2, c2) -> Vec2 | None:
    # point with a1.y = c1 and a2.y = c2; None when the normals are parallel
    det = a1.cross(a2)
    if det == 0:
        return None
    return Vec2(
        exact_div(c1 * a2.y - c2 * a1.y, det), exact_div(c2 * a1.x - c1 * a2.x, det)
    )


def _linear_part(m: tuple, w: tuple):
    """Row-major L with L(m1-m0) = w1-w0 and L(m2-m0) = w2-w0, or None."""
    d1, d2 = m[1] - m[0], m[2] - m[0]
    e1, e2 = w[1] - w[0], w[2] - w[0]
    det = d1.cross(d2)  # anchors are triangular, never collinear
    if e1.cross(e2) == 0:
        return None
    return (
        exact_div(e1.x * d2.y - e2.x * d1.y, det),
        exact_div(e2.x * d1.x - e1.x * d2.x, det),
        exact_div(e1.y * d2.y - e2.y * d1.y, det),
        exact_div(e2.y * d1.x - e1.y * d2.x, det),
    )


def _inverse_transpose(L):
    a, b, c, d = L
    det = a * d - b * c
    if det == 0:
        return None
    return (
        exact_div(d, det),
        exact_div(-c, det),
        exact_div(-b, det),
        exact_div(a, det),
    )


def _apply(L, v: Vec2) -> Vec2:
    a, b, c, d = L
    return Vec2(a * v.x + b * v.y, c * v.x + d * v.y)


def _vec_close(u: Vec2, v: Vec2, exact: bool) -> bool:
    if exact:
        return u.x == v.x and u.y == v.y
    return abs(float(u.x) - float(v.x)) <= _REL_TOL and abs(float(u.y) - float(v.y)) <= _REL_TOL


def _is_shape_symmetry(shape: NormShape, Lit, exact: bool) -> bool:
    """Does y -> L y preserve the norm? Checked through the dual action Lit."""
    if isinstance(shape, PolygonShape):
        for g in shape.generators:
            img = _apply(Lit, g)
            if not any(
                _vec_close(img, h, exact) or _vec_close(img, -h, exact)
                for h in shape.generators
            ):
                return False
        return True
    if isinstance(shape, LpShape):
        a, b, c, d = Lit
        if shape.p == 2:
            checks = (a * a + c * c - 1, b * b + d * d - 1, a * b + c * d)
        else:
            # p != 2 admits only signed coordinate permutations
            checks = (
                (abs(a) - 1) * (abs(b) - 1),
                (abs(c) - 1) * (abs(d) - 1),
                a * b,
                c * d,
                a * c,
                b * d,
            )
        if exact:
            return all(v == 0 for v in checks)
        return all(abs(float(v)) <= _REL_TOL for v in checks)
    raise ExperimentError(f"unsupported shape {shape!r}")


def _ext_cache(enum: GoodEnumeration) -> dict:
    cache = getattr(enum, "_ext_state", None)
    if cache is None:
        cache = {}
        object.__setattr__(enum, "_ext_state", cache)
    return cache


def _point_lookup(enum: GoodEnumeration):
    cache = _ext_cache(enum)
    if "lookup" not in cache:
        pts = enum.point_set.points
        exact_index = {(v.x, v.y): i for i, v in enumerate(pts)}
        if enum.point_set.mode == "rational":

            def lookup(y: Vec2):
                return exact_index.get((y.x, y.y))

        else:
            scale = 1.0 / _REL_TOL
            grid: dict = {}
            for i, v in enumerate(pts):
                grid.setdefault(
                    (round(float(v.x) * scale), round(float(v.y) * scale)), []
                ).append(i)

            def lookup(y: Vec2):
                fx, fy = float(y.x), float(y.y)
                kx, ky = round(fx * scale), round(fy * scale)
                hits = [
                    i
                    for dx in (0, -1, 1)
                    for dy in (0, -1, 1)
                    for i in grid.get((kx + dx, ky + dy), ())
                    if abs(float(pts[i].x) - fx) <= _REL_TOL
                    and abs(float(pts[i].y) - fy) <= _REL_TOL
                ]
                return hits[0] if len(hits) == 1 else None

        cache["lookup"] = lookup
    return cache["lookup"]


def _extend_candidate(enum: GoodEnumeration, n: int, triple: tuple) -> tuple | None:
    """Deterministic geometric extension of one anchor assignment, or None."""
    pts = enum.point_set.points
    shape = enum.shape
    exact = enum.point_set.mode == "rational"
    lookup = _point_lookup(enum)
    order = enum.order

    m = tuple(pts[order[i]] for i in range(3))
    w = tuple(pts[u] for u in triple)
    L = _linear_part(m, w)
    if L is None:
        return None
    Lit = _inverse_transpose(L)
    if Lit is None or not _is_shape_symmetry(shape, Lit, exact):
        return None

    cache = _ext_cache(enum)
    if "certdists" not in cache:
        cache["certdists"] = {}
    certdists = cache["certdists"]

    images = list(triple)
    used = set(triple)
    for pos in range(3, n):
        cert = enum.certificates[pos]
        if pos not in certdists:
            target = pts[order[pos]]
            certdists[pos] = tuple(
                distance(shape, target, pts[order[r]]) for r in cert.refs
            )
        dists = certdists[pos]
        refs_w = tuple(pts[images[r]] for r in cert.refs)
        sg = tuple(_apply(Lit, g) for g in cert.generators)
        y = _solve_projections(
            sg[0],
            sg[0].dot(refs_w[0]) + dists[0],
            sg[1],
            sg[1].dot(refs_w[1]) + dists[1],
        )
        if y is None:
            return None
        resid = sg[2].dot(y) - sg[2].dot(refs_w[2]) - dists[2]
        if exact:
            if resid != 0:
                return None
        elif abs(float(resid)) > _REL_TOL * max(1.0, abs(float(dists[2]))):
            return None
        idx = lookup(y)
        if idx is None or idx in used:
            return None
        # the projection solve fixes y; the true distances confirm the
        # mapped generators really are the determining faces at y
        for w_r, s_r in zip(refs_w, dists):
            d = distance(shape, pts[idx], w_r)
            if exact:
                if d != s_r:
                    return None
            elif abs(float(d) - float(s_r)) > _REL_TOL * max(1.0, abs(float(s_r))):
                return None
        images.append(idx)
        used.add(idx)
    return tuple(images)


def _extension_candidates(enum: GoodEnumeration, n: int) -> tuple:
    """All anchor assignments into V_n that extend geometrically, cached."""
    cache = _ext_cache(enum)
    key = ("cands", n)
    if key in cache:
        return cache[key]
    if not cache.get("validated"):
        validate_good_enumeration(enum)
        cache["validated"] = True

    pts = enum.point_set.points
    vn = enum.order[:n]
    out = []
    if n == 3:
        # nothing to reconstruct: every adjacency-compatible triple counts
        for u1 in vn:
            for u2 in vn:
                for u3 in vn:
                    if u1 != u2 and u1 != u3 and u2 != u3:
                        out.append((u1, u2, u3))
    else:
        shape = enum.shape
        m = tuple(pts[enum.order[i]] for i in range(3))
        d01 = distance(shape, m[0], m[1])
        d02 = distance(shape, m[0], m[2])
        d12 = distance(shape, m[1], m[2])
        pair_d = {}
        for i, u in enumerate(vn):
            for v in vn[i + 1 :]:
                d = pair_d[(u, v)] = distance(shape, pts[u], pts[v])
                pair_d[(v, u)] = d
        # an extension forces an isometry, so anchor distances must match
        for u1 in vn:
            for u2 in vn:
                if u2 == u1 or pair_d[(u1, u2)] != d01:
                    continue
                for u3 in vn:
                    if u3 == u1 or u3 == u2:
                        continue
                    if pair_d[(u1, u3)] != d02 or pair_d[(u2, u3)] != d12:
                        continue
                    images = _extend_candidate(enum, n, (u1, u2, u3))
                    if images is not None:
                        out.append(images)
    cache[key] = tuple(out)
    return cache[key]


def partial_isomorphism_exists(
    G: GeoGraph, H: GeoGraph, order: GoodEnumeration, n: int
) -> bool:
    """Does some anchor assignment into V_n extend to a partial isomorphism?

    V_n is the first n points of the enumeration. The anchor triple may land
    on any ordered triple of distinct vertices of V_n; every later vertex's
    image is then forced by its certificate, and the resulting map must match
    adjacency exactly. The search is exhaustive over anchor assignments.
    """
    if n < 3:
        raise ExperimentError("n must be at least 3")
    if n > len(order.order):
        raise ExperimentError(
            f"enumeration places {len(order.order)} points; cannot compare n = {n}"
        )
    fp = order.point_set.fingerprint()
    if G.point_set_ref != fp or H.point_set_ref != fp:
        raise ExperimentError("graphs were not sampled over the enumeration's point set")
    if G.n != H.n or G.delta != H.delta:
        raise ExperimentError("graphs disagree on size or delta")

    prefix = order.order[:n]
    ge, he = G.edges, H.edges
    for images in _extension_candidates(order, n):
        ok = True
        for a in range(n):
            va, wa = prefix[a], images[a]
            for b in range(a + 1, n):
                vb, wb = prefix[b], images[b]
                e_g = ((va, vb) if va < vb else (vb, va)) in ge
                e_h = ((wa, wb) if wa < wb else (wb, wa)) in he
                if e_g != e_h:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# decay experiment


def _trial_seed(base: int, n: int, t: int, side: int) -> int:
    # disjoint deterministic streams per (row, trial, graph side)
    z = (base & _MASK64) ^ (n * 0x9E3779B97F4A7C15) ^ (t * 0xBF58476D1CE4E5B9)
    return (z ^ (side * 0x94D049BB133111EB)) & _MASK64


def _worker_count() -> int:
    env = os.environ.get("LARG_LAB_THREADS", "").strip()
    if env:
        workers = int(env)
        if workers < 1:
            raise ExperimentError("LARG_LAB_THREADS must be a positive integer")
        return workers
    return min(8, os.cpu_count() or 1)


def _in_range_pairs(points: PointSet, shape: NormShape, delta):
    pts = points.points
    us, vs = [], []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if distance(shape, pts[i], pts[j]) < delta:
                us.append(i)
                vs.append(j)
    return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)


def _graph_from_pairs(points: PointSet, pairs, delta, p: float, edge_seed: int) -> GeoGraph:
    iu, jv = pairs
    edges = set()
    if len(iu):
        uni = pair_uniform_array(edge_seed, iu, jv)
        edges = {(int(u), int(v)) for u, v in zip(iu[uni < p], jv[uni < p])}
    return GeoGraph(
        point_set_ref=points.fingerprint(),
        n=len(points),
        p=float(p),
        delta=delta,
        edge_seed=edge_seed,
        edges=frozenset(edges),
    )


def run_decay_experiment(cfg: ExperimentConfig) -> list[DecayRow]:
    """Measure how often independent samples stay partially isomorphic.

    One point set and one good enumeration serve every row; each trial draws
    two independent edge sets and asks partial_isomorphism_exists on the first
    n points. Box shapes are rejected: their samples are isomorphic almost
    surely, which is the box demo's story, not a decay.
    """
    shape = shape_from_spec(cfg.shape)
    if not isinstance(shape, PolygonShape):
        raise ExperimentError(
            "decay bound needs a finite generator set; use a polygonal shape"
        )
    if shape.is_box():
        raise ExperimentError(
            "box shapes stay isomorphic almost surely; run the box demo instead"
        )
    window = Window(*cfg.window)
    points = sample_poisson_window(
        window, cfg.intensity, seed=cfg.base_seed, mode=cfg.mode
    )
    enum = good_enumeration(points, shape)
    if len(enum.order) < cfg.n_values[-1]:
        raise ExperimentError(
            f"enumeration places {len(enum.order)} points; "
            f"largest requested n is {cfg.n_values[-1]}"
        )

    pairs = _in_range_pairs(points, shape, 1)
    p_star = compatibility_probability(cfg.p, True)
    k = len(shape.generators)

    def one_trial(args) -> bool:
        n, t = args
        G = _graph_from_pairs(points, pairs, 1, cfg.p, _trial_seed(cfg.base_seed, n, t, 0))
        H = _graph_from_pairs(points, pairs, 1, cfg.p, _trial_seed(cfg.base_seed, n, t, 1))
        if cfg.anchor_policy == "identity":
            # only the identity assignment: do the two samples agree on V_n?
            prefix = enum.order[:n]
            for a in range(n):
                for b in range(a + 1, n):
                    e = (prefix[a], prefix[b]) if prefix[a] < prefix[b] else (prefix[b], prefix[a])
                    if (e in G.edges) != (e in H.edges):
                        return False
            return True
        return partial_isomorphism_exists(G, H, enum, n)

    rows = []
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        for n in cfg.n_values:
            _extension_candidates(enum, n)  # build tables once, not per worker
            outcomes = list(pool.map(one_trial, ((n, t) for t in range(cfg.trials))))
            successes = sum(outcomes)
            lo, hi = wilson_interval(successes, cfg.trials)
            rows.append(
                DecayRow(
                    n=n,
                    trials=cfg.trials,
                    successes=successes,
                    fraction=successes / cfg.trials,
                    ci_lo=lo,
                    ci_hi=hi,
                    paper_bound=paper_decay_bound(n, k, p_star),
                )
            )

    if cfg.out_csv:
        rows_to_csv(rows, cfg.out_csv)
    if cfg.out_json:
        with open(cfg.out_json, "w", encoding="utf-8") as fh:
            json.dump([asdict(r) for r in rows], fh, indent=2)
    return rows


_CSV_COLUMNS = ("n", "trials", "successes", "fraction", "ci_lo", "ci_hi", "paper_bound")


def _write_rows(fh, rows) -> None:
    writer = csv.writer(fh)
    writer.writerow(_CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [r.n, r.trials, r.successes, repr(r.fraction), repr(r.ci_lo), repr(r.ci_hi), repr(r.paper_bound)]
        )


def rows_to_csv(rows, path) -> None:
    if hasattr(path, "write"):
        _write_rows(path, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, rows)


def rows_from_csv(path) -> list[DecayRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != _CSV_COLUMNS:
            raise ExperimentError(f"unexpected CSV header {header!r}")
        return [
            DecayRow(
                n=int(row[0]),
                trials=int(row[1]),
                successes=int(row[2]),
                fraction=float(row[3]),
                ci_lo=float(row[4]),
                ci_hi=float(row[5]),
                paper_bound=float(row[6]),
            )
            for row in reader
        ]


# ---------------------------------------------------------------------------
# box side: exact reduction to L-infinity and back-and-forth isomorphisms


def box_to_linf_transform(shape: NormShape):
    """2x2 map T, rows the two face normals, with d_box(x,y) = d_inf(Tx,Ty).

    Row i of T reads off the projection onto generator i, so the max-of-
    projections box norm becomes the max-of-coordinates norm, exactly.
    """
    if not (isinstance(shape, PolygonShape) and shape.is_box()):
        raise ExperimentError("box_to_linf_transform needs a box shape")
    a1, a2 = shape.generators
    return ((a1.x, a1.y), (a2.x, a2.y))


def _floor_table(points: PointSet, shape: PolygonShape):
    """floors[a][u][v] = floor of a.(p_u - p_v); refuses ambiguous floats."""
    pts = points.points
    n = len(pts)
    tables = []
    for a in shape.generators:
        proj = [a.dot(v) for v in pts]
        exact = all(not isinstance(t, float) for t in proj)
        tab = [[0] * n for _ in range(n)]
        for u in range(n):
            for v in range(n):
                diff = proj[u] - proj[v]
                tab[u][v] = exact_floor(diff) if exact else guarded_floor(
                    diff, what=f"projection difference ({u}, {v})"
                )
        tables.append(tab)
    return tables


class _Budget:
    __slots__ = ("left",)

    def __init__(self, left: int):
        self.left = left


class _BudgetExhausted(Exception):
    pass


def back_and_forth_isomorphism(
    G: GeoGraph, H: GeoGraph, points: PointSet, shape: PolygonShape, budget: int = 5000
):
    """Search for an isomorphism respecting truncated generator projections.

    Alternates sides: even steps map the smallest unmapped vertex of G, odd
    steps find a preimage for the smallest unmapped vertex of H. A candidate
    must match every mapped vertex's projection floors and adjacency. Returns
    ("isomorphic", mapping), ("none", None) when the search space is
    exhausted, or ("undetermined", None) when the budget runs out first.
    """
    if not isinstance(shape, PolygonShape):
        raise ExperimentError("back-and-forth needs a polygonal shape")
    fp = points.fingerprint()
    if G.point_set_ref != fp or H.point_set_ref != fp:
        raise ExperimentError("graphs were not sampled over this point set")
    if G.n != H.n or G.delta != H.delta:
        raise ExperimentError("graphs disagree on size or delta")
    if budget < 1:
        raise ExperimentError("budget must be positive")

    n = len(points)
    floors = _floor_table(points, shape)
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    meter = _Budget(budget)

    def consistent(u: int, w: int) -> bool:
        for u2, w2 in fwd.items():
            if G.has_edge(u, u2) != H.has_edge(w, w2):
                return False
            for tab in floors:
                if tab[u][u2] != tab[w][w2]:
                    return False
        return True

    def extend() -> bool:
        if len(fwd) == n:
            return True
        step = len(fwd)
        if step % 2 == 0:
            u = min(v for v in range(n) if v not in fwd)
            for w in range(n):
                if w in bwd:
                    continue
                if meter.left <= 0:
                    raise _BudgetExhausted
                meter.left -= 1
                if consistent(u, w):
                    fwd[u] = w
                    bwd[w] = u
                    if extend():
                        return True
                    del fwd[u]
                    del bwd[w]
        else:
            w = min(v for v in range(n) if v not in bwd)
            for u in range(n):
                if u in fwd:
                    continue
                if meter.left <= 0:
                    raise _BudgetExhausted
                meter.left -= 1
                if consistent(u, w):
                    fwd[u] = w
                    bwd[w] = u
                    if extend():
                        return True
                    del fwd[u]
                    del bwd[w]
        return False

    try:
        found = extend()
    except _BudgetExhausted:
        return ("undetermined", None)
    if not found:
        return ("none", None)
    return ("isomorphic", tuple(fwd[u] for u in range(n)))


@dataclass(frozen=True)
class BoxDemoReport:
    outcomes: tuple
    found: int
    none: int
    undetermined: int
    trials: int
    success_rate: float
    budget: int


def box_isomorphism_demo(
    points: PointSet, shape: NormShape, p: float, seeds, budget: int = 5000
) -> BoxDemoReport:
    """Rate of explicit isomorphisms between independent box samples.

    Requires idf projections on both generators, the regime in which the
    infinite model makes any two samples isomorphic; at desk scale the rate
    is recorded as observed, including honest "undetermined" exhaustions.
    """
    if not (isinstance(shape, PolygonShape) and shape.is_box()):
        raise ExperimentError("box_isomorphism_demo needs a box shape")
    for a in shape.generators:
        if not is_idf([a.dot(v) for v in points.points]):
            raise ExperimentError(
                f"projections on generator ({a.x}, {a.y}) are not integer-"
                "difference-free; rescale the sample first"
            )
    seeds = tuple(seeds)
    if not seeds:
        raise ExperimentError("need at least one seed")

    outcomes = []
    for s in seeds:
        G = sample_larg(points, shape, 1, p, edge_seed=_trial_seed(s, 0, 0, 0))
        H = sample_larg(points, shape, 1, p, edge_seed=_trial_seed(s, 0, 0, 1))
        status, _ = back_and_forth_isomorphism(G, H, points, shape, budget)
        outcomes.append(status)
    found = outcomes.count("isomorphic")
    return BoxDemoReport(
        outcomes=tuple(outcomes),
        found=found,
        none=outcomes.count("none"),
        undetermined=outcomes.count("undetermined"),
        trials=len(seeds),
        success_rate=found / len(seeds),
        budget=budget,
    )
