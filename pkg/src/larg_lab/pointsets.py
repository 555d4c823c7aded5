"""Finite windowed stand-ins for countable dense sets.

Infinite models (Poisson processes, unions of per-interval uniform draws) are
approximated by their restriction to an axis-aligned window.  A PointSet
remembers how it was produced (seed, scaling alpha, numeric mode) plus
verified structural flags: integer-distance-freeness of generator projections
and pairwise non-integer metric distances.

Rational mode draws dyadic rationals so every downstream floor/idf question
has an exact answer; float mode is for Monte Carlo throughput.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact import exact_div, format_scalar, is_exact, parse_scalar
from .geometry import GeometryError, NormShape, Vec2, distance

__all__ = [
    "Window",
    "PointSet",
    "PointSetError",
    "sample_poisson_window",
    "sample_interval_union_window",
    "is_idf",
    "projections",
    "rescale_to_idf",
    "check_pairwise_noninteger",
    "probe_density",
    "pointset_to_json",
    "pointset_from_json",
]

# denominator for rational-mode draws; dyadic so exactness survives scaling
_RATIONAL_DEN = 1 << 40

# float pairwise differences within this of an integer count as integer
_IDF_GUARD = 1e-9


class PointSetError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    """Axis-aligned box [x0, x1] x [y0, y1]."""

    x0: object
    y0: object
    x1: object
    y1: object

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise PointSetError("window must have positive extent")

    def area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, v: Vec2) -> bool:
        return self.x0 <= v.x <= self.x1 and self.y0 <= v.y <= self.y1

    def scaled(self, alpha) -> "Window":
        c = sorted([self.x0 * alpha, self.x1 * alpha])
        d = sorted([self.y0 * alpha, self.y1 * alpha])
        return Window(c[0], d[0], c[1], d[1])


@dataclass
class PointSet:
    """Distinct plane points plus sampling provenance; treat as immutable."""

    points: tuple[Vec2, ...]
    window: Window
    seed: int
    mode: str = "float"
    alpha: object = 1
    idf_per_generator: dict = field(default_factory=dict)
    pairwise_noninteger: bool | None = None

    def __post_init__(self):
        if self.mode not in ("float", "rational"):
            raise PointSetError(f"unknown mode {self.mode!r}")
        self.points = tuple(self.points)
        seen = set()
        for v in self.points:
            key = (v.x, v.y)
            if key in seen:
                raise PointSetError(f"duplicate point {v}")
            seen.add(key)
            if self.mode == "rational" and not v.is_exact():
                raise PointSetError(f"float coordinate {v} in rational mode")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i) -> Vec2:
        return self.points[i]

    def as_array(self) -> np.ndarray:
        """n x 2 float array (cached)."""
        arr = getattr(self, "_arr", None)
        if arr is None:
            arr = np.array([p.to_floats() for p in self.points], dtype=float)
            object.__setattr__(self, "_arr", arr)
        return arr

    def fingerprint(self) -> str:
        """Content hash used as the point_set_ref of graphs sampled over this set."""
        fp = getattr(self, "_fp", None)
        if fp is None:
            h = hashlib.sha256()
            h.update(self.mode.encode())
            for v in self.points:
                h.update(repr((v.x, v.y)).encode())
            fp = h.hexdigest()[:16]
            object.__setattr__(self, "_fp", fp)
        return fp


# ---------------------------------------------------------------------------
# samplers


def _window_exact(window: Window) -> Window:
    for c in (window.x0, window.y0, window.x1, window.y1):
        if not is_exact(c):
            raise PointSetError("rational mode needs exact window bounds")
    return window


def sample_poisson_window(
    window: Window, intensity: float, seed: int, mode: str = "float"
) -> PointSet:
    """Homogeneous Poisson process restricted to the window.

    Point count ~ Poisson(intensity * area), positions iid uniform.  The same
    (window, intensity, seed, mode) always reproduces the same PointSet.
    """
    if intensity <= 0:
        raise PointSetError("intensity must be positive")
    area = float(window.area())
    rng = np.random.default_rng(seed)
    n = int(rng.poisson(intensity * area))
    pts: list[Vec2] = []
    seen = set()
    if mode == "float":
        w, h = float(window.x1 - window.x0), float(window.y1 - window.y0)
        x0, y0 = float(window.x0), float(window.y0)
        while len(pts) < n:
            block = rng.random((n - len(pts), 2))
            for u, v in block:
                p = Vec2(x0 + w * float(u), y0 + h * float(v))
                if (p.x, p.y) not in seen:
                    seen.add((p.x, p.y))
                    pts.append(p)
    elif mode == "rational":
        _window_exact(window)
        w = window.x1 - window.x0
        h = window.y1 - window.y0
        while len(pts) < n:
            block = rng.integers(0, _RATIONAL_DEN, size=(n - len(pts), 2))
            for ku, kv in block:
                p = Vec2(
                    window.x0 + w * Fraction(int(ku), _RATIONAL_DEN),
                    window.y0 + h * Fraction(int(kv), _RATIONAL_DEN),
                )
                if (p.x, p.y) not in seen:
                    seen.add((p.x, p.y))
                    pts.append(p)
    else:
        raise PointSetError(f"unknown mode {mode!r}")
    return PointSet(tuple(pts), window, seed, mode=mode)


def sample_interval_union_window(
    window: Window, per_interval: int, seed: int, mode: str = "float"
) -> PointSet:
    """Product-of-unions dense-set model, windowed.

    Per axis: for every integer interval (z, z+1) meeting the window's range,
    draw `per_interval` uniform values and keep those inside the range.  The
    2D set is the Cartesian product of the two axis sets, so it carries the
    grid structure the box-metric results exploit.
    """
    if per_interval <= 0:
        raise PointSetError("per_interval must be positive")
    if mode == "rational":
        _window_exact(window)
    rng = np.random.default_rng(seed)

    def axis_values(lo, hi) -> list:
        vals = []
        z0 = math.floor(float(lo))
        z1 = math.ceil(float(hi))
        for z in range(z0, z1):
            if mode == "float":
                draws = [z + float(u) for u in rng.random(per_interval)]
            else:
                draws = [
                    z + Fraction(int(k), _RATIONAL_DEN)
                    for k in rng.integers(0, _RATIONAL_DEN, per_interval)
                ]
            vals.extend(d for d in draws if lo <= d <= hi)
        return sorted(set(vals))

    xs = axis_values(window.x0, window.x1)
    ys = axis_values(window.y0, window.y1)
    pts = tuple(Vec2(x, y) for x in xs for y in ys)
    if not pts:
        raise PointSetError("window too small: no points drawn")
    return PointSet(pts, window, seed, mode=mode)


# ---------------------------------------------------------------------------
# idf structure


def is_idf(values: Iterable) -> bool:
    """True iff no two distinct entries differ by an integer.

    Exact inputs are decided exactly; float inputs treat differences within
    1e-9 of an integer as integer.  Both reduce to fractional parts: x - y is
    an integer iff frac(x) == frac(y).
    """
    vals = list(values)
    if not vals:
        return True
    if all(is_exact(v) for v in vals):
        fracs = {v - math.floor(v) for v in vals}
        return len(fracs) == len(vals)
    fr = sorted(float(v) % 1.0 for v in vals)
    for a, b in zip(fr, fr[1:]):
        if b - a < _IDF_GUARD:
            return False
    # wrap-around: 0.0000001 and 0.9999999 differ by ~an integer
    if len(fr) > 1 and (fr[0] + 1.0) - fr[-1] < _IDF_GUARD:
        return False
    return True


def projections(points: Sequence[Vec2], a: Vec2) -> list:
    """Dot products a.v for v in points."""
    return [a.dot(v) for v in points]


def _golden_candidates(trials: int, seed: int):
    """Rational alpha candidates m + k*phi, phi via Fibonacci convergents.

    Exactly verifiable (they are rationals) yet non-resonant like the golden
    ratio, which is what makes a single candidate almost surely idf-clearing.
    Candidate 0 is alpha = 1 so already-idf inputs keep their scale.
    """
    yield Fraction(1)
    fib = [1, 1]
    while len(fib) < 40 + trials:
        fib.append(fib[-1] + fib[-2])
    rng = np.random.default_rng(seed)
    for t in range(trials):
        j = 30 + t % 8
        k = int(rng.integers(1, 8))
        m = int(rng.integers(0, 3))
        yield m + k * Fraction(fib[j + 1], fib[j])


def rescale_to_idf(
    points: PointSet,
    generators: Sequence[Vec2],
    trials: int = 64,
    seed: int = 0,
) -> tuple[object, PointSet]:
    """Scale the whole set by one alpha so every generator projection is idf.

    Returns (alpha, new PointSet) with alpha recorded on the set and
    per-generator idf flags set; raises after `trials` failed candidates,
    naming an obstruction.
    """
    if not generators:
        raise PointSetError("need at least one generator")
    obstruction = None
    for alpha in _golden_candidates(trials, seed):
        ok = True
        for a in generators:
            scaled = [a.dot(v) * alpha for v in points.points]
            if not is_idf(scaled):
                ok = False
                obstruction = (alpha, a)
                break
        if ok:
            flags = {(a.x, a.y): True for a in generators}
            rescaled = replace(
                points,
                points=tuple(Vec2(v.x * alpha, v.y * alpha) for v in points.points),
                window=points.window.scaled(alpha),
                alpha=points.alpha * alpha,
                idf_per_generator={**points.idf_per_generator, **flags},
            )
            return alpha, rescaled
    raise PointSetError(
        f"no idf rescaling found in {trials} candidates; "
        f"last obstruction: alpha={obstruction[0]} generator={obstruction[1]}"
    )


def check_pairwise_noninteger(points: PointSet, shape: NormShape) -> PointSet:
    """Verify no two points sit at integer metric distance; record the flag."""
    pts = points.points
    ok = True
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = distance(shape, pts[i], pts[j])
            if is_exact(d):
                if d == math.floor(d):
                    ok = False
            elif abs(d - round(d)) < _IDF_GUARD:
                ok = False
            if not ok:
                break
        if not ok:
            break
    return replace(points, pairwise_noninteger=ok)


def probe_density(
    points: PointSet, shape: NormShape, radius, grid: int = 24
) -> tuple[bool, float]:
    """Grid-probe the window: is every probe within `radius` of some point?

    Returns (covered, worst probe distance).  A finite stand-in for density:
    no empty radius-ball around any probe of a grid x grid lattice spanning
    the window interior.
    """
    if not points.points:
        return (False, math.inf)
    xs = np.linspace(float(points.window.x0), float(points.window.x1), grid + 2)[1:-1]
    ys = np.linspace(float(points.window.y0), float(points.window.y1), grid + 2)[1:-1]
    worst = 0.0
    for x in xs:
        for y in ys:
            probe = Vec2(float(x), float(y))
            d = min(float(distance(shape, probe, p)) for p in points.points)
            worst = max(worst, d)
    return (worst <= float(radius), worst)


# ---------------------------------------------------------------------------
# serialization


def pointset_to_json(ps: PointSet) -> str:
    obj = {
        "seed": ps.seed,
        "alpha": format_scalar(ps.alpha),
        "window": [
            format_scalar(ps.window.x0),
            format_scalar(ps.window.y0),
            format_scalar(ps.window.x1),
            format_scalar(ps.window.y1),
        ],
        "mode": ps.mode,
        "points": [[format_scalar(p.x), format_scalar(p.y)] for p in ps.points],
        "flags": {
            "idf_per_generator": [
                [format_scalar(gx), format_scalar(gy), bool(v)]
                for (gx, gy), v in sorted(
                    ps.idf_per_generator.items(), key=lambda kv: repr(kv[0])
                )
            ],
            "pairwise_noninteger": ps.pairwise_noninteger,
        },
    }
    return json.dumps(obj)


def pointset_from_json(text: str) -> PointSet:
    obj = json.loads(text)
    window = Window(*(parse_scalar(c) for c in obj["window"]))
    pts = tuple(Vec2(parse_scalar(x), parse_scalar(y)) for x, y in obj["points"])
    flags = obj.get("flags", {})
    idf_flags = {
        (parse_scalar(gx), parse_scalar(gy)): bool(v)
        for gx, gy, v in flags.get("idf_per_generator", [])
    }
    return PointSet(
        pts,
        window,
        int(obj["seed"]),
        mode=obj["mode"],
        alpha=parse_scalar(obj.get("alpha", 1.0)),
        idf_per_generator=idf_flags,
        pairwise_noninteger=flags.get("pairwise_noninteger"),
    )
