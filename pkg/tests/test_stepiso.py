"""Fractional-part maps, step-isometry verdicts, line respect, stat checks."""

import math
from fractions import Fraction

import numpy as np
import pytest

from larg_lab.exact import BoundaryAmbiguityError
from larg_lab.geometry import (
    Line,
    LpShape,
    Vec2,
    box_shape,
    diamond_l1,
    distance,
    rational_hexagon,
    square_linf,
)
from larg_lab.larg import GeoGraph, sample_larg
from larg_lab.pointsets import (
    PointSet,
    Window,
    rescale_to_idf,
    sample_poisson_window,
)
from larg_lab.stepiso import (
    Interleaving1D,
    PointMap,
    StepIsoError,
    apply_fractional_map,
    box_product_map,
    box_product_point_map,
    canonical_interleaving,
    explicit_1d_point_map,
    explicit_step_isometry_1d,
    identity_point_map,
    is_isometry,
    is_step_isometry,
    respects_line,
    stepiso_statistical_check,
)

F = Fraction


# ---------------------------------------------------------------------------
# oracles


def oracle_floor_distance(shape, x: Vec2, y: Vec2) -> int:
    """Independent truncation: exact max-projection distance, then floor."""
    d = max(abs(a.dot(x - y)) for a in shape.generators)
    return math.floor(d)


def oracle_step_iso(shape, pts, ims):
    """Brute-force pair scan; returns first violating pair or None."""
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if oracle_floor_distance(shape, pts[i], pts[j]) != oracle_floor_distance(
                shape, ims[i], ims[j]
            ):
                return (i, j)
    return None


def line_set(values, mode="rational") -> PointSet:
    pts = tuple(Vec2(v, F(0) if mode == "rational" else 0.0) for v in values)
    w = (
        Window(F(-100), F(-1), F(100), F(1))
        if mode == "rational"
        else Window(-100.0, -1.0, 100.0, 1.0)
    )
    return PointSet(pts, w, seed=0, mode=mode)


def idf_line_values(rng, n, span=20):
    """Random rationals with pairwise non-integer differences."""
    fracs = rng.choice(np.arange(1, 1 << 20), size=n, replace=False)
    zs = rng.integers(-span, span, size=n)
    return [int(z) + F(int(k), 1 << 20) for z, k in zip(zs, fracs)]


# ---------------------------------------------------------------------------
# Interleaving1D


def test_interleaving_validation():
    with pytest.raises(StepIsoError):
        Interleaving1D(())
    with pytest.raises(StepIsoError):
        Interleaving1D(((F(1, 4), F(1, 4)),))  # must start at (0, 0)
    with pytest.raises(StepIsoError):
        Interleaving1D(((0, 0), (F(1, 2), F(0))))  # u not increasing
    with pytest.raises(StepIsoError):
        Interleaving1D(((0, 0), (F(3, 2), F(1, 2))))  # t outside [0, 1)
    g = Interleaving1D.two_piece(F(1, 2), F(1, 3))
    with pytest.raises(StepIsoError):
        g(F(3, 2))


def test_interleaving_identity_and_pieces():
    ident = Interleaving1D.identity()
    assert ident.is_identity()
    assert ident(F(3, 7)) == F(3, 7)
    g = canonical_interleaving()
    assert not g.is_identity()
    assert g(F(0)) == 0
    assert g(F(1, 4)) == F(1, 6)
    assert g(F(1, 2)) == F(1, 3)
    assert g(F(3, 4)) == F(2, 3)
    # monotone across the knot
    assert g(F(49, 100)) < g(F(1, 2)) < g(F(51, 100))


def test_explicit_map_values():
    assert explicit_step_isometry_1d(F(1, 4)) == F(1, 6)
    assert explicit_step_isometry_1d(F(3, 4)) == F(2, 3)
    assert explicit_step_isometry_1d(F(3)) == 3
    assert explicit_step_isometry_1d(0.25) == pytest.approx(1 / 6)
    # agreement with the knot form on a sweep, integer parts preserved
    g = canonical_interleaving()
    for k in range(-12, 12):
        x = F(k, 5)
        assert explicit_step_isometry_1d(x) == apply_fractional_map(g, x)
        assert math.floor(apply_fractional_map(g, x)) == math.floor(x)


def test_fractional_order_preserved():
    # strict fractional order must survive the map; 10^4 random pairs
    rng = np.random.default_rng(7)
    maps = [canonical_interleaving(), Interleaving1D.two_piece(F(1, 5), F(4, 5))]
    xs = idf_line_values(rng, 200)
    count = 0
    for g in maps:
        ys = [apply_fractional_map(g, x) for x in xs]
        for i in range(len(xs)):
            for j in range(len(xs)):
                if i == j:
                    continue
                fx, fy = xs[i] % 1, xs[j] % 1
                gx, gy = ys[i] % 1, ys[j] % 1
                assert (fx < fy) == (gx < gy)
                count += 1
    assert count >= 10_000


# ---------------------------------------------------------------------------
# box product maps


def test_box_product_componentwise():
    sh = square_linf()
    g = canonical_interleaving()
    v = Vec2(F(1, 4), F(3, 4))
    w = box_product_map(sh, g, g, v)
    assert (w.x, w.y) == (F(1, 6), F(2, 3))
    # oracle: the axes are the dual coordinates of the L-inf square
    assert w.x == explicit_step_isometry_1d(v.x)
    assert w.y == explicit_step_isometry_1d(v.y)


def test_box_product_identity_and_lattice():
    sh = diamond_l1()
    ident = Interleaving1D.identity()
    for v in (Vec2(F(1, 3), F(2, 7)), Vec2(F(-5, 2), F(9, 4))):
        assert box_product_map(sh, ident, ident, v) == v
    g = canonical_interleaving()
    for v in (Vec2(0, 0), Vec2(3, -2)):
        # both dual coordinates are integers, so nothing moves
        assert box_product_map(sh, g, g, v) == Vec2(F(v.x), F(v.y))


def test_box_product_rejects_non_box():
    with pytest.raises(StepIsoError):
        box_product_map(rational_hexagon(), None, None, Vec2(0, 0))
    with pytest.raises(StepIsoError):
        box_product_map(LpShape(2), None, None, Vec2(0, 0))


def test_box_product_slanted_shape_round_trip():
    # dual coordinates of the image must be the mapped dual coordinates
    sh = box_shape(Vec2(F(1), F(1)), Vec2(F(1), F(-1)))
    g1 = canonical_interleaving()
    g2 = Interleaving1D.two_piece(F(1, 3), F(1, 7))
    a1, a2 = sh.generators
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = Vec2(F(int(rng.integers(-40, 40)), 16), F(int(rng.integers(-40, 40)), 16))
        w = box_product_map(sh, g1, g2, v)
        assert a1.dot(w) == apply_fractional_map(g1, a1.dot(v))
        assert a2.dot(w) == apply_fractional_map(g2, a2.dot(v))


# ---------------------------------------------------------------------------
# PointMap


def test_point_map_validation():
    ps = line_set([F(0), F(1, 2)])
    with pytest.raises(StepIsoError):
        PointMap(ps, (Vec2(F(0), F(0)),))
    with pytest.raises(StepIsoError):
        PointMap(ps, (Vec2(F(0), F(0)), Vec2(F(0), F(0))))
    pm = identity_point_map(ps)
    assert len(pm) == 2 and pm.kind == "arbitrary"


# ---------------------------------------------------------------------------
# is_step_isometry


def test_identity_is_step_isometry():
    ps = sample_poisson_window(
        Window(F(0), F(0), F(3), F(3)), 10.0, seed=2, mode="rational"
    )
    v = is_step_isometry(identity_point_map(ps), rational_hexagon())
    assert v.ok and v.witness is None


def test_explicit_1d_map_is_step_isometry_not_isometry():
    rng = np.random.default_rng(11)
    for trial in range(30):
        ps = line_set(idf_line_values(rng, 40))
        pm = explicit_1d_point_map(ps)
        assert is_step_isometry(pm, square_linf()).ok
        assert oracle_step_iso(square_linf(), ps.points, pm.images) is None
    # witness pair at fractional parts 0 and 1/2: distances 1/2 vs 1/3
    pair = line_set([F(0), F(1, 2)])
    verdict = is_isometry(explicit_1d_point_map(pair), square_linf())
    assert not verdict.ok
    assert verdict.witness == (0, 1)
    assert (verdict.left, verdict.right) == (F(1, 2), F(1, 3))


def test_obvious_violation_reported():
    ps = line_set([F(0), F(1, 2)])
    stretched = PointMap(ps, (Vec2(F(0), F(0)), Vec2(F(3, 2), F(0))))
    v = is_step_isometry(stretched, square_linf())
    assert not v.ok and v.witness == (0, 1)
    assert (v.left, v.right) == (0, 1)


def idf_box_sample(shape, n, seed, window=6):
    """Rational sample rescaled until both generator projections are idf."""
    ps = sample_poisson_window(
        Window(F(-window), F(-window), F(window), F(window)),
        n / (4.0 * window * window),
        seed=seed,
        mode="rational",
    )
    _, out = rescale_to_idf(ps, list(shape.generators), trials=64, seed=seed)
    return out


def test_box_product_step_iso_on_idf_samples():
    g = canonical_interleaving()
    for shape in (square_linf(), box_shape(Vec2(F(1), F(1)), Vec2(F(1), F(-1)))):
        ps = idf_box_sample(shape, 60, seed=5)
        pm = box_product_point_map(ps, shape, g, Interleaving1D.two_piece(F(2, 5), F(1, 5)))
        verdict = is_step_isometry(pm, shape)
        assert verdict.ok, verdict
        assert oracle_step_iso(shape, ps.points, pm.images) is None
        assert not is_isometry(pm, shape).ok


def test_box_product_identity_components_is_isometry():
    sh = square_linf()
    ps = idf_box_sample(sh, 40, seed=9)
    ident = Interleaving1D.identity()
    pm = box_product_point_map(ps, sh, ident, ident)
    assert is_isometry(pm, sh).ok


def test_hexagon_breaks_box_construction():
    # the same construction over a hexagon's first two generators must fail
    hexa = rational_hexagon()
    box = box_shape(*hexa.generators[:2])
    ps = idf_box_sample(box, 400, seed=13)
    pm = box_product_point_map(ps, box, canonical_interleaving(), canonical_interleaving())
    assert is_step_isometry(pm, box).ok
    verdict = is_step_isometry(pm, hexa)
    assert not verdict.ok
    assert verdict.witness == oracle_step_iso(hexa, ps.points, pm.images)
    i, j = verdict.witness
    assert oracle_floor_distance(hexa, ps[i], ps[j]) == verdict.left
    assert oracle_floor_distance(hexa, pm.images[i], pm.images[j]) == verdict.right


def test_float_lane_matches_exact_lane():
    hexa = rational_hexagon()
    box = box_shape(*hexa.generators[:2])
    ps = idf_box_sample(box, 150, seed=21)
    pm = box_product_point_map(ps, box, canonical_interleaving(), Interleaving1D.identity())
    exact_verdict = is_step_isometry(pm, hexa)
    ps_f = PointSet(
        tuple(Vec2(*p.to_floats()) for p in ps.points),
        Window(*(float(c) for c in (ps.window.x0, ps.window.y0, ps.window.x1, ps.window.y1))),
        seed=0,
    )
    pm_f = PointMap(ps_f, tuple(Vec2(*w.to_floats()) for w in pm.images))
    float_verdict = is_step_isometry(pm_f, hexa)
    assert float_verdict.ok == exact_verdict.ok
    assert float_verdict.witness == exact_verdict.witness


def test_float_boundary_refused():
    ps = PointSet((Vec2(0.0, 0.0), Vec2(1.0, 0.0)), Window(-1.0, -1.0, 2.0, 2.0), 0)
    with pytest.raises(BoundaryAmbiguityError, match=r"\(0, 1\)"):
        is_step_isometry(identity_point_map(ps), square_linf())


def test_lp_shape_lane():
    xs = [(i // 7) + ((i * 13) % 97) / 97.0 for i in range(40)]
    ps = line_set(xs, mode="float")
    pm = explicit_1d_point_map(ps)
    images_clean = tuple(Vec2(float(w.x), 0.0) for w in pm.images)
    pm = PointMap(ps, images_clean)
    assert is_step_isometry(pm, LpShape(2)).ok
    assert not is_isometry(pm, LpShape(2)).ok


# ---------------------------------------------------------------------------
# is_isometry extras


def test_translation_is_isometry():
    ps = sample_poisson_window(
        Window(F(0), F(0), F(2), F(2)), 15.0, seed=4, mode="rational"
    )
    t = Vec2(F(5, 7), F(-2, 3))
    pm = PointMap.from_function(ps, lambda p: p + t)
    for shape in (square_linf(), diamond_l1(), rational_hexagon()):
        assert is_isometry(pm, shape).ok
        assert is_step_isometry(pm, shape).ok


def test_isometry_tolerance_float():
    ps = line_set([0.0, 0.4], mode="float")
    wiggled = PointMap(ps, (Vec2(0.0, 0.0), Vec2(0.4 + 5e-7, 0.0)))
    assert not is_isometry(wiggled, square_linf()).ok
    assert is_isometry(wiggled, square_linf(), tol=1e-5).ok


# ---------------------------------------------------------------------------
# respects_line


def test_respects_line_explicit_map():
    values = [F(k, 100) for k in range(1, 100, 7) if k != 50]
    ps = line_set(values)
    pm = explicit_1d_point_map(ps)
    ell = Line(Vec2(1, 0), F(1, 2))
    ell_img = Line(Vec2(1, 0), F(1, 3))
    assert respects_line(pm, ell, ell_img)
    # oracle: direct side check point by point
    for v, w in zip(ps.points, pm.images):
        assert (v.x < F(1, 2)) == (w.x < F(1, 3))
    # rescaling the line equations changes nothing
    assert respects_line(pm, Line(Vec2(3, 0), F(3, 2)), Line(Vec2(7, 0), F(7, 3)))


def test_respects_line_identity_and_swap():
    ps = line_set([F(0), F(1)])
    ell = Line(Vec2(1, 0), F(1, 2))
    assert respects_line(identity_point_map(ps), ell, ell)
    swap = PointMap(ps, (ps[1], ps[0]))
    assert not respects_line(swap, ell, ell)


def test_respects_line_point_on_line_rejected():
    ps = line_set([F(1, 2), F(2)])
    ell = Line(Vec2(1, 0), F(1, 2))
    with pytest.raises(StepIsoError):
        respects_line(identity_point_map(ps), ell, ell)


# ---------------------------------------------------------------------------
# statistical check


def test_stat_check_same_seed_identity():
    ps = sample_poisson_window(Window(0.0, 0.0, 2.0, 2.0), 20.0, seed=6)
    sh = square_linf()
    g = sample_larg(ps, sh, 1, 0.5, edge_seed=3)
    h = sample_larg(ps, sh, 1, 0.5, edge_seed=3)
    report = stepiso_statistical_check(g, h, identity_point_map(ps), sh)
    assert report.is_step_isometry
    assert report.violations == () and report.crossings == 0
    assert report.survival_bound == 1.0


def test_stat_check_rejects_non_isomorphism():
    pts = PointSet((Vec2(F(0), F(0)), Vec2(F(1, 2), F(0))), Window(F(-1), F(-1), F(1), F(1)), 0, "rational")
    ref = pts.fingerprint()
    g = GeoGraph(ref, 2, 0.5, 1, 0, frozenset({(0, 1)}))
    h = GeoGraph(ref, 2, 0.5, 1, 1, frozenset())
    with pytest.raises(StepIsoError, match="not a graph isomorphism"):
        stepiso_statistical_check(g, h, identity_point_map(pts), square_linf())


def test_stat_check_planted_point_reflection():
    # edges keyed by exact distance make any isometry an isomorphism
    base = [Vec2(F(1, 3), F(1, 7)), Vec2(F(2, 5), F(-3, 8)), Vec2(F(9, 11), F(1, 2))]
    pts = tuple(base) + tuple(-v for v in base)
    ps = PointSet(pts, Window(F(-2), F(-2), F(2), F(2)), 0, "rational")
    sh = rational_hexagon()
    rng = np.random.default_rng(17)
    coin: dict = {}
    edges = set()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = distance(sh, pts[i], pts[j])
            if d < 1:
                if d not in coin:
                    coin[d] = bool(rng.random() < 0.5)
                if coin[d]:
                    edges.add((i, j))
    g = GeoGraph(ps.fingerprint(), len(pts), 0.5, 1, 0, frozenset(edges))
    reflection = PointMap.from_function(ps, lambda p: -p)
    report = stepiso_statistical_check(g, g, reflection, sh)
    assert report.violations == ()
    assert report.crossings == 0


def test_stat_check_counts_crossings_and_bound():
    pts = (
        Vec2(F(0), F(0)),
        Vec2(F(1, 2), F(0)),
        Vec2(F(10), F(0)),
        Vec2(F(10), F(3, 2)),
    )
    ps = PointSet(pts, Window(F(-1), F(-1), F(11), F(2)), 0, "rational")
    ref = ps.fingerprint()
    g = GeoGraph(ref, 4, 0.5, 1, 0, frozenset())
    h = GeoGraph(ref, 4, 0.5, 1, 1, frozenset())
    swap = PointMap(ps, (pts[2], pts[3], pts[0], pts[1]))
    report = stepiso_statistical_check(g, h, swap, square_linf())
    assert report.crossings == 2
    assert report.survival_bound == pytest.approx(0.25)
    assert set(report.violations) == {(0, 1), (0, 3), (1, 2), (2, 3)}
    assert not report.is_step_isometry


def test_stat_check_requires_shared_point_set():
    ps = sample_poisson_window(Window(0.0, 0.0, 1.0, 1.0), 10.0, seed=8)
    other = sample_poisson_window(Window(0.0, 0.0, 1.0, 1.0), 10.0, seed=9)
    sh = square_linf()
    g = sample_larg(ps, sh, 1, 0.5, edge_seed=0)
    h = sample_larg(other, sh, 1, 0.5, edge_seed=0)
    with pytest.raises(StepIsoError, match="share"):
        stepiso_statistical_check(g, h, identity_point_map(ps), sh)
