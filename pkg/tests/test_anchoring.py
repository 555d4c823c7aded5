"""Determining generators, anchored reconstruction, good enumerations."""

import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from larg_lab.anchoring import (
    AnchoringError,
    Certificate,
    GoodEnumeration,
    determining_generator,
    good_enumeration,
    reconstruct_from_anchor,
    validate_good_enumeration,
)
from larg_lab.geometry import (
    LpShape,
    Vec2,
    distance,
    is_triangular_set,
    rational_hexagon,
    square_linf,
)
from larg_lab.pointsets import PointSet, Window, sample_poisson_window

F = Fraction
HEX = rational_hexagon()


# ---------------------------------------------------------------------------
# oracles / generators


def random_rational_vec(rng, span=4, den=64) -> Vec2:
    return Vec2(
        F(int(rng.integers(-span * den, span * den)), den),
        F(int(rng.integers(-span * den, span * den)), den),
    )


def random_triangular_anchor(rng, shape, tries=200):
    """Rejection-sample a triangular set with certifiable directions."""
    for _ in range(tries):
        m = [random_rational_vec(rng, span=1) for _ in range(3)]
        if len({(v.x, v.y) for v in m}) == 3 and is_triangular_set(shape, *m):
            return tuple(m)
    raise AssertionError("no triangular anchor found")


def forward_instance(rng, shape, image_of):
    """Anchor, its images, a nearby ground-truth point, forward distances."""
    m = random_triangular_anchor(rng, shape)
    x = random_rational_vec(rng, span=1)
    dists = tuple(distance(shape, x, mi) for mi in m)
    return m, tuple(image_of(mi) for mi in m), x, dists, image_of(x)


# ---------------------------------------------------------------------------
# determining_generator


def test_determining_generator_hexagon():
    assert determining_generator(HEX, Vec2(F(1), F(1, 5))) == Vec2(F(1), F(1))
    assert determining_generator(HEX, Vec2(F(-1), F(-1, 5))) == Vec2(F(-1), F(-1))
    assert determining_generator(HEX, Vec2(F(1, 8), F(-1))) == Vec2(F(0), F(-1))
    with pytest.raises(AnchoringError, match="faces"):
        determining_generator(HEX, Vec2(F(1), F(0)))  # tie between two faces
    with pytest.raises(AnchoringError):
        determining_generator(HEX, Vec2(F(0), F(0)))


def test_determining_generator_float_tie():
    sq = square_linf()
    assert determining_generator(sq, Vec2(0.5, -0.2)) == Vec2(F(1), F(0))
    with pytest.raises(AnchoringError):
        determining_generator(sq, Vec2(0.5, 0.5 + 1e-12))


def test_determining_generator_smooth():
    g = determining_generator(LpShape(2), Vec2(3.0, 4.0))
    assert (g.x, g.y) == pytest.approx((0.6, 0.8))
    v = Vec2(3.0, 4.0)
    assert g.dot(v) == pytest.approx(LpShape(2).norm(v))


# ---------------------------------------------------------------------------
# reconstruct_from_anchor


def test_reconstruct_identity_and_translation():
    rng = np.random.default_rng(3)
    t = Vec2(F(7, 5), F(-13, 8))
    done = 0
    while done < 40:
        try:
            m, w, x, dists, _ = forward_instance(rng, HEX, lambda v: v)
            assert reconstruct_from_anchor(HEX, m, w, x, dists) == x
            m, w, x, dists, truth = forward_instance(rng, HEX, lambda v: v + t)
            assert reconstruct_from_anchor(HEX, m, w, x, dists) == truth
        except AnchoringError:
            continue  # query not determinable from this anchor; resample
        done += 1


def test_reconstruct_many_exact_instances():
    rng = np.random.default_rng(11)
    done = 0
    while done < 150:
        t = random_rational_vec(rng, span=5)
        try:
            m, w, x, dists, truth = forward_instance(rng, HEX, lambda v: v + t)
            got = reconstruct_from_anchor(HEX, m, w, x, dists)
        except AnchoringError:
            continue  # tie or parallel certificate; instance not determinable
        assert got == truth
        done += 1


def test_reconstruct_returns_anchor_image_for_anchor_point():
    rng = np.random.default_rng(5)
    m = random_triangular_anchor(rng, HEX)
    t = Vec2(F(1), F(2))
    w = tuple(mi + t for mi in m)
    dists = tuple(distance(HEX, m[1], mi) for mi in m)
    assert reconstruct_from_anchor(HEX, m, w, m[1], dists) == m[1] + t


def test_reconstruct_rejects_bad_input():
    collinear = (Vec2(F(0), F(0)), Vec2(F(1, 4), F(0)), Vec2(F(1, 2), F(0)))
    with pytest.raises(AnchoringError, match="triangular"):
        reconstruct_from_anchor(
            HEX, collinear, collinear, Vec2(F(1), F(1, 3)), (F(1), F(1), F(1))
        )
    with pytest.raises(AnchoringError):
        reconstruct_from_anchor(square_linf(), collinear, collinear, Vec2(F(1), F(1)), (1, 1, 1))

    # two distances determined by the same face direction
    m = (Vec2(F(0), F(0)), Vec2(F(0), F(1, 3)), Vec2(F(1, 4), F(1, 6)))
    x = Vec2(F(5), F(1))
    dists = tuple(distance(HEX, x, mi) for mi in m)
    with pytest.raises(AnchoringError, match="parallel"):
        reconstruct_from_anchor(HEX, m, m, x, dists)


def test_reconstruct_rejects_inconsistent_distances():
    rng = np.random.default_rng(7)
    while True:
        try:
            m, w, x, dists, _ = forward_instance(rng, HEX, lambda v: v)
            assert reconstruct_from_anchor(HEX, m, w, x, dists) == x
            break
        except AnchoringError:
            continue
    bad = (dists[0], dists[1], dists[2] + F(1, 7))
    with pytest.raises(AnchoringError):
        reconstruct_from_anchor(HEX, m, w, x, bad)
    scrambled = (w[0] + Vec2(F(1, 3), F(5, 7)), w[1], w[2])
    with pytest.raises(AnchoringError):
        reconstruct_from_anchor(HEX, m, scrambled, x, dists)


def test_reconstruct_smooth_shape():
    rng = np.random.default_rng(9)
    shape = LpShape(2)
    m = (Vec2(0.0, 0.0), Vec2(0.5, 0.1), Vec2(0.2, 0.45))
    t = Vec2(1.25, -0.75)
    w = tuple(Vec2(mi.x + t.x, mi.y + t.y) for mi in m)
    for _ in range(25):
        x = Vec2(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        dists = tuple(distance(shape, x, mi) for mi in m)
        got = reconstruct_from_anchor(shape, m, w, x, dists)
        assert (got.x, got.y) == pytest.approx((x.x + t.x, x.y + t.y), abs=1e-7)


# ---------------------------------------------------------------------------
# good enumerations


def rational_sample(seed, size=F(3, 2), intensity=40.0):
    return sample_poisson_window(
        Window(F(0), F(0), size, size), intensity, seed=seed, mode="rational"
    )


def test_three_point_base_case():
    pts = (Vec2(F(0), F(0)), Vec2(F(1, 2), F(1, 8)), Vec2(F(1, 4), F(2, 5)))
    assert is_triangular_set(HEX, *pts)
    ps = PointSet(pts, Window(F(-1), F(-1), F(1), F(1)), 0, "rational")
    enum = good_enumeration(ps, HEX)
    assert sorted(enum.order) == [0, 1, 2]
    assert enum.certificates == (None, None, None)
    assert enum.unplaced == ()
    validate_good_enumeration(enum)


def test_dense_sample_fully_placed():
    for seed in (1, 4, 5):
        ps = rational_sample(seed)
        enum = good_enumeration(ps, HEX)
        assert enum.unplaced == ()
        assert len(enum.order) == len(ps)
        validate_good_enumeration(enum)
        # consecutive-hop oracle, independent of the validator's loop
        for a, b in zip(enum.order, enum.order[1:]):
            assert distance(HEX, ps[a], ps[b]) < 1


def test_high_intensity_window_fully_placed():
    ps = sample_poisson_window(Window(0.0, 0.0, 1.0, 1.0), 500.0, seed=3)
    enum = good_enumeration(ps, HEX)
    assert enum.unplaced == ()
    validate_good_enumeration(enum)


def test_corner_point_honestly_unplaced():
    # seed 2 puts a point so close to the window corner that every other
    # point determines its distance through the same two faces; no third
    # reference direction exists, so no enumeration could certify it
    ps = rational_sample(2)
    enum = good_enumeration(ps, HEX)
    assert enum.unplaced == (69,)
    validate_good_enumeration(enum)
    gens = []
    for j in range(len(ps)):
        if j == 69:
            continue
        try:
            g = determining_generator(HEX, ps[69] - ps[j])
        except AnchoringError:
            continue
        if all(g.cross(h) != 0 for h in gens):
            gens.append(g)
    assert len(gens) == 2


def test_isolated_point_reported_unplaced():
    ps = rational_sample(4)
    pts = ps.points + (Vec2(F(30), F(30)),)
    far = PointSet(pts, Window(F(0), F(0), F(31), F(31)), 0, "rational")
    enum = good_enumeration(far, HEX)
    assert enum.unplaced == (len(pts) - 1,)
    validate_good_enumeration(enum)


def test_no_anchor_raises():
    pts = (Vec2(F(0), F(0)), Vec2(F(1, 4), F(0)), Vec2(F(1, 2), F(0)))
    ps = PointSet(pts, Window(F(-1), F(-1), F(1), F(1)), 0, "rational")
    with pytest.raises(AnchoringError, match="triangular"):
        good_enumeration(ps, HEX)


def test_box_shape_rejected():
    ps = rational_sample(1)
    with pytest.raises(AnchoringError, match="box"):
        good_enumeration(ps, square_linf())
    enum = good_enumeration(ps, HEX)
    with pytest.raises(AnchoringError, match="box"):
        validate_good_enumeration(dataclasses.replace(enum, shape=square_linf()))


def test_float_and_smooth_enumerations():
    ps = sample_poisson_window(Window(0.0, 0.0, 1.5, 1.5), 40.0, seed=6)
    for shape in (HEX, LpShape(2)):
        enum = good_enumeration(ps, shape)
        validate_good_enumeration(enum)
        assert len(enum.order) + len(enum.unplaced) == len(ps)
        assert len(enum.unplaced) <= 1


def test_validator_catches_corruption():
    ps = rational_sample(8)
    enum = good_enumeration(ps, HEX)
    order = list(enum.order)
    order[4], order[-1] = order[-1], order[4]
    with pytest.raises(AnchoringError):
        validate_good_enumeration(dataclasses.replace(enum, order=tuple(order)))

    certs = list(enum.certificates)
    good = certs[5]
    certs[5] = Certificate(good.refs, (good.generators[0],) * 3)
    with pytest.raises(AnchoringError):
        validate_good_enumeration(
            dataclasses.replace(enum, certificates=tuple(certs))
        )

    with pytest.raises(AnchoringError, match="partition"):
        validate_good_enumeration(dataclasses.replace(enum, unplaced=(0,)))


def test_certificate_position_validation():
    with pytest.raises(AnchoringError):
        Certificate((2, 1, 0), (Vec2(F(1), F(0)),) * 3)
