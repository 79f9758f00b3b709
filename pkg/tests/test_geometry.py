import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invsource import geometry as g


def test_boundary_point_examples():
    np.testing.assert_allclose(g.boundary_point(g.Ellipse(a=1, b=1), 0.0), (1.0, 0.0), atol=1e-15)
    np.testing.assert_allclose(g.boundary_point(g.RoundSquare(r=0.8), 0.0), (1.6, 0.0), atol=1e-15)
    np.testing.assert_allclose(g.boundary_point(g.Kite(r=1, a=0.65, b=1.5), np.pi), (-1.0, 0.0), atol=1e-14)


def test_boundary_point_center_offset():
    p = g.boundary_point(g.Peanut(center=(3.0, -1.0)), 0.0)
    np.testing.assert_allclose(p, (3.0 + np.sqrt(2.0), -1.0), atol=1e-14)


def test_contains_examples():
    assert g.Ball().contains((0.0, 0.0, 0.0))
    assert not g.Cube(r=1.0).contains((1.5, 0.0, 0.0))
    u = g.Union(g.Peanut(center=(3.0, 3.0)), g.Kite(center=(-3.0, -3.0)))
    assert u.contains((3.0, 3.0))
    assert not u.contains((0.0, 0.0))


def test_support_extent_examples():
    e = g.support_extent(g.Ball(), (1.0, 0.0, 0.0))
    assert (e.lo, e.hi) == (-1.0, 1.0)
    e = g.support_extent(g.Cube(r=1.0), (1.0, 0.0, 0.0))
    assert (e.lo, e.hi) == (-1.0, 1.0)
    e = g.support_extent(g.RoundSquare(r=0.8), (1.0, 0.0))
    assert e.lo == pytest.approx(-1.6, abs=1e-12) and e.hi == pytest.approx(1.6, abs=1e-12)


def test_support_extent_rejects_non_unit():
    with pytest.raises(g.GeometryError):
        g.Peanut().support_extent((1.0, 1.0))


def test_distance_extent_examples():
    for x in [(3.0, 0.0, 0.0), (0.0, 3.0, 0.0)]:
        e = g.distance_extent(g.Ball(), x)
        assert e.lo == pytest.approx(2.0, abs=1e-15) and e.hi == pytest.approx(4.0, abs=1e-15)
    e = g.distance_extent(g.Cube(r=1.0), (3.0, 0.0, 0.0))
    assert e.lo == pytest.approx(2.0) and e.hi == pytest.approx(np.sqrt(18.0), abs=1e-14)


def test_distance_extent_receiver_inside():
    with pytest.raises(g.GeometryError):
        g.Ball().distance_extent((0.5, 0.0, 0.0))
    with pytest.raises(g.GeometryError):
        g.Disk().distance_extent((0.2, 0.1))


def test_distance_extent_curve():
    e = g.Disk().distance_extent((3.0, 0.0))
    assert e.lo == pytest.approx(2.0, abs=1e-9) and e.hi == pytest.approx(4.0, abs=1e-9)


def test_separation_examples():
    u = g.Union(g.Disk((-3.0, 0.0)), g.Disk((3.0, 0.0)))
    assert g.separation_condition(u, (1.0, 0.0), 1.0) is g.Separation.HOLDS_A
    assert g.separation_condition(u, (-1.0, 0.0), 1.0) is g.Separation.HOLDS_B
    assert g.separation_condition(u, (1.0, 0.0), 5.0) is g.Separation.FAILS
    for T in (0.1, 1.0, 10.0):
        assert g.separation_condition(u, (0.0, 1.0), T) is g.Separation.FAILS


def test_separation_needs_union():
    with pytest.raises(g.GeometryError):
        g.separation_condition(g.Disk(), (1.0, 0.0), 1.0)


def test_union_rejects_overlap():
    with pytest.raises(g.GeometryError):
        g.Union(g.Disk((0.0, 0.0)), g.Disk((0.5, 0.0)))


def test_union_extent_is_componentwise():
    a, b = g.Peanut(center=(3.0, 3.0)), g.Kite(center=(-3.0, -3.0))
    u = g.Union(a, b)
    d = (np.cos(0.3), np.sin(0.3))
    ea, eb, eu = a.support_extent(d), b.support_extent(d), u.support_extent(d)
    assert eu.lo == min(ea.lo, eb.lo) and eu.hi == max(ea.hi, eb.hi)


def test_make_shape():
    assert g.make_shape({"kind": "Peanut"}) == g.Peanut()
    assert g.make_shape({"kind": "Disk", "r": 2.0}) == g.Disk(radius=2.0)
    u = g.make_shape(g.Union(g.Disk((-3.0, 0.0)), g.Disk((3.0, 0.0))).describe())
    assert isinstance(u, g.Union)
    with pytest.raises(g.UnsupportedShapeError):
        g.make_shape({"kind": "Torus"})
    with pytest.raises(g.GeometryError):
        g.make_shape({"kind": "Peanut", "zz": 1})


def test_extent_refinement_monotone():
    # convex shape: the discrepancy to a fine reference does not grow as samples double
    shape, d = g.Ellipse(a=1.3, b=0.7), (np.cos(0.37), np.sin(0.37))
    ref = shape.support_extent(d, 1 << 16).hi
    errs = [abs(shape.support_extent(d, m).hi - ref) for m in (16, 32, 64, 128)]
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
    exact = np.hypot(1.3 * d[0], 0.7 * d[1])
    assert ref == pytest.approx(exact, abs=1e-10)


CURVES = [g.Peanut(), g.RoundSquare(r=0.8), g.Kite(), g.Ellipse(a=1.5, b=0.6)]


@pytest.mark.parametrize("shape", CURVES, ids=lambda s: s.kind)
@settings(max_examples=100, deadline=None)
@given(t=st.floats(0.0, 2 * np.pi), phi=st.floats(0.0, 2 * np.pi))
def test_extent_projection_symmetry(shape, t, phi):
    d = np.array([np.cos(phi), np.sin(phi)])
    assert shape.support_extent(d).lo == pytest.approx(-shape.support_extent(-d).hi, abs=1e-12)


@pytest.mark.parametrize("shape", CURVES, ids=lambda s: s.kind)
@settings(max_examples=100, deadline=None)
@given(t=st.floats(0.0, 2 * np.pi))
def test_shrink_grow_membership(shape, t):
    c = np.asarray(shape.center)
    p = np.asarray(shape.boundary_point(t))
    assert shape.contains(c + 0.99 * (p - c))
    assert not shape.contains(c + 1.01 * (p - c))


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0.0, np.pi), phi=st.floats(0.0, 2 * np.pi))
def test_shrink_grow_ball(theta, phi):
    b = g.Ball((0.5, -0.2, 0.1), 0.8)
    c = np.asarray(b.center)
    p = b.boundary_point((theta, phi))
    assert b.contains(c + 0.99 * (p - c)) and not b.contains(c + 1.01 * (p - c))


@settings(max_examples=100, deadline=None)
@given(face=st.integers(0, 5), u=st.floats(-1, 1), v=st.floats(-1, 1))
def test_shrink_grow_cube(face, u, v):
    c = g.Cube((0.2, 0.0, -0.3), 0.5)
    p = c.boundary_point((face, u, v))
    ctr = np.asarray(c.center)
    assert c.contains(ctr + 0.99 * (p - ctr)) and not c.contains(ctr + 1.01 * (p - ctr))


def test_strip_and_annulus_masks():
    pts = np.array([[0.0, 5.0], [2.0, 0.0], [-1.5, 0.0]])
    m = g.strip_mask(g.Disk(), [(1.0, 0.0)], pts)
    assert m.tolist() == [True, False, False]
    m = g.strip_mask(g.Disk(), [(1.0, 0.0)], pts, margin=-0.6)
    assert m.tolist() == [True, False, True]
    pts3 = np.array([[0.0, 0.0, 0.0], [3.5, 0.0, 0.0], [0.0, 0.0, 2.0]])
    a = g.annulus_mask(g.Ball(), [(3.0, 0.0, 0.0)], pts3)
    assert a.tolist() == [True, False, True]
