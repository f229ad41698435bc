"""Primitive shapes: polygons, disks, arcs, chains, and JSON round-trips."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cheegerlab.errors import (
    DegenerateAreaError,
    InputError,
    SelfIntersectingError,
    TooFewVerticesError,
)
from cheegerlab.geometry import (
    Arc,
    ArcPolygon,
    Disk,
    Polygon,
    Segment,
    contact_length,
    domain_from_json_dict,
    measure,
    validate_polygon,
)


def circle_chain(center, r):
    return ArcPolygon([Arc(center, r, 0.0, math.pi), Arc(center, r, math.pi, math.pi)])


class TestPolygon:
    def test_square_measures(self, square):
        assert square.area == 1.0
        assert square.perimeter == 4.0
        assert square.n_vertices == 4
        assert square.is_convex()
        assert square.reflex_vertices().size == 0

    def test_orientation_normalized(self):
        ccw = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        cw = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
        assert ccw.area == cw.area == 1.0
        # both store a counterclockwise (positive shoelace) vertex order
        for poly in (ccw, cw):
            x, y = poly.vertices[:, 0], poly.vertices[:, 1]
            shoelace = np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)
            assert shoelace > 0.0

    def test_lshape_reflex(self, lshape):
        assert lshape.area == 3.0
        assert lshape.perimeter == 8.0
        assert not lshape.is_convex()
        assert list(lshape.reflex_vertices()) == [3]

    def test_containment(self, lshape):
        assert lshape.contains_point((0.5, 0.5))
        assert lshape.contains_point((0.5, 1.5))
        assert not lshape.contains_point((1.5, 1.5))
        got = lshape.contains_points([(0.5, 0.5), (1.5, 1.5), (3.0, 0.0)])
        assert got.tolist() == [True, False, False]

    def test_boundary_distance(self, square):
        assert square.boundary_distance((0.5, 0.5)) == pytest.approx(0.5, abs=1e-15)
        assert square.boundary_distance((0.25, 0.5)) == pytest.approx(0.25, abs=1e-15)
        d = square.boundary_distances([(0.5, 0.5), (0.1, 0.5)])
        assert d == pytest.approx([0.5, 0.1], abs=1e-15)

    def test_rejects_bad_input(self):
        with pytest.raises(TooFewVerticesError):
            validate_polygon([(0, 0), (1, 0)])
        with pytest.raises(DegenerateAreaError):
            validate_polygon([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(DegenerateAreaError):
            # zero-area bowtie collapses before the crossing test sees it
            validate_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
        with pytest.raises(SelfIntersectingError):
            validate_polygon([(0, 0), (4, 0), (4, 2), (2, -1), (0, 2)])


class TestDisk:
    def test_measures(self, unit_disk):
        chain = unit_disk.as_chain()
        area, perim = measure(chain)
        assert area == pytest.approx(math.pi, rel=1e-15)
        assert perim == pytest.approx(2.0 * math.pi, rel=1e-15)

    def test_containment_and_distance(self):
        d = Disk((1.0, -2.0), 0.5)
        assert d.contains_point((1.2, -2.0))
        assert not d.contains_point((1.6, -2.0))
        assert d.boundary_distance((1.0, -2.0)) == pytest.approx(0.5)
        inside = d.contains_points([(1.0, -2.0), (2.0, -2.0)])
        assert inside.tolist() == [True, False]


class TestArc:
    def test_length_and_endpoints(self):
        a = Arc((0.0, 0.0), 2.0, 0.0, math.pi / 2)
        assert a.length == pytest.approx(math.pi)
        assert a.start == pytest.approx([2.0, 0.0])
        assert a.end == pytest.approx([0.0, 2.0])
        assert a.point_at(0.5) == pytest.approx(
            [2.0 * math.cos(math.pi / 4), 2.0 * math.sin(math.pi / 4)]
        )

    def test_clockwise_sweep(self):
        a = Arc((0.0, 0.0), 1.0, math.pi / 2, -math.pi / 2)
        assert a.start == pytest.approx([0.0, 1.0])
        assert a.end == pytest.approx([1.0, 0.0])
        assert a.length == pytest.approx(math.pi / 2)

    def test_contains_angle(self):
        a = Arc((0.0, 0.0), 1.0, 0.0, math.pi / 2)
        assert a.contains_angle(0.3)
        assert not a.contains_angle(2.0)
        # angles are taken modulo a full turn
        assert a.contains_angle(0.3 + 2.0 * math.pi)


class TestArcPolygon:
    def test_circle_measures(self):
        c = circle_chain((0.5, -0.25), 2.0)
        assert c.area == pytest.approx(math.pi * 4.0, rel=1e-15)
        assert c.perimeter == pytest.approx(4.0 * math.pi, rel=1e-15)

    def test_containment_skew_ray(self):
        # the two half-circle seams lie on the horizontal through the center,
        # which historically double-counted crossings for such queries
        c = circle_chain((0.0, 0.0), 2.0)
        assert c.contains_point((0.0, 0.0))
        assert c.contains_point((1.9, 0.0))
        assert c.contains_point((-1.9, 0.0))
        assert not c.contains_point((2.1, 0.0))
        assert not c.contains_point((0.0, 2.1))

    def test_mixed_chain_area(self):
        # quarter-disk: two radii plus a quarter arc
        q = ArcPolygon(
            [
                Segment((0.0, 0.0), (1.0, 0.0)),
                Arc((0.0, 0.0), 1.0, 0.0, math.pi / 2),
                Segment((0.0, 1.0), (0.0, 0.0)),
            ]
        )
        assert q.area == pytest.approx(math.pi / 4, rel=1e-15)
        assert q.perimeter == pytest.approx(2.0 + math.pi / 2, rel=1e-15)
        assert q.contains_point((0.3, 0.3))
        assert not q.contains_point((0.9, 0.9))

    def test_open_chain_rejected(self):
        from cheegerlab.errors import OpenChainError

        with pytest.raises(OpenChainError):
            ArcPolygon([Segment((0, 0), (1, 0)), Segment((1, 0), (1, 1))])

    def test_dict_roundtrip(self, square):
        chain = ArcPolygon(
            [
                Segment((0.0, 0.0), (1.0, 0.0)),
                Arc((0.0, 0.0), 1.0, 0.0, math.pi / 2),
                Segment((0.0, 1.0), (0.0, 0.0)),
            ]
        )
        back = ArcPolygon.from_dict(chain.to_dict())
        assert back.area == chain.area
        assert back.perimeter == chain.perimeter

    def test_bounding_box_includes_arc_extremes(self):
        c = circle_chain((0.0, 0.0), 1.0)
        box = c.bounding_box()
        assert np.allclose(box, (-1.0, -1.0, 1.0, 1.0))

    def test_contact_length(self, square):
        # the square traced as a chain touches its own boundary everywhere
        assert contact_length(square.as_chain(), square) == pytest.approx(4.0)
        ball = circle_chain((0.5, 0.5), 0.25)
        assert contact_length(ball, square) == pytest.approx(0.0, abs=1e-12)


class TestJson:
    def test_polygon_roundtrip(self, lshape):
        obj = lshape.to_json_dict()
        back = domain_from_json_dict(obj)
        assert isinstance(back, Polygon)
        assert np.array_equal(back.vertices, lshape.vertices)

    def test_disk_roundtrip(self):
        d = Disk((0.5, 0.5), 2.0)
        back = domain_from_json_dict(d.to_json_dict())
        assert isinstance(back, Disk)
        assert tuple(back.center) == (0.5, 0.5)
        assert back.radius == 2.0

    def test_rejects_unknown_shape(self):
        with pytest.raises(InputError):
            domain_from_json_dict({"blob": 1})
        with pytest.raises(InputError):
            domain_from_json_dict({"disk": {"center": [0, 0], "radius": -1.0}})


@settings(max_examples=60, deadline=None)
@given(
    w=st.floats(0.1, 50.0),
    h=st.floats(0.1, 50.0),
    x0=st.floats(-100.0, 100.0),
    y0=st.floats(-100.0, 100.0),
)
def test_rectangle_measures_property(w, h, x0, y0):
    poly = Polygon([(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)])
    # shoelace cancellation for far-offset rectangles costs ~scale^2 * eps
    scale = max(1.0, abs(x0) + w, abs(y0) + h)
    assert poly.area == pytest.approx(w * h, abs=1e-12 * scale * scale)
    assert poly.perimeter == pytest.approx(2 * (w + h), rel=1e-12)
    assert poly.contains_point((x0 + w / 2, y0 + h / 2))
