"""Erosion, inradius, rolling, and the no-neck check."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cheegerlab.errors import RadiusExceedsInradiusError
from cheegerlab.geometry import Disk, Polygon
from cheegerlab.offsets import (
    Kernel,
    erode,
    inradius,
    no_neck_check,
    opened,
    roll,
    roll_kernel,
)


class TestInradius:
    def test_square(self, square):
        res = inradius(square)
        assert res.radius == pytest.approx(0.5, abs=1e-14)
        assert res.segment is None
        assert np.allclose(res.witnesses, [(0.5, 0.5)])

    def test_rectangle_kernel_segment(self, rect2x1):
        res = inradius(rect2x1)
        assert res.radius == pytest.approx(0.5, abs=1e-13)
        assert res.segment is not None
        ends = sorted(tuple(map(float, p)) for p in res.segment)
        assert ends[0] == pytest.approx((0.5, 0.5), abs=1e-12)
        assert ends[1] == pytest.approx((1.5, 0.5), abs=1e-12)
        assert res.kernel.is_segment
        assert res.kernel.length == pytest.approx(1.0, abs=1e-12)

    def test_lshape(self, lshape):
        # the inscribed disk wedges into the reflex corner: R = 2 - sqrt(2)
        res = inradius(lshape)
        assert res.radius == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-12)
        assert np.allclose(res.witnesses, [(res.radius, res.radius)], atol=1e-10)

    def test_disk(self):
        res = inradius(Disk((2.0, -1.0), 0.75))
        assert res.radius == 0.75
        assert res.witnesses == ((2.0, -1.0),)


class TestErode:
    def test_square_closed_form(self, square):
        for r in (0.05, 0.2, 0.4):
            body = erode(square, r)
            assert len(body.components) == 1
            assert body.area == pytest.approx((1 - 2 * r) ** 2, abs=1e-14)
            assert body.perimeter == pytest.approx(4 * (1 - 2 * r), abs=1e-14)

    def test_zero_radius_is_identity(self, lshape):
        body = erode(lshape, 0.0)
        assert body.area == pytest.approx(lshape.area, abs=1e-14)
        assert body.perimeter == pytest.approx(lshape.perimeter, abs=1e-14)

    def test_at_inradius_degenerates_to_kernel(self, square):
        body = erode(square, 0.5)
        assert body.is_degenerate
        assert body.kernel.points == ((0.5, 0.5),)

    def test_beyond_inradius_rejected(self, square):
        with pytest.raises(RadiusExceedsInradiusError):
            erode(square, 0.7)

    def test_lshape_stays_connected(self, lshape):
        R = inradius(lshape).radius
        for r in np.linspace(0.05, 0.95 * R, 7):
            body = erode(lshape, float(r))
            assert len(body.components) == 1

    def test_dumbbell_disconnects(self, dumbbell):
        body = erode(dumbbell, 0.2)
        assert len(body.components) == 2

    def test_disk(self):
        body = erode(Disk((0.0, 0.0), 1.0), 0.25)
        assert body.area == pytest.approx(math.pi * 0.75**2, rel=1e-12)


class TestRoll:
    def test_square_steiner(self, square):
        # dilation of the eroded square: V = A_er + P_er r + pi r^2
        for r in (0.1, 0.25, 0.45):
            body = erode(square, r)
            chains = roll(body, r, scale=square.scale)
            assert len(chains) == 1
            v_exact = 1.0 - (4.0 - math.pi) * r * r
            p_exact = 4.0 - (8.0 - 2.0 * math.pi) * r
            assert chains[0].area == pytest.approx(v_exact, abs=1e-13)
            assert chains[0].perimeter == pytest.approx(p_exact, abs=1e-13)

    def test_opened_equals_roll_of_erosion(self, lshape):
        r = 0.3
        by_hand = roll(erode(lshape, r), r, scale=lshape.scale)
        direct = opened(lshape, r)
        assert len(direct) == len(by_hand) == 1
        assert direct[0].area == pytest.approx(by_hand[0].area, abs=1e-14)

    def test_rolled_lshape_inside_domain(self, lshape):
        chain = opened(lshape, 0.3)[0]
        for q in chain.sample_boundary(8):
            assert lshape.boundary_distance(q) > -1e-9
            assert lshape.contains_point(q) or lshape.boundary_distance(q) < 1e-9

    def test_kernel_ball(self):
        chain = roll_kernel(Kernel(points=((1.0, 2.0),)), 0.5)
        assert chain.area == pytest.approx(math.pi * 0.25, rel=1e-14)
        assert chain.perimeter == pytest.approx(math.pi, rel=1e-14)

    def test_kernel_stadium(self):
        seg = ((0.0, 0.0), (1.0, 0.0))
        chain = roll_kernel(Kernel(points=seg, segment=seg), 0.5)
        assert chain.area == pytest.approx(math.pi * 0.25 + 1.0, rel=1e-14)
        assert chain.perimeter == pytest.approx(math.pi + 2.0, rel=1e-14)

    def test_coarea_rate(self, lshape):
        # d(volume)/dr along the rolled family equals minus the free length;
        # for small dr compare against the erosion perimeter based formula
        r, dr = 0.3, 1e-7
        lo = roll(erode(lshape, r - dr), r - dr, scale=lshape.scale)[0]
        hi = roll(erode(lshape, r + dr), r + dr, scale=lshape.scale)[0]
        dv = (hi.area - lo.area) / (2 * dr)
        mid = erode(lshape, r)
        # V(r) = A_er + P_er r + pi r^2 and dA_er/dr = -P_er gives
        # dV/dr = r dP_er/dr + 2 pi r, the signed curvature rate
        d_per = (erode(lshape, r + dr).perimeter - erode(lshape, r - dr).perimeter) / (2 * dr)
        assert dv == pytest.approx(r * d_per + 2 * math.pi * r, abs=1e-5)


class TestNoNeck:
    def test_passes_on_reference_domains(self, square, lshape, plus_shape, glued_arm):
        for dom in (square, lshape, plus_shape, glued_arm):
            rep = no_neck_check(dom)
            assert rep.passed
            assert rep.max_components == 1

    def test_fails_on_dumbbell(self, dumbbell):
        rep = no_neck_check(dumbbell)
        assert not rep.passed
        assert rep.max_components == 2
        assert len(rep.critical_radii) >= 1
        # the neck is 0.1 wide, so erosion splits just below r = 0.05
        assert rep.critical_radii[0] == pytest.approx(0.05, abs=1e-3)

    def test_disk_trivially_passes(self):
        rep = no_neck_check(Disk((0.0, 0.0), 1.0))
        assert rep.passed


@settings(max_examples=40, deadline=None)
@given(
    w=st.floats(0.5, 10.0),
    h=st.floats(0.5, 10.0),
    frac=st.floats(0.05, 0.9),
)
def test_rectangle_erosion_steiner_property(w, h, frac):
    rect = Polygon([(0, 0), (w, 0), (w, h), (0, h)])
    R = min(w, h) / 2.0
    r = frac * R
    body = erode(rect, r)
    assert body.area == pytest.approx((w - 2 * r) * (h - 2 * r), rel=1e-11)
    chain = roll(body, r, scale=rect.scale)[0]
    v = body.area + body.perimeter * r + math.pi * r * r
    assert chain.area == pytest.approx(v, rel=1e-11)
