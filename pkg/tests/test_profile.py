"""The rolled-family profile: I(V), curvature, plateaus, and F(kappa)."""
import math

import numpy as np
import pytest

from cheegerlab.errors import (
    KappaBelowInverseInradiusError,
    NeckDetectedError,
    VolumeBelowInballError,
)
from cheegerlab.geometry import Disk, Polygon
from cheegerlab.profile import build_profile, plateau_energy_probe

SQUARE_H1 = 2.0 + math.sqrt(math.pi)
RECT_H1 = (6.0 + math.sqrt(4.0 + 8.0 * math.pi)) / 4.0
# frozen reference values for nonconvex domains (no closed form)
LSHAPE_H1 = 2.525016198069945
PLUS_H1 = 2.2472044028917746
GLUED_ARM_H1 = 1.8859098045511116
GLUED_ARM_R1 = 0.5302480519411809
SQUARE_MVOL = 0.9396821914627624
RECT_MVOL = 1.8942705245393618


class TestCheegerConstant:
    def test_square_closed_form(self, square_profile):
        # the Cheeger radius solves (1-2r)^2 = pi r^2, hence H = 2 + sqrt(pi)
        assert square_profile.cheeger_constant == pytest.approx(SQUARE_H1, rel=1e-12)
        r1 = 1.0 / square_profile.cheeger_constant
        assert (1 - 2 * r1) ** 2 == pytest.approx(math.pi * r1 * r1, abs=1e-14)

    def test_rectangle_closed_form(self, rect_profile):
        assert rect_profile.cheeger_constant == pytest.approx(RECT_H1, rel=1e-13)

    def test_disk(self, disk_profile):
        assert disk_profile.cheeger_constant == pytest.approx(2.0, rel=1e-13)

    def test_lshape_frozen(self, lshape_profile):
        assert lshape_profile.cheeger_constant == pytest.approx(LSHAPE_H1, rel=1e-12)

    def test_plus_frozen(self, plus_shape):
        prof = build_profile(plus_shape)
        assert prof.cheeger_constant == pytest.approx(PLUS_H1, rel=1e-12)

    def test_glued_arm_frozen(self, glued_arm_profile):
        assert glued_arm_profile.cheeger_constant == pytest.approx(
            GLUED_ARM_H1, rel=1e-12
        )
        r1 = 1.0 / glued_arm_profile.cheeger_constant
        assert r1 == pytest.approx(GLUED_ARM_R1, rel=1e-12)

    def test_cheeger_volume_range(self, square_profile, rect_profile):
        lo, hi = square_profile.cheeger_volume_range()
        assert lo == pytest.approx(SQUARE_MVOL, rel=1e-12)
        assert hi == pytest.approx(SQUARE_MVOL, rel=1e-12)
        lo, hi = rect_profile.cheeger_volume_range()
        assert lo == pytest.approx(RECT_MVOL, rel=1e-12)
        assert hi == pytest.approx(RECT_MVOL, rel=1e-12)


class TestFamily:
    def test_square_volume_closed_form(self, square_profile):
        for r in (0.05, 0.17, 0.33, 0.49):
            pt = square_profile.point(r)
            assert pt.volume == pytest.approx(1 - (4 - math.pi) * r * r, abs=1e-13)
            assert pt.perimeter == pytest.approx(4 - (8 - 2 * math.pi) * r, abs=1e-13)
            assert pt.erosion_area == pytest.approx((1 - 2 * r) ** 2, abs=1e-13)
            assert pt.n_components == 1

    def test_radius_of_volume_inverts(self, square_profile):
        for v in (0.8, 0.9, 0.99):
            r = square_profile.radius_of_volume(v)
            assert r == pytest.approx(math.sqrt((1 - v) / (4 - math.pi)), abs=1e-12)

    def test_minimizer_chain_matches_volume(self, square_profile):
        r = 0.3
        chains = square_profile.minimizer(r)
        assert len(chains) == 1
        assert chains[0].area == pytest.approx(square_profile.volume(r), abs=1e-13)

    def test_free_and_contact_split(self, rect_profile):
        free, contact = rect_profile.free_and_contact(0.3)
        assert free == pytest.approx(2 * math.pi * 0.3, rel=1e-12)
        assert contact == pytest.approx(3.6, rel=1e-12)
        assert free + contact == pytest.approx(rect_profile.perimeter(0.3), rel=1e-12)

    def test_volume_bounds(self, square_profile, disk_profile):
        assert square_profile.volume_lower == pytest.approx(math.pi / 4, rel=1e-12)
        assert square_profile.volume_upper == pytest.approx(1.0, rel=1e-9)
        # the disk profile degenerates to the single inscribed-ball volume
        assert disk_profile.volume_lower == pytest.approx(math.pi, rel=1e-12)
        assert disk_profile.volume_upper == pytest.approx(math.pi, rel=1e-12)


class TestIsoperimetricProfile:
    def test_square_values(self, square_profile):
        # I(V) on the rolled branch: r(V) from the Steiner inverse
        for v in (0.82, 0.9, 0.97):
            r = math.sqrt((1 - v) / (4 - math.pi))
            expect = 4 - (8 - 2 * math.pi) * r
            assert square_profile.least_perimeter(v) == pytest.approx(expect, abs=1e-12)

    def test_ball_regime_flag(self, square_profile):
        v = 0.5  # below the inball volume pi/4... actually above; use 0.3
        v = 0.3
        with pytest.raises(VolumeBelowInballError):
            square_profile.least_perimeter(v)
        assert square_profile.least_perimeter(v, ball_regime=True) == pytest.approx(
            2 * math.sqrt(math.pi * v), rel=1e-13
        )
        assert square_profile.curvature_of_volume(v, ball_regime=True) == pytest.approx(
            math.sqrt(math.pi / v), rel=1e-13
        )

    def test_derivative_is_curvature(self, square_profile, rect_profile, lshape_profile):
        for prof in (square_profile, rect_profile, lshape_profile):
            vlo, vhi = prof.volume_lower, prof.domain.area
            for v in np.linspace(vlo + 0.07 * (vhi - vlo), vhi - 0.07 * (vhi - vlo), 6):
                d = 1e-6 * (vhi - vlo)
                num = (prof.least_perimeter(v + d) - prof.least_perimeter(v - d)) / (2 * d)
                assert num == pytest.approx(prof.curvature_of_volume(float(v)), abs=1e-5)

    def test_monotone_in_volume(self, lshape_profile):
        vs = np.linspace(lshape_profile.volume_lower * 1.001, lshape_profile.domain.area, 40)
        ps = [lshape_profile.least_perimeter(float(v)) for v in vs]
        assert all(b > a - 1e-12 for a, b in zip(ps, ps[1:]))


class TestPlateaus:
    def test_square_has_none(self, square_profile):
        assert square_profile.plateaus == ()

    def test_rectangle_stadium_branch(self, rect_profile):
        assert len(rect_profile.plateaus) == 1
        pl = rect_profile.plateaus[0]
        assert pl.at_inradius
        assert pl.kappa == pytest.approx(2.0, rel=1e-12)
        assert pl.volume_low == pytest.approx(math.pi / 4, rel=1e-12)
        assert pl.volume_high == pytest.approx(math.pi / 4 + 1.0, rel=1e-12)
        assert pl.perimeter_low == pytest.approx(math.pi, rel=1e-12)
        assert pl.perimeter_high == pytest.approx(math.pi + 2.0, rel=1e-12)

    def test_stadium_profile_is_linear(self, rect_profile):
        # I(V) = pi + 2 (V - pi/4) between the inball and the full stadium
        for v in (0.9, 1.2, 1.6):
            expect = math.pi + 2.0 * (v - math.pi / 4)
            assert rect_profile.least_perimeter(v) == pytest.approx(expect, abs=1e-12)
            assert rect_profile.curvature_of_volume(v) == pytest.approx(2.0, abs=1e-12)

    def test_stadium_minimizer_constructed(self, rect_profile):
        chains, note = rect_profile.minimizer_of_volume(1.2)
        assert note is None
        assert len(chains) == 1
        assert chains[0].area == pytest.approx(1.2, abs=1e-12)

    def test_glued_arm_interior_plateau(self, glued_arm_profile):
        interior = [p for p in glued_arm_profile.plateaus if not p.at_inradius]
        assert len(interior) == 1
        pl = interior[0]
        # the arm (width 0.2) drops out of the erosion at r = 0.1
        assert pl.kappa == pytest.approx(10.0, rel=1e-9)
        assert pl.volume_high - pl.volume_low > 0.5
        probe_sub = plateau_energy_probe(glued_arm_profile, pl, 0.75)
        probe_super = plateau_energy_probe(glued_arm_profile, pl, 2.0)
        assert probe_sub > 0.0
        assert probe_super < 0.0

    def test_plateau_of_volume_lookup(self, rect_profile):
        pl = rect_profile.plateau_of_volume(1.0)
        assert pl is not None and pl.at_inradius
        assert rect_profile.plateau_of_volume(1.95) is None


class TestCurvatureEnergy:
    def test_square_closed_form(self, square_profile):
        # F(kappa) = (pi r^2 - (1-2r)^2)/r at r = 1/kappa
        for kappa in (2.5, 4.0, 8.0):
            r = 1.0 / kappa
            expect = (math.pi * r * r - (1 - 2 * r) ** 2) / r
            assert square_profile.curvature_energy(kappa) == pytest.approx(
                expect, abs=1e-12
            )

    def test_sign_switch_at_cheeger_constant(self, square_profile, lshape_profile):
        for prof in (square_profile, lshape_profile):
            h1 = prof.cheeger_constant
            delta = 1e-6 * h1
            assert prof.curvature_energy(h1 - delta) > 0.0
            assert prof.curvature_energy(h1 + delta) < 0.0

    def test_strictly_decreasing(self, lshape_profile):
        ks = np.linspace(1.05 / lshape_profile.R, 12.0, 25)
        fs = [lshape_profile.curvature_energy(float(k)) for k in ks]
        assert all(b < a for a, b in zip(fs, fs[1:]))

    def test_below_inverse_inradius_rejected(self, square_profile):
        with pytest.raises(KappaBelowInverseInradiusError):
            square_profile.curvature_energy(1.9)
        with pytest.raises(KappaBelowInverseInradiusError):
            square_profile.curvature_minimizer(1.9)

    def test_minimizer_roundtrip(self, square_profile, rect_profile):
        for prof in (square_profile, rect_profile):
            for kappa in (2.7, 3.4, 6.0, 20.0):
                chains = prof.curvature_minimizer(kappa)
                v = sum(c.area for c in chains)
                assert prof.curvature_of_volume(v) == pytest.approx(kappa, rel=1e-11)

    def test_minimizer_value_consistent(self, square_profile):
        kappa = 5.0
        chains = square_profile.curvature_minimizer(kappa)
        value = sum(c.perimeter for c in chains) - kappa * sum(c.area for c in chains)
        assert value == pytest.approx(square_profile.curvature_energy(kappa), abs=1e-12)


class TestKappaBar:
    def test_disk_fills_at_inverse_radius(self, disk_profile):
        assert disk_profile.kappa_bar() == pytest.approx(1.0, abs=1e-12)

    def test_polygon_never_fills(self, square_profile, lshape_profile):
        # corners always get rounded off, so no finite curvature recovers
        # the whole polygon
        assert math.isinf(square_profile.kappa_bar())
        assert math.isinf(lshape_profile.kappa_bar())


class TestNeckGate:
    def test_dumbbell_raises(self, dumbbell):
        with pytest.raises(NeckDetectedError):
            build_profile(dumbbell)

    def test_dumbbell_opt_out(self, dumbbell):
        prof = build_profile(dumbbell, check_necks=False)
        assert prof.cheeger_constant > 0.0

    def test_too_few_radii_rejected(self, square):
        with pytest.raises(ValueError):
            build_profile(square, n_radii=4)
