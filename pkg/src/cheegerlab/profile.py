"""Volume profile of the rolled family and the maps derived from it.

For a domain without necks, the sets obtained by eroding to radius r and
dilating back (the rolled family) sweep out every optimal shape at once:
their volume V(r) is non-increasing in r, the least boundary length at
volume V is the rolled perimeter at the matching radius, and the free
boundary curvature is 1/r.  Volume jumps (thin features vanishing at a
critical radius) become linear stretches of the least-perimeter function
at fixed curvature; these plateaus are detected by a jump scan plus
bisection and handled explicitly by every query.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    EmptyProfileError,
    KappaBelowInverseInradiusError,
    NeckDetectedError,
    RootNotBracketedError,
    VolumeBelowInballError,
    VolumeOutOfRangeError,
)
from .geometry import Arc, ArcPolygon, Disk, Domain, contact_length, geom_tol
from .offsets import (
    InradiusResult,
    Kernel,
    erode,
    inradius,
    no_neck_check,
    roll,
    roll_kernel,
)

N_RADII = 512
JUMP_REL = 1e-6          # confirmed jump must exceed this fraction of |domain|
RADIUS_SPLIT_REL = 1e-11  # bisection width target for critical radii, vs R
RADIUS_FLOOR_REL = 1e-9   # smallest queryable radius, vs R


@dataclass(frozen=True)
class Plateau:
    """Linear stretch of the least-perimeter map at fixed curvature."""

    radius: float
    kappa: float
    volume_low: float
    volume_high: float
    perimeter_low: float
    perimeter_high: float
    at_inradius: bool = False

    def covers(self, volume: float, slack: float = 0.0) -> bool:
        return self.volume_low - slack <= volume <= self.volume_high + slack

    @property
    def gap(self) -> float:
        return self.volume_high - self.volume_low


@dataclass(frozen=True)
class FamilyPoint:
    """Exact measurements of one member of the rolled family."""

    radius: float
    volume: float
    perimeter: float
    erosion_area: float
    erosion_perimeter: float
    n_components: int


class VolumeProfile:
    """Volume/perimeter data of the rolled family, with exact queries.

    Grid values are only used for bracketing; every reported number comes
    from a fresh exact erosion at the queried radius.
    """

    def __init__(
        self,
        domain: Domain,
        n_radii: int = N_RADII,
        check_necks: bool = True,
        neck_samples: int = 256,
    ):
        self.domain = domain
        self.inradius_result: InradiusResult = inradius(domain)
        self.R = self.inradius_result.radius
        self.neck_report = None
        if check_necks:
            self.neck_report = no_neck_check(
                domain, n_samples=neck_samples, inr=self.inradius_result
            )
            if not self.neck_report.passed:
                radii = ", ".join(
                    f"{float(r):.9g}" for r in self.neck_report.critical_radii
                )
                raise NeckDetectedError(
                    f"erosion disconnects at radii {radii}; "
                    "pass check_necks=False to study components anyway"
                )
        if n_radii < 8:
            raise ValueError("need at least 8 profile radii")
        self._cache: dict[float, FamilyPoint] = {}
        self.r_grid = np.linspace(
            self.R / n_radii, self.R * (1.0 - RADIUS_FLOOR_REL), n_radii
        )
        pts = [self.point(r) for r in self.r_grid]
        self.volumes = np.array([p.volume for p in pts])
        self.perimeters = np.array([p.perimeter for p in pts])
        self.erosion_areas = np.array([p.erosion_area for p in pts])
        self.erosion_perimeters = np.array([p.erosion_perimeter for p in pts])
        self.component_counts = np.array([p.n_components for p in pts])
        if not self.volumes.size:
            raise EmptyProfileError("no profile points")
        self.plateaus = self._detect_plateaus()
        self.cheeger_constant, self.cheeger_radius = self._solve_cheeger()

    # -- exact evaluation ---------------------------------------------------

    def point(self, r: float) -> FamilyPoint:
        r = float(r)
        hit = self._cache.get(r)
        if hit is not None:
            return hit
        body = erode(self.domain, r, inr=self.inradius_result)
        if body.is_degenerate:
            chains = roll(body, r, scale=self.domain.scale)
            n = len(chains)
            pt = FamilyPoint(
                radius=r,
                volume=float(sum(c.area for c in chains)),
                perimeter=float(sum(c.perimeter for c in chains)),
                erosion_area=0.0,
                erosion_perimeter=0.0,
                n_components=n,
            )
        else:
            chains = roll(body, r, scale=self.domain.scale)
            pt = FamilyPoint(
                radius=r,
                volume=float(sum(c.area for c in chains)),
                perimeter=float(sum(c.perimeter for c in chains)),
                erosion_area=body.area,
                erosion_perimeter=body.perimeter,
                n_components=len(body.components),
            )
        self._cache[r] = pt
        return pt

    def volume(self, r: float) -> float:
        return self.point(r).volume

    def perimeter(self, r: float) -> float:
        return self.point(r).perimeter

    def minimizer(self, r: float) -> list[ArcPolygon]:
        """Rolled set at radius r, one closed chain per component."""
        body = erode(self.domain, r, inr=self.inradius_result)
        return roll(body, r, scale=self.domain.scale)

    def free_and_contact(self, r: float) -> tuple[float, float]:
        """(free boundary length, boundary-contact length) at radius r."""
        chains = self.minimizer(r)
        tol = 1e3 * geom_tol(self.domain.scale)
        free = sum(
            el.length
            for c in chains
            for el in c.elements
            if isinstance(el, Arc) and abs(el.radius - r) <= tol
        )
        contact = sum(contact_length(c, self.domain) for c in chains)
        return float(free), float(contact)

    # -- plateaus -------------------------------------------------------------

    def _detect_plateaus(self) -> tuple:
        area = self.domain.area
        r, V, P = self.r_grid, self.volumes, self.perimeters
        found = []
        for i in range(len(r) - 1):
            dr = r[i + 1] - r[i]
            smooth = 8.0 * max(P[i], P[i + 1]) * dr + 1e-9 * area
            if V[i] - V[i + 1] <= smooth:
                continue
            lo, hi = float(r[i]), float(r[i + 1])
            v_lo_side, v_hi_side = float(V[i]), float(V[i + 1])
            while hi - lo > RADIUS_SPLIT_REL * self.R:
                mid = 0.5 * (lo + hi)
                vm = self.volume(mid)
                if v_lo_side - vm >= vm - v_hi_side:
                    hi, v_hi_side = mid, vm
                else:
                    lo, v_lo_side = mid, vm
            if v_lo_side - v_hi_side <= JUMP_REL * area:
                continue  # steep but continuous (square-root cusp)
            rc = 0.5 * (lo + hi)
            found.append(
                Plateau(
                    radius=rc,
                    kappa=1.0 / rc,
                    volume_low=v_hi_side,
                    volume_high=v_lo_side,
                    perimeter_low=self.perimeter(hi),
                    perimeter_high=self.perimeter(lo),
                    at_inradius=False,
                )
            )
        found.extend(self._inradius_branch())
        return tuple(sorted(found, key=lambda p: p.radius))

    def _inradius_branch(self) -> list:
        """Plateau at the inradius when the kernel is not a single point.

        Shrinking the innermost body toward a point trades volume for
        perimeter linearly at curvature 1/R, ending at an inscribed ball.
        """
        area = self.domain.area
        kernel = self.inradius_result.kernel
        n_k = 1 if kernel.is_segment else max(1, len(kernel.points))
        v_low = n_k * math.pi * self.R**2
        end = self.point(float(self.r_grid[-1]))
        at_R = self.point(self.R)
        if at_R.volume > end.volume:
            v_high, p_high = at_R.volume, at_R.perimeter
        else:
            v_high, p_high = end.volume, end.perimeter
        if v_high - v_low <= JUMP_REL * area:
            return []
        return [
            Plateau(
                radius=self.R,
                kappa=1.0 / self.R,
                volume_low=v_low,
                volume_high=v_high,
                perimeter_low=n_k * 2.0 * math.pi * self.R,
                perimeter_high=p_high,
                at_inradius=True,
            )
        ]

    def plateau_of_volume(self, volume: float) -> Plateau | None:
        slack = 1e-12 * self.domain.area
        for pl in self.plateaus:
            if pl.covers(volume, slack):
                return pl
        return None

    # -- Cheeger constant ------------------------------------------------------

    def _solve_cheeger(self) -> tuple[float, float]:
        """1/r* where the erosion area equals the area of a radius-r* ball.

        The erosion area is continuous for domains without necks, so the
        sign change brackets cleanly even across volume plateaus.
        """

        def g(r: float) -> float:
            return self.point(r).erosion_area - math.pi * r * r

        lo = float(self.r_grid[0])
        hi = float(self.r_grid[-1])
        g_lo, g_hi = g(lo), g(hi)
        while g_lo <= 0.0 and lo > 1e-12 * self.R:
            lo *= 0.5
            g_lo = g(lo)
        if g_lo <= 0.0 or g_hi >= 0.0:
            raise RootNotBracketedError(
                "erosion-area balance has no sign change on the radius grid"
            )
        r_star = float(brentq(g, lo, hi, xtol=1e-15 * max(1.0, self.R), rtol=1e-15))
        return 1.0 / r_star, r_star

    def cheeger_volume_range(self) -> tuple[float, float]:
        """Smallest and largest volume among sets attaining the constant."""
        r_star = self.cheeger_radius
        for pl in self.plateaus:
            if abs(pl.radius - r_star) <= 1e-8 * self.R:
                return pl.volume_low, pl.volume_high
        v = self.volume(r_star)
        return v, v

    def kappa_bar(self) -> float:
        """Smallest sampled curvature whose rolled set fills the domain.

        Above this curvature the domain minimizes the prescribed-curvature
        energy among its own subsets.  Any polygon with a corner returns
        infinity: rolling always cuts corners, so the symmetric difference
        never vanishes.
        """
        if isinstance(self.domain, Disk):
            return 1.0 / self.R
        area = float(self.domain.area)
        tol = geom_tol(self.domain.scale)
        # volumes decrease in r; the largest radius still filling the
        # domain gives the smallest qualifying curvature
        for r, v in zip(self.r_grid[::-1], self.volumes[::-1]):
            if area - v <= tol:
                return 1.0 / float(r)
        return math.inf

    # -- inverse maps ------------------------------------------------------------

    @property
    def volume_upper(self) -> float:
        return float(self.domain.area)

    @property
    def volume_lower(self) -> float:
        """Smallest volume reachable by the rolled family (inscribed ball)."""
        return math.pi * self.R**2

    def radius_of_volume(self, volume: float) -> float:
        """Radius whose rolled set has the given volume.

        Volumes inside a plateau map to the critical radius itself.
        """
        area = self.domain.area
        tol = 1e-9 * area
        if volume > area + tol:
            raise VolumeOutOfRangeError(
                f"volume {volume} is not below the domain area {area}"
            )
        if isinstance(self.domain, Disk):
            # the rolled family of a disk is the disk itself at every radius
            if volume < self.volume_lower - tol:
                raise VolumeBelowInballError(
                    f"volume {volume} is below the inscribed-ball volume "
                    f"{self.volume_lower}; only balls live there"
                )
            return self.R
        if volume >= area * (1.0 - 1e-12):
            return 0.0
        pl = self.plateau_of_volume(volume)
        if pl is not None:
            return pl.radius
        if volume < self.volume_lower - tol:
            raise VolumeBelowInballError(
                f"volume {volume} is below the inscribed-ball volume "
                f"{self.volume_lower}; only balls live there"
            )
        V = self.volumes
        if volume >= V[0]:
            lo, hi = RADIUS_FLOOR_REL * self.R, float(self.r_grid[0])
        else:
            idx = int(np.searchsorted(-V, -volume, side="left"))
            idx = min(max(idx, 1), len(V) - 1)
            lo, hi = float(self.r_grid[idx - 1]), float(self.r_grid[idx])
        f_lo = self.volume(lo) - volume
        f_hi = self.volume(hi) - volume
        if f_lo < 0.0:
            raise VolumeOutOfRangeError(
                f"volume {volume} exceeds the resolvable maximum {self.volume(lo)}"
            )
        if f_hi > 0.0:
            # borderline cell; extend to the inradius itself
            hi = self.R
            f_hi = self.volume(hi) - volume
            if f_hi > 0.0:
                raise RootNotBracketedError(
                    f"volume {volume} not bracketed by the profile"
                )
        if f_lo == 0.0:
            return lo
        return float(
            brentq(
                lambda rr: self.volume(rr) - volume,
                lo,
                hi,
                xtol=1e-15 * max(1.0, self.R),
                rtol=1e-15,
            )
        )

    def curvature_of_volume(self, volume: float, ball_regime: bool = False) -> float:
        """Free-boundary curvature of the least-perimeter set at this volume."""
        area = self.domain.area
        pl = self.plateau_of_volume(volume)
        if pl is not None:
            return pl.kappa
        if volume < self.volume_lower - 1e-9 * area:
            if ball_regime:
                if volume <= 0.0:
                    raise VolumeOutOfRangeError("volume must be positive")
                return math.sqrt(math.pi / volume)
            raise VolumeBelowInballError(
                f"volume {volume} lies in the ball regime below "
                f"{self.volume_lower}; pass ball_regime=True to allow it"
            )
        r = self.radius_of_volume(volume)
        if r == 0.0:
            # corners of the domain force unbounded curvature at full volume
            return math.inf
        return 1.0 / r

    def least_perimeter(self, volume: float, ball_regime: bool = False) -> float:
        """Smallest boundary length of a subset with the given volume."""
        area = self.domain.area
        pl = self.plateau_of_volume(volume)
        if pl is not None:
            return pl.perimeter_high - pl.kappa * (pl.volume_high - volume)
        if volume < self.volume_lower - 1e-9 * area:
            if ball_regime:
                if volume <= 0.0:
                    raise VolumeOutOfRangeError("volume must be positive")
                return 2.0 * math.sqrt(math.pi * volume)
            raise VolumeBelowInballError(
                f"volume {volume} lies in the ball regime below "
                f"{self.volume_lower}; pass ball_regime=True to allow it"
            )
        return self.perimeter(self.radius_of_volume(volume))

    def minimizer_of_volume(self, volume: float):
        """Chains of a least-perimeter set of the given volume, when constructible.

        Returns (chains, note).  Off plateaus the rolled set at the matching
        radius is the answer.  On the inradius plateau of a segment kernel the
        minimizers are stadia over sub-segments and are built exactly.  Strictly
        interior plateau volumes belong to a continuum of minimizers with no
        constructive description; those return (None, note) rather than a guess.
        """
        area = self.domain.area
        if volume >= area * (1.0 - 1e-12):
            return [self.domain.as_chain()], None
        pl = self.plateau_of_volume(volume)
        if pl is None:
            return self.minimizer(self.radius_of_volume(volume)), None
        scale = self.domain.scale
        if pl.at_inradius:
            kernel = self.inradius_result.kernel
            if kernel.is_segment:
                (x0, y0), (x1, y1) = kernel.segment
                full = math.hypot(x1 - x0, y1 - y0)
                core = (volume - math.pi * self.R**2) / (2.0 * self.R)
                core = min(max(core, 0.0), full)
                mx, my = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
                if core <= 1e-12 * max(1.0, scale):
                    sub = Kernel(points=((mx, my),))
                else:
                    ux, uy = (x1 - x0) / full, (y1 - y0) / full
                    h = 0.5 * core
                    sub = Kernel(
                        points=((mx - h * ux, my - h * uy), (mx + h * ux, my + h * uy)),
                        segment=(
                            (mx - h * ux, my - h * uy),
                            (mx + h * ux, my + h * uy),
                        ),
                    )
                return [roll_kernel(sub, self.R, scale)], None
            return None, (
                "inradius plateau of a non-segment kernel: minimizing sets "
                "not constructed"
            )
        gap_tol = max(1e-9 * area, 1e-6 * pl.gap)
        if volume >= pl.volume_high - gap_tol:
            return self.minimizer(pl.radius * (1.0 - 1e-9)), None
        if volume <= pl.volume_low + gap_tol:
            return self.minimizer(pl.radius * (1.0 + 1e-9)), None
        return None, (
            "interior plateau: least-perimeter sets form a continuum between "
            "the two rolled extremes and are not constructed"
        )

    # -- prescribed-curvature energy ------------------------------------------------

    def curvature_energy(self, kappa: float) -> float:
        """Least value of (boundary length) - kappa * (volume) over subsets
        containing at least an inscribed-ball volume.

        The constraint rules out the empty set, so the value is a strictly
        decreasing function of kappa that changes sign exactly at the
        Cheeger constant.  On the rolled family the optimum radius is
        1/kappa and the eroded perimeter cancels, leaving
        (n*pi*r^2 - erosion area)/r; the evaluation is direct geometry at
        that radius, not a table lookup.
        """
        if kappa <= 0.0:
            raise ValueError("curvature must be positive")
        r = 1.0 / kappa
        tol = geom_tol(self.domain.scale)
        if r > self.R + 10.0 * tol:
            raise KappaBelowInverseInradiusError(
                f"curvature {kappa} is below the inverse inradius {1.0 / self.R}"
            )
        r = min(r, self.R)
        pt = self.point(r)
        n = max(1, pt.n_components)
        if pt.erosion_area == 0.0 and pt.volume > 0.0:
            # kernel-degenerate: the candidate is an inscribed ball family
            return pt.perimeter - kappa * pt.volume
        return (n * math.pi * r * r - pt.erosion_area) / r

    def curvature_minimizer(self, kappa: float) -> list[ArcPolygon]:
        """Minimizing set for the prescribed-curvature energy.

        Always nonempty: the admissible sets contain an inscribed ball, and
        the optimum is the rolled set at radius 1/kappa (the inscribed ball
        itself when kappa sits at the inverse inradius tolerance-wise).
        """
        if kappa <= 0.0:
            raise ValueError("curvature must be positive")
        tol = geom_tol(self.domain.scale)
        if 1.0 / kappa > self.R + 10.0 * tol:
            raise KappaBelowInverseInradiusError(
                f"curvature {kappa} is below the inverse inradius {1.0 / self.R}"
            )
        return self.minimizer(min(1.0 / kappa, self.R))


def build_profile(
    domain: Domain,
    n_radii: int = N_RADII,
    check_necks: bool = True,
    neck_samples: int = 256,
) -> VolumeProfile:
    """Construct the rolled-family volume profile of a domain."""
    return VolumeProfile(
        domain,
        n_radii=n_radii,
        check_necks=check_necks,
        neck_samples=neck_samples,
    )


def plateau_energy_probe(profile: VolumeProfile, plateau: Plateau, p: float) -> float:
    """Curvature-weighted convexity probe of the p-energy on a plateau.

    Evaluates I''(V) * V + (1 - p) * I'(V) at the plateau midpoint from
    finite differences of the least-perimeter map.  On a linear stretch
    the second derivative vanishes, so the sign is that of (1 - p) times
    the plateau curvature: negative for p > 1, meaning no interior
    plateau volume can be a strict minimum of the p-energy there.
    """
    v_mid = 0.5 * (plateau.volume_low + plateau.volume_high)
    h = 0.25 * plateau.gap
    if h <= 0.0:
        raise ValueError("degenerate plateau")
    i_m = profile.least_perimeter(v_mid - h)
    i_0 = profile.least_perimeter(v_mid)
    i_p = profile.least_perimeter(v_mid + h)
    d1 = (i_p - i_m) / (2.0 * h)
    d2 = (i_p - 2.0 * i_0 + i_m) / (h * h)
    return d2 * v_mid + (1.0 - p) * d1
