"""Minimization of boundary length over volume^p and the induced volume map.

For p > 1/2 the minimum of P(F)/|F|^p over subsets is attained on the
rolled family, so the search is one-dimensional: stationary radii solve
sigma(r) = V(r) - p * r * P(r) = 0 (the curvature identity 1/r = p*P/V),
plateaus contribute their kink volumes plus a closed-form stationary
volume on the linear stretch, and the two endpoints (inscribed ball,
whole domain) are always candidates.  At p = 1/2 the ratio is scale
invariant and every ball ties; the result carries an interval marker
instead of a volume list.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, VolumeOutOfRangeError
from .profile import VolumeProfile

TOL_MIN = 1e-9   # relative window for tied global minimizers
P_MAX = 16.0


@dataclass(frozen=True)
class Verdict:
    passed: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class CheegerResult:
    """Minimum of the p-weighted ratio and every volume attaining it."""

    p: float
    constant: float
    volumes: tuple
    minimizers: tuple
    curvature_residuals: tuple
    volume_interval: tuple | None = None
    notes: tuple = ()

    @property
    def volume(self) -> float:
        """The unique minimizing volume (raises when tied or interval-valued)."""
        if self.volume_interval is not None:
            raise ValueError("volume is interval-valued at the scale-invariant exponent")
        if len(self.volumes) != 1:
            raise ValueError(f"{len(self.volumes)} minimizing volumes, not one")
        return self.volumes[0]


@dataclass(frozen=True)
class MultivalueReport:
    """All local minima of the ratio at a supercritical exponent."""

    p: float
    minima: tuple                # (volume, quotient) pairs, ascending volume
    global_volumes: tuple
    gap_to_second: float


@dataclass(frozen=True)
class VolumeMapScan:
    p_grid: tuple
    results: tuple
    monotonicity: Verdict
    injectivity: Verdict
    continuity: Verdict
    p_bar: float
    ball_degenerate: bool = False


def rayleigh_quotient(
    profile: VolumeProfile, volume: float, p: float, ball_regime: bool = False
) -> float:
    """Least boundary length at the given volume, divided by volume^p."""
    if volume <= 0.0:
        raise VolumeOutOfRangeError("volume must be positive")
    return profile.least_perimeter(volume, ball_regime=ball_regime) / volume**p


def stationarity_residual(profile: VolumeProfile, p: float, volume: float) -> float:
    """|curvature - p * perimeter / volume| at the least-perimeter set.

    Vanishes exactly at stationary volumes of the ratio; order one at
    generic volumes.
    """
    kappa = profile.curvature_of_volume(volume)
    return abs(kappa - p * profile.least_perimeter(volume) / volume)


# ---------------------------------------------------------------------------
# candidate collection


def _sigma_root_radii(profile: VolumeProfile, p: float) -> list:
    """Radii where V(r) - p*r*P(r) changes sign, polished exactly."""
    dom = profile.domain
    r_nodes = np.concatenate(([0.0], profile.r_grid))
    v_nodes = np.concatenate(([dom.area], profile.volumes))
    p_nodes = np.concatenate(([dom.perimeter], profile.perimeters))
    end = profile.point(profile.R)
    r_nodes = np.append(r_nodes, profile.R)
    v_nodes = np.append(v_nodes, end.volume)
    p_nodes = np.append(p_nodes, end.perimeter)
    sigma = v_nodes - p * r_nodes * p_nodes

    def sig(r: float) -> float:
        if r == 0.0:
            return dom.area
        fp = profile.point(r)
        return fp.volume - p * r * fp.perimeter

    roots = []
    signs = np.sign(sigma)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    jump_radii = sorted(pl.radius for pl in profile.plateaus if not pl.at_inradius)
    for i in flips:
        lo, hi = float(r_nodes[i]), float(r_nodes[i + 1])
        # a volume jump inside the bracket flips sigma without a root and
        # stalls the polish on the discontinuity (the jump itself is covered
        # by the plateau candidates); split just clear of the jump and polish
        # each continuous part that still changes sign
        gap = 1e-7 * profile.R
        ends = [lo]
        for rj in jump_radii:
            if lo < rj < hi:
                ends.extend((max(lo, rj - gap), min(hi, rj + gap)))
        ends.append(hi)
        for a, b in zip(ends[::2], ends[1::2]):
            if not b > a:
                continue
            fa, fb = sig(a), sig(b)
            if fa * fb >= 0.0:
                continue
            rs = float(
                brentq(sig, a, b, xtol=1e-14 * max(1.0, profile.R), rtol=1e-15)
            )
            roots.append((rs, math.copysign(1.0, fa)))
    for i in np.nonzero(signs == 0)[0]:
        roots.append((float(r_nodes[i]), 0.0))
    return roots


def _plateau_candidates(profile: VolumeProfile, p: float) -> list:
    """Kink volumes and linear-stretch stationary volumes, with quotients."""
    out = []
    for pl in profile.plateaus:
        if pl.gap <= 0.0:
            continue
        out.append((pl.volume_low, pl.perimeter_low / pl.volume_low**p, None))
        out.append((pl.volume_high, pl.perimeter_high / pl.volume_high**p, None))
        if p == 1.0:
            continue
        a = pl.perimeter_low - pl.kappa * pl.volume_low
        vs = p * a / (pl.kappa * (1.0 - p))
        if pl.volume_low < vs < pl.volume_high:
            out.append((vs, (a + pl.kappa * vs) / vs**p, None))
    return out


def _merge_candidates(cands: list, area: float) -> list:
    """Sort by volume and collapse near-duplicates, keeping the best quotient."""
    cands = sorted(cands, key=lambda c: c[0])
    merged: list = []
    for c in cands:
        if merged and abs(c[0] - merged[-1][0]) <= 1e-9 * area:
            if c[1] < merged[-1][1]:
                merged[-1] = c
            continue
        merged.append(c)
    return merged


def solve_cheeger(profile: VolumeProfile, p: float, tol_min: float = TOL_MIN) -> CheegerResult:
    """Minimize boundary/volume^p over subsets; list every tied volume.

    p = 1/2 is scale invariant (every ball attains 2*sqrt(pi)); that case
    returns an interval marker covering (0, pi*R^2] instead of volumes.
    """
    if p < 0.5 - 1e-12:
        raise InputError(f"exponent p = {p} is below the scale-invariant threshold 1/2")
    if p > P_MAX:
        raise InputError(f"exponent p = {p} exceeds the supported maximum {P_MAX}")
    v_ball = math.pi * profile.R**2
    if abs(p - 0.5) <= 1e-12:
        return CheegerResult(
            p=0.5,
            constant=2.0 * math.sqrt(math.pi),
            volumes=(),
            minimizers=(),
            curvature_residuals=(),
            volume_interval=(0.0, v_ball),
            notes=("every ball inside the domain attains the ratio",),
        )
    dom = profile.domain
    area = dom.area
    cands = []
    end = profile.point(profile.R)
    cands.append((end.volume, end.perimeter / end.volume**p, profile.R))
    cands.append((area, dom.perimeter / area**p, 0.0))
    cands.extend(_plateau_candidates(profile, p))
    for rs, _ in _sigma_root_radii(profile, p):
        fp = profile.point(rs)
        cands.append((fp.volume, fp.perimeter / fp.volume**p, rs))
    cands = _merge_candidates(cands, area)
    q_min = min(c[1] for c in cands)
    winners = [c for c in cands if c[1] <= q_min * (1.0 + tol_min)]

    volumes, minimizers, residuals, notes = [], [], [], []
    for v, _, r in winners:
        volumes.append(v)
        if r is not None:
            chains = profile.minimizer(r) if r > 0.0 else [dom.as_chain()]
        else:
            chains, note = profile.minimizer_of_volume(v)
            if note:
                notes.append(note)
        minimizers.append(chains)
        kappa = profile.curvature_of_volume(v)
        if math.isfinite(kappa):
            residuals.append(abs(kappa - p * q_min * v ** (p - 1.0)))
        else:
            residuals.append(math.inf)
    return CheegerResult(
        p=p,
        constant=q_min,
        volumes=tuple(volumes),
        minimizers=tuple(minimizers),
        curvature_residuals=tuple(residuals),
        notes=tuple(notes),
    )


def curvature_bounds_ok(result: CheegerResult, profile: VolumeProfile) -> Verdict:
    """Check the curvature window implied by the exponent.

    For p in (1/2, 1) the minimizer curvature lies in
    [max(p*H, 1/R), H) where H is the p = 1 constant; at p = 1 it equals H;
    for p > 1 it is at least p*H.  Strict inequalities are checked up to a
    1e-9 relative slack.
    """
    if result.volume_interval is not None:
        return Verdict(True, "scale-invariant exponent: no curvature window")
    h1 = profile.cheeger_constant
    p = result.p
    rel = 1e-9
    for v in result.volumes:
        kappa = profile.curvature_of_volume(v)
        if abs(p - 1.0) <= 1e-12:
            if abs(kappa - h1) > rel * h1:
                return Verdict(False, f"kappa {kappa} != constant {h1} at V={v}")
        elif p < 1.0:
            lo = max(p * h1, 1.0 / profile.R)
            if kappa < lo * (1.0 - rel) or kappa > h1 * (1.0 + rel):
                return Verdict(
                    False, f"kappa {kappa} outside [{lo}, {h1}) at V={v}"
                )
        else:
            if kappa < p * h1 * (1.0 - rel):
                return Verdict(False, f"kappa {kappa} < p*H = {p * h1} at V={v}")
    return Verdict(True, "curvature window holds at every minimizer")


def multivalue_probe(profile: VolumeProfile, p: float) -> MultivalueReport:
    """Record every local minimum of the ratio at a supercritical exponent.

    The subcritical map is provably single-valued, so the probe rejects
    p <= 1; above 1 it reports the tied global set and the relative gap
    to the best non-global local minimum as evidence either way.
    """
    if p <= 1.0:
        raise InputError("multivalue probe applies to exponents p > 1 only")
    if p > P_MAX:
        raise InputError(f"exponent p = {p} exceeds the supported maximum {P_MAX}")
    area = profile.domain.area
    minima = []
    for rs, left_sign in _sigma_root_radii(profile, p):
        if left_sign <= 0.0:
            continue  # sign - to + is a local maximum along the family
        fp = profile.point(rs)
        minima.append((fp.volume, fp.perimeter / fp.volume**p))
    def plateau_slope(pl, v: float) -> float:
        # d/dV of (a + kappa*V)/V^p on the linear stretch, exact
        a = pl.perimeter_low - pl.kappa * pl.volume_low
        return (pl.kappa * v - p * (a + pl.kappa * v)) / v ** (p + 1.0)

    def sigma_beside(pl, side: float) -> float:
        # sign of dq/dV on the smooth branch equals the sign of sigma there
        fp = profile.point(pl.radius * (1.0 + side * 1e-6))
        return fp.volume - p * fp.radius * fp.perimeter

    for pl in profile.plateaus:
        if pl.gap <= 0.0:
            continue
        a = pl.perimeter_low - pl.kappa * pl.volume_low
        # on the linear stretch q'' has the sign of the intercept a, so the
        # interior stationary volume is a minimum only when a > 0
        vs = p * a / (pl.kappa * (1.0 - p))
        if a > 0.0 and pl.volume_low < vs < pl.volume_high:
            minima.append((vs, (a + pl.kappa * vs) / vs**p))
        # kinks are minima when the one-sided slopes change from - to +
        left_negative = pl.at_inradius or sigma_beside(pl, +1.0) < 0.0
        if left_negative and plateau_slope(pl, pl.volume_low) > 0.0:
            minima.append((pl.volume_low, pl.perimeter_low / pl.volume_low**p))
        if plateau_slope(pl, pl.volume_high) < 0.0 and sigma_beside(pl, -1.0) > 0.0:
            minima.append(
                (pl.volume_high, pl.perimeter_high / pl.volume_high**p)
            )
    minima = _merge_candidates([(v, q, None) for v, q in minima], area)
    minima = [(v, q) for v, q, _ in minima]
    if not minima:
        # monotone ratio: the best endpoint is the unique minimum
        end = profile.point(profile.R)
        cands = [
            (end.volume, end.perimeter / end.volume**p),
            (area, profile.domain.perimeter / area**p),
        ]
        minima = [min(cands, key=lambda c: c[1])]
    q_min = min(q for _, q in minima)
    global_volumes = tuple(v for v, q in minima if q <= q_min * (1.0 + TOL_MIN))
    rest = [q for _, q in minima if q > q_min * (1.0 + TOL_MIN)]
    gap = (min(rest) - q_min) / q_min if rest else math.inf
    return MultivalueReport(
        p=p,
        minima=tuple(minima),
        global_volumes=global_volumes,
        gap_to_second=gap,
    )


# ---------------------------------------------------------------------------
# map-level scan


def _max_jump(volumes: list) -> float:
    if len(volumes) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(volumes))))


def volume_map_scan(
    profile: VolumeProfile, p_grid, refine: bool = True
) -> VolumeMapScan:
    """Solve per exponent and test the map-level properties on the grid.

    Monotonicity and injectivity are checked on the reported volumes;
    continuity is a Cauchy-type surrogate (the largest volume jump must
    shrink by about half when the grid is refined twofold).
    """
    p_grid = tuple(float(p) for p in p_grid)
    if any(p_grid[i] >= p_grid[i + 1] for i in range(len(p_grid) - 1)):
        raise InputError("exponent grid must be strictly increasing")
    results = tuple(solve_cheeger(profile, p) for p in p_grid)
    area = profile.domain.area
    v_ball = math.pi * profile.R**2

    usable = [
        (p, r) for p, r in zip(p_grid, results) if r.volume_interval is None
    ]
    ball_degenerate = bool(usable) and all(
        len(r.volumes) >= 1
        and max(abs(v - v_ball) for v in r.volumes) <= 1e-9 * area
        for _, r in usable
    ) and area <= v_ball * (1.0 + 1e-9)

    # monotonicity of the single-valued stretch below p = 1
    sub = [(p, r) for p, r in usable if p < 1.0]
    if ball_degenerate:
        sub = []
        monotonicity = Verdict(True, "flat volume map (ball-degenerate)")
    else:
        monotonicity = Verdict(True, "strictly increasing on the subcritical grid")
    for i in range(len(sub)):
        p, r = sub[i]
        if len(r.volumes) != 1:
            monotonicity = Verdict(
                False, f"{len(r.volumes)} tied volumes at subcritical p={p}"
            )
            break
        if i and r.volumes[0] <= sub[i - 1][1].volumes[0]:
            monotonicity = Verdict(
                False,
                f"volume {r.volumes[0]} at p={p} does not exceed "
                f"{sub[i - 1][1].volumes[0]} at p={sub[i - 1][0]}",
            )
            break

    if ball_degenerate:
        injectivity = Verdict(True, "ball-degenerate domain: volumes coincide by design")
    else:
        injectivity = Verdict(True, "volume sets pairwise disjoint")
        sep = 1e-12 * area
        for i in range(len(usable)):
            for j in range(i + 1, len(usable)):
                vi, vj = usable[i][1].volumes, usable[j][1].volumes
                if not vi or not vj:
                    continue
                d = min(abs(a - b) for a in vi for b in vj)
                if d <= sep:
                    injectivity = Verdict(
                        False,
                        f"volumes at p={usable[i][0]} and p={usable[j][0]} "
                        f"overlap within {d}",
                    )
                    break
            if not injectivity.passed:
                break

    continuity = Verdict(True, "single grid: refinement not requested")
    if refine and len(sub) >= 3 and not ball_degenerate:
        coarse = [r.volumes[0] for _, r in sub if len(r.volumes) == 1]
        jump_c = _max_jump(coarse)
        mids = [0.5 * (sub[i][0] + sub[i + 1][0]) for i in range(len(sub) - 1)]
        fine_p = sorted([p for p, _ in sub] + mids)
        fine_v = []
        known = {p: r.volumes[0] for p, r in sub if len(r.volumes) == 1}
        for p in fine_p:
            if p in known:
                fine_v.append(known[p])
            else:
                rr = solve_cheeger(profile, p)
                fine_v.append(rr.volumes[0] if len(rr.volumes) == 1 else math.nan)
        jump_f = _max_jump(fine_v)
        if jump_c == 0.0:
            continuity = Verdict(True, "flat volume map")
        else:
            ratio = jump_c / jump_f if jump_f > 0.0 else math.inf
            # exact halving holds only asymptotically; allow 10% slack
            continuity = Verdict(
                ratio >= 1.8,
                f"max jump {jump_c:.3e} -> {jump_f:.3e} under 2x refinement "
                f"(ratio {ratio:.2f})",
            )
    elif refine and ball_degenerate:
        continuity = Verdict(True, "flat volume map (ball-degenerate)")

    p_bar = math.inf
    for p, r in usable:
        if r.volumes and max(r.volumes) >= area * (1.0 - 1e-9):
            p_bar = p
            break
    return VolumeMapScan(
        p_grid=p_grid,
        results=results,
        monotonicity=monotonicity,
        injectivity=injectivity,
        continuity=continuity,
        p_bar=p_bar,
        ball_degenerate=ball_degenerate,
    )
