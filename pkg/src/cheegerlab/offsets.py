"""Inner offsets, inradius, disk rolling, and the no-neck test.

Erosion of a convex polygon is an exact intersection of inward
half-planes.  For a nonconvex simple polygon the eroded region is cut
out of the raw inward-offset chain (edge offsets plus clockwise arcs
around reflex vertices): the chain is split at every pairwise
intersection and only the pieces whose boundary distance is >= r
survive.  Dilating the eroded body back by the same radius gives the
classical opening; its free boundary consists of radius-r arcs only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInnerBodyError,
    NumericalError,
    OpenChainError,
    RadiusExceedsInradiusError,
)
from .geometry import (
    Arc,
    ArcPolygon,
    Disk,
    Domain,
    Polygon,
    Segment,
    geom_tol,
)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Kernel:
    """Incenter set of a domain: a point, several points, or a segment."""

    points: tuple
    segment: tuple | None = None

    @property
    def is_segment(self) -> bool:
        return self.segment is not None

    @property
    def length(self) -> float:
        if self.segment is None:
            return 0.0
        (x0, y0), (x1, y1) = self.segment
        return math.hypot(x1 - x0, y1 - y0)


@dataclass(frozen=True)
class InradiusResult:
    radius: float
    witnesses: tuple
    segment: tuple | None = None

    @property
    def kernel(self) -> Kernel:
        return Kernel(points=self.witnesses, segment=self.segment)


@dataclass
class InnerBody:
    """Erosion of a domain by some radius; possibly several components."""

    radius: float
    components: tuple = ()
    kernel: Kernel | None = None

    @property
    def is_empty(self) -> bool:
        return not self.components and self.kernel is None

    @property
    def is_degenerate(self) -> bool:
        return not self.components and self.kernel is not None

    @property
    def area(self) -> float:
        return float(sum(c.area for c in self.components))

    @property
    def perimeter(self) -> float:
        return float(sum(c.perimeter for c in self.components))


@dataclass(frozen=True)
class NoNeckReport:
    passed: bool
    radii: tuple
    component_counts: tuple
    critical_radii: tuple = ()
    note: str = ""

    @property
    def max_components(self) -> int:
        return max(self.component_counts) if self.component_counts else 0


# ---------------------------------------------------------------------------
# inradius


def inradius(domain: Domain) -> InradiusResult:
    """Largest inscribed-disk radius, with witness incenters.

    Convex polygons are solved exactly from active edge triples; for
    nonconvex polygons the radius comes from a sign-change bisection on
    erosion emptiness, which converges to machine precision.
    """
    if isinstance(domain, Disk):
        return InradiusResult(
            radius=domain.radius,
            witnesses=(tuple(domain.center),),
            segment=None,
        )
    cached = getattr(domain, "_inradius_cache", None)
    if cached is not None:
        return cached
    if domain.is_convex() and domain.n_vertices <= 48:
        res = _inradius_convex(domain)
    else:
        res = _inradius_bisect(domain)
    domain._inradius_cache = res
    return res


def _inradius_convex(poly: Polygon) -> InradiusResult:
    a = poly._edges_a
    m = poly._inward
    n = poly.n_vertices
    rhs_all = np.einsum("ij,ij->i", m, a)
    tol = geom_tol(poly.scale)
    best_r = -math.inf
    candidates = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                mat = np.array(
                    [
                        [m[i, 0], m[i, 1], -1.0],
                        [m[j, 0], m[j, 1], -1.0],
                        [m[k, 0], m[k, 1], -1.0],
                    ]
                )
                det = np.linalg.det(mat)
                if abs(det) < 1e-12:
                    continue
                x1, x2, r = np.linalg.solve(mat, [rhs_all[i], rhs_all[j], rhs_all[k]])
                if r <= 0.0:
                    continue
                s = m @ np.array([x1, x2]) - rhs_all
                if np.min(s) < r - 10.0 * tol:
                    continue
                candidates.append((r, x1, x2))
                best_r = max(best_r, r)
    if not candidates:
        raise NumericalError("no incenter candidate found for convex polygon")
    keep = [(x1, x2) for r, x1, x2 in candidates if r >= best_r - 10.0 * tol]
    witnesses = _dedupe_points(keep, 1e-7 * max(1.0, poly.scale))
    segment = None
    if len(witnesses) >= 2:
        pts = np.array(witnesses)
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        i0, i1 = np.unravel_index(np.argmax(d2), d2.shape)
        segment = (tuple(pts[i0]), tuple(pts[i1]))
        witnesses = [tuple(pts[i0]), tuple(pts[i1])]
    return InradiusResult(
        radius=float(best_r),
        witnesses=tuple(witnesses),
        segment=segment,
    )


def _inradius_bisect(poly: Polygon) -> InradiusResult:
    xmin, ymin, xmax, ymax = poly.bounding_box()
    hi = 0.5 * min(xmax - xmin, ymax - ymin) * (1.0 + 1e-9)
    lo = 0.0
    body_lo = None
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        try:
            body = _erode_trim(poly, mid)
        except (OpenChainError, NumericalError):
            # a radius sitting exactly on a tangency; nudge and retry
            body = _erode_trim(poly, mid * (1.0 + 1e-12) + 1e-15)
        if body:
            lo, body_lo = mid, body
        else:
            hi = mid
    if body_lo is None:
        raise NumericalError("erosion never nonempty during inradius bisection")
    refined = [_witness_of(poly, comp) for comp in body_lo]
    r_val = max(r for _, r in refined)
    # every component attaining the inradius must contribute a witness, and
    # the last nonempty iterate can be too degenerate to keep them all
    r_probe = r_val * (1.0 - 1e-6)
    try:
        probe_comps = _erode_trim(poly, r_probe)
    except (OpenChainError, NumericalError):
        probe_comps = []
    if probe_comps:
        refined = [_witness_of(poly, comp) for comp in probe_comps]
        r_val = max(r_val, max(r for _, r in refined))
    tol_keep = 1e-6 * max(1.0, poly.scale)
    witnesses = [tuple(x) for x, r in refined if r >= r_val - tol_keep]
    return InradiusResult(
        radius=float(r_val),
        witnesses=tuple(_dedupe_points(witnesses, tol_keep)),
        segment=None,
    )


def _witness_of(poly: Polygon, comp: ArcPolygon):
    pts = comp.sample_boundary(per_element=4)
    w = _polish_incenter(poly, pts.mean(axis=0))
    return _refine_incenter(poly, w, poly.boundary_distance(w))


def _refine_incenter(poly: Polygon, w: np.ndarray, r_est: float):
    """Gauss-Newton polish of an incenter against its active boundary features.

    Features are edges whose perpendicular foot contains the point and
    vertices whose angular region does; solving d_k(x) = r in least
    squares removes the slack the emptiness bisection leaves behind.
    """
    scale = max(1.0, poly.scale)
    tol_act = 1e-5 * scale
    feats = []
    n = poly.n_vertices
    for i in range(n):
        rel = w - poly._edges_a[i]
        t = float(rel @ poly._edge_dir[i])
        if -tol_act <= t <= poly._edge_len[i] + tol_act:
            d = float(rel @ poly._inward[i])
            if abs(d - r_est) <= tol_act:
                feats.append(("edge", i))
    for i in range(n):
        v = poly.vertices[i]
        rel = w - v
        if float(rel @ poly._edge_dir[i - 1]) >= -tol_act and float(
            rel @ poly._edge_dir[i]
        ) <= tol_act:
            d = float(np.hypot(*rel))
            if abs(d - r_est) <= tol_act:
                feats.append(("vertex", i))
    if len(feats) < 2:
        return w, r_est
    x = np.array(w, dtype=float)
    r = float(r_est)
    for _ in range(60):
        rows, vals = [], []
        for kind, i in feats:
            if kind == "edge":
                m = poly._inward[i]
                vals.append(float((x - poly._edges_a[i]) @ m) - r)
                rows.append([m[0], m[1], -1.0])
            else:
                dv = x - poly.vertices[i]
                dd = float(np.hypot(*dv))
                if dd < 1e-300:
                    return w, r_est
                vals.append(dd - r)
                rows.append([dv[0] / dd, dv[1] / dd, -1.0])
        step, *_ = np.linalg.lstsq(
            np.array(rows), -np.array(vals), rcond=None
        )
        x += step[:2]
        r += float(step[2])
        if float(np.hypot(*step[:2])) + abs(step[2]) < 1e-15 * scale:
            break
    far = float(np.hypot(*(x - w))) > 1e-3 * scale
    if far or not np.isfinite(r) or r <= 0.0 or abs(r - r_est) > 1e-3 * scale:
        return w, r_est
    return x, r


def _polish_incenter(poly: Polygon, start: np.ndarray) -> np.ndarray:
    from scipy.optimize import minimize

    res = minimize(
        lambda x: -poly.boundary_distance(x),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-13, "maxiter": 400},
    )
    return res.x if poly.contains_point(res.x) else start


def _dedupe_points(points, tol: float):
    out = []
    for p in points:
        p = tuple(float(c) for c in p)
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) > tol for q in out):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# erosion


def erode(domain: Domain, r: float, inr: InradiusResult | None = None) -> InnerBody:
    """Inner parallel body {x in domain : dist(x, boundary) >= r}."""
    if r < 0.0:
        raise ValueError("erosion radius must be nonnegative")
    if inr is None:
        inr = inradius(domain)
    R = inr.radius
    tol = geom_tol(domain.scale)
    if r > R + 10.0 * tol:
        raise RadiusExceedsInradiusError(f"r = {r} exceeds inradius {R}")
    if isinstance(domain, Disk):
        if r >= R - tol:
            return InnerBody(radius=r, kernel=inr.kernel)
        c = tuple(domain.center)
        rho = R - r
        circle = ArcPolygon([Arc(c, rho, 0.0, math.pi), Arc(c, rho, math.pi, math.pi)])
        return InnerBody(radius=r, components=(circle,))
    if r == 0.0:
        return InnerBody(radius=0.0, components=(domain.as_chain(),))
    if r >= R - 1e-3 * tol:
        return InnerBody(radius=r, kernel=inr.kernel)
    if domain.is_convex():
        verts = _clip_convex(domain, r)
        if verts is None:
            # numerically at the kernel already
            return InnerBody(radius=r, kernel=inr.kernel)
        chain = ArcPolygon(
            [
                Segment(tuple(verts[i]), tuple(verts[(i + 1) % len(verts)]))
                for i in range(len(verts))
            ]
        )
        return InnerBody(radius=r, components=(chain,))
    comps = _erode_trim(domain, r)
    if not comps:
        if r >= R - 1e3 * tol:
            return InnerBody(radius=r, kernel=inr.kernel)
        raise EmptyInnerBodyError(f"erosion empty at r = {r} < R = {R}")
    return InnerBody(radius=r, components=tuple(comps))


def _clip_convex(poly: Polygon, r: float):
    """Sutherland-Hodgman intersection of inward-offset half-planes."""
    pts = [np.array(v) for v in poly.vertices]
    for i in range(poly.n_vertices):
        anchor = poly._edges_a[i] + r * poly._inward[i]
        normal = poly._inward[i]
        new_pts = []
        if not pts:
            return None
        dist = [float((p - anchor) @ normal) for p in pts]
        for j, p in enumerate(pts):
            q = pts[(j + 1) % len(pts)]
            dp, dq = dist[j], dist[(j + 1) % len(pts)]
            if dp >= 0.0:
                new_pts.append(p)
            if (dp > 0.0) != (dq > 0.0) and dp != dq:
                t = dp / (dp - dq)
                if 0.0 < t < 1.0:
                    new_pts.append(p + t * (q - p))
        pts = new_pts
    # intersections of near-parallel offset lines are reliable only down to
    # ~1e-8 * scale; closer vertices are noise and must merge, which lets a
    # near-kernel sliver collapse to < 3 points and report as degenerate
    pts = [
        p
        for i, p in enumerate(pts)
        if np.hypot(*(p - pts[i - 1])) > 1e-8 * max(1.0, poly.scale)
    ]
    if len(pts) < 3:
        return None
    area = 0.5 * sum(
        pts[i][0] * pts[(i + 1) % len(pts)][1] - pts[(i + 1) % len(pts)][0] * pts[i][1]
        for i in range(len(pts))
    )
    if area <= (1e-11 * max(1.0, poly.scale)) ** 2:
        return None
    return pts


# --- nonconvex: raw offset chain + trim ------------------------------------


def _raw_offset_elements(poly: Polygon, r: float):
    """Edge offsets and clockwise reflex arcs, before trimming."""
    els = []
    n = poly.n_vertices
    reflex = set(int(i) for i in poly.reflex_vertices())
    for i in range(n):
        a = poly._edges_a[i] + r * poly._inward[i]
        b = poly._edges_b[i] + r * poly._inward[i]
        els.append(Segment(tuple(a), tuple(b)))
        nxt = (i + 1) % n
        if nxt in reflex:
            m0 = poly._inward[i]
            m1 = poly._inward[nxt]
            theta0 = math.atan2(m0[1], m0[0])
            d0 = poly._edge_dir[i]
            d1 = poly._edge_dir[nxt]
            sweep = math.atan2(
                d0[0] * d1[1] - d0[1] * d1[0], float(d0 @ d1)
            )
            if sweep >= 0.0:
                continue
            els.append(Arc(tuple(poly.vertices[nxt]), r, theta0, sweep))
    return els


def _element_point(el, t: float) -> np.ndarray:
    return el.point_at(t)


def _seg_seg_params(s1: Segment, s2: Segment, tol: float):
    a, b = s1.start, s1.end
    c, d = s2.start, s2.end
    d1 = b - a
    d2 = d - c
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-14 * max(1.0, np.hypot(*d1) * np.hypot(*d2)):
        return []
    rel = c - a
    t = (rel[0] * d2[1] - rel[1] * d2[0]) / denom
    u = (rel[0] * d1[1] - rel[1] * d1[0]) / denom
    eps = 1e-9
    if -eps <= t <= 1.0 + eps and -eps <= u <= 1.0 + eps:
        return [(min(max(t, 0.0), 1.0), min(max(u, 0.0), 1.0))]
    return []


def _arc_param(arc: Arc, phi: float):
    """Parameter in [0, 1] if the angle phi lies in the swept range."""
    slack = 1e-9 / max(arc.radius, 1e-9)
    if arc.sweep >= 0.0:
        off = (phi - arc.theta0) % _TWO_PI
        if off > arc.sweep + slack:
            if off - _TWO_PI < -slack:
                return None
            off -= _TWO_PI
        return min(max(off / arc.sweep, 0.0), 1.0) if arc.sweep != 0.0 else 0.0
    off = (arc.theta0 - phi) % _TWO_PI
    if off > -arc.sweep + slack:
        if off - _TWO_PI < -slack:
            return None
        off -= _TWO_PI
    return min(max(off / (-arc.sweep), 0.0), 1.0)


def _seg_arc_params(seg: Segment, arc: Arc, tol: float):
    a = seg.start
    d = seg.end - a
    c = np.array(arc.center)
    L2 = float(d @ d)
    if L2 == 0.0:
        return []
    rel = a - c
    A = L2
    B = 2.0 * float(rel @ d)
    C = float(rel @ rel) - arc.radius**2
    disc = B * B - 4.0 * A * C
    if disc < -tol * max(A, 1.0):
        return []
    disc = max(disc, 0.0)
    out = []
    for sgn in (-1.0, 1.0):
        t = (-B + sgn * math.sqrt(disc)) / (2.0 * A)
        if t < -1e-9 or t > 1.0 + 1e-9:
            continue
        t_cl = min(max(t, 0.0), 1.0)
        p = a + t_cl * d
        phi = math.atan2(p[1] - c[1], p[0] - c[0])
        u = _arc_param(arc, phi)
        if u is not None:
            out.append((t_cl, u))
    return out


def _arc_arc_params(a1: Arc, a2: Arc, tol: float):
    c1 = np.array(a1.center)
    c2 = np.array(a2.center)
    d = c2 - c1
    D = float(np.hypot(*d))
    if D < 1e-14:
        return []
    r1, r2 = a1.radius, a2.radius
    if D > r1 + r2 + tol or D < abs(r1 - r2) - tol:
        return []
    x = (r1 * r1 - r2 * r2 + D * D) / (2.0 * D)
    h2 = r1 * r1 - x * x
    h = math.sqrt(max(h2, 0.0))
    base = c1 + (x / D) * d
    perp = np.array([-d[1], d[0]]) / D
    out = []
    for sgn in (1.0, -1.0):
        p = base + sgn * h * perp
        phi1 = math.atan2(p[1] - c1[1], p[0] - c1[0])
        phi2 = math.atan2(p[1] - c2[1], p[0] - c2[0])
        u1 = _arc_param(a1, phi1)
        u2 = _arc_param(a2, phi2)
        if u1 is not None and u2 is not None:
            out.append((u1, u2))
        if h <= 1e-12:
            break
    return out


def _split_element(el, params, min_len: float):
    """Sub-elements of el between sorted parameter values."""
    ts = sorted(set([0.0, 1.0] + [min(max(t, 0.0), 1.0) for t in params]))
    pieces = []
    for t0, t1 in zip(ts[:-1], ts[1:]):
        if isinstance(el, Segment):
            p0 = el.point_at(t0)
            p1 = el.point_at(t1)
            if np.hypot(*(p1 - p0)) < min_len:
                continue
            pieces.append(Segment(tuple(p0), tuple(p1)))
        else:
            sweep = (t1 - t0) * el.sweep
            if abs(sweep) * el.radius < min_len:
                continue
            pieces.append(Arc(el.center, el.radius, el.angle_at(t0), sweep))
    return pieces


def _erode_trim(poly: Polygon, r: float):
    """Components of the eroded set of a nonconvex simple polygon."""
    scale = max(1.0, poly.scale)
    tol = geom_tol(poly.scale)
    raw = _raw_offset_elements(poly, r)
    cuts: dict[int, list] = {i: [] for i in range(len(raw))}
    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            e1, e2 = raw[i], raw[j]
            if isinstance(e1, Segment) and isinstance(e2, Segment):
                hits = _seg_seg_params(e1, e2, tol)
            elif isinstance(e1, Segment):
                hits = _seg_arc_params(e1, e2, tol)
            elif isinstance(e2, Segment):
                hits = [(u, t) for (t, u) in _seg_arc_params(e2, e1, tol)]
            else:
                hits = _arc_arc_params(e1, e2, tol)
            for t, u in hits:
                cuts[i].append(t)
                cuts[j].append(u)
    min_len = 1e-11 * scale
    pieces = []
    for i, el in enumerate(raw):
        pieces.extend(_split_element(el, cuts[i], min_len))
    if not pieces:
        return []
    samples = np.array(
        [p.point_at(t) for p in pieces for t in (0.0, 0.25, 0.5, 0.75, 1.0)]
    )
    inside = poly.contains_points(samples[2::5])
    dists = poly.boundary_distances(samples).reshape(-1, 5).min(axis=1)
    # construction error of offsets/intersections is ~1e-15 * scale, so a
    # 1e-12 slack keeps every true piece while culling near-tangency slop.
    # The minimum runs over endpoint-inclusive samples: when two offsets
    # nearly coincide (a radius just past a thin-feature collapse), every
    # piece of the resulting corridor dips below r by the corridor width at
    # some endpoint, so all of them get the same verdict and the survivors
    # still close up into loops
    keep_tol = 1e-12 * scale
    kept = [
        p
        for p, ok, d in zip(pieces, inside, dists)
        if ok and d >= r - keep_tol
    ]
    if not kept:
        return []
    loops = _assemble_loops(kept, scale)
    comps = []
    holes = []
    area_tol = (1e-9 * scale) ** 2
    for loop in loops:
        chain = ArcPolygon(loop, tol=1e-6 * scale)
        if chain.area > area_tol:
            comps.append(chain)
        elif chain.area < -area_tol:
            holes.append(chain)
    # eroding a simple polygon cannot create holes (the complement is a
    # dilation of a connected set); sub-resolution negative loops are
    # near-tangency slop, anything larger means the trim went wrong
    for h in holes:
        if abs(h.area) <= (1e-5 * scale) ** 2:
            continue
        probe = h.elements[0].midpoint()
        if any(c.contains_point(probe) for c in comps):
            raise NumericalError("eroded body has a hole; unsupported topology")
    comps.sort(key=lambda c: (-c.area, c.elements[0].start[0], c.elements[0].start[1]))
    return comps


def _assemble_loops(pieces, scale: float):
    cell = 2e-9 * scale
    join_tol = 1e-6 * scale
    dangle_tol = 1e-4 * scale
    by_start: dict[tuple, list] = {}
    for idx, p in enumerate(pieces):
        key = (round(p.start[0] / cell), round(p.start[1] / cell))
        by_start.setdefault(key, []).append(idx)
    used = [False] * len(pieces)
    loops = []
    for seed in range(len(pieces)):
        if used[seed]:
            continue
        loop = [pieces[seed]]
        used[seed] = True
        cur = pieces[seed]
        guard = 0
        while guard <= len(pieces):
            guard += 1
            ex, ey = cur.end
            kx, ky = round(ex / cell), round(ey / cell)
            cand = []
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for idx in by_start.get((kx + dx, ky + dy), []):
                        if not used[idx]:
                            cand.append(idx)
            start_gap = math.hypot(
                ex - pieces[seed].start[0], ey - pieces[seed].start[1]
            )
            if cand:
                best = min(
                    cand,
                    key=lambda idx: math.hypot(
                        ex - pieces[idx].start[0], ey - pieces[idx].start[1]
                    ),
                )
                gap = math.hypot(
                    ex - pieces[best].start[0], ey - pieces[best].start[1]
                )
                if start_gap <= gap and start_gap <= join_tol:
                    loops.append(loop)
                    break
                if gap > join_tol:
                    _discard_or_raise(loop, dangle_tol, gap)
                    break
                used[best] = True
                loop.append(pieces[best])
                cur = pieces[best]
            else:
                if start_gap <= join_tol:
                    loops.append(loop)
                    break
                _discard_or_raise(loop, dangle_tol, start_gap)
                break
        else:
            raise NumericalError("loop assembly did not terminate")
    return loops


def _discard_or_raise(loop, dangle_tol: float, gap: float) -> None:
    """Drop near-tangency slop chains; real open chains are an error."""
    total = sum(p.length for p in loop)
    if total >= dangle_tol:
        raise OpenChainError(
            f"offset trim left an open chain (length {total:.2e}, gap {gap:.2e})"
        )


# ---------------------------------------------------------------------------
# rolling (dilation of an eroded body by its own radius)


def _disk_chain(center, r: float) -> ArcPolygon:
    cx, cy = center
    return ArcPolygon(
        [Arc((cx, cy), r, 0.0, math.pi), Arc((cx, cy), r, math.pi, math.pi)]
    )


def _collapse_center(points, scale: float):
    """Common point of a component that shrank below tolerance."""
    pts = np.asarray(points, dtype=float)
    c = pts.mean(axis=0)
    spread = float(np.max(np.hypot(*(pts - c).T)))
    if spread > 1e-6 * max(1.0, scale):
        raise NumericalError(
            f"degenerate component is not point-like (spread {spread:.2e})"
        )
    return c


def roll_chain(chain: ArcPolygon, r: float, scale: float = 1.0) -> ArcPolygon:
    """Outward offset of a closed chain by r (Minkowski sum with a disk).

    Concave arcs of radius exactly r collapse back onto their centers,
    reproducing reflex corners of the original domain; junction corners
    sprout counterclockwise arcs of radius r.
    """
    snap = 1e-9 * max(1.0, scale)
    # micro segments (flat caps of near-degenerate strips) carry no area;
    # dropping them lets the junction arc close the cap smoothly
    elements = [
        el
        for el in chain.elements
        if not (isinstance(el, Segment) and el.length < snap)
    ]
    if not elements:
        # the component shrank below tolerance; roll it as a ball
        c = _collapse_center([el.midpoint() for el in chain.elements], scale)
        return _disk_chain(c, r)
    images = []
    for el in elements:
        if isinstance(el, Segment):
            d = el.end - el.start
            length = np.hypot(*d)
            nrm = np.array([d[1], -d[0]]) / length
            a = el.start + r * nrm
            b = el.end + r * nrm
            images.append((a, b, [Segment(tuple(a), tuple(b))]))
        elif el.sweep >= 0.0:
            img = Arc(el.center, el.radius + r, el.theta0, el.sweep)
            images.append((img.start, img.end, [img]))
        else:
            rho = el.radius - r
            if abs(rho) <= snap:
                c = np.array(el.center)
                images.append((c, c, []))
            elif rho > 0.0:
                img = Arc(el.center, rho, el.theta0, el.sweep)
                images.append((img.start, img.end, [img]))
            else:
                raise NumericalError(
                    "concave arc tighter than the rolling radius"
                )
    out = []
    n = len(images)
    for i in range(n):
        start_i, end_i, els_i = images[i]
        out.extend(els_i)
        j = (i + 1) % n
        start_j = images[j][0]
        gap = float(np.hypot(*(end_i - start_j)))
        if gap <= snap:
            continue
        q = elements[i].end
        v0 = end_i - q
        v1 = start_j - q
        r0 = float(np.hypot(*v0))
        r1 = float(np.hypot(*v1))
        if abs(r0 - r) > 1e-6 * max(1.0, r) or abs(r1 - r) > 1e-6 * max(1.0, r):
            raise NumericalError("junction offset radius mismatch while rolling")
        phi0 = math.atan2(v0[1], v0[0])
        phi1 = math.atan2(v1[1], v1[0])
        sweep = (phi1 - phi0) % _TWO_PI
        if sweep > _TWO_PI - 1e-9:
            continue
        if sweep > math.pi + 1e-3:
            raise NumericalError("reflex junction encountered while rolling")
        out.append(Arc(tuple(q), r, phi0, sweep))
    if not out:
        # every piece collapsed (concave arcs folding onto their centers):
        # the body is a point up to tolerance and rolls to a ball
        c = _collapse_center([img[0] for img in images], scale)
        return _disk_chain(c, r)
    return ArcPolygon(out, tol=1e-6 * max(1.0, scale))


def roll_kernel(kernel: Kernel, r: float, scale: float = 1.0) -> ArcPolygon:
    """Rolled set of a degenerate kernel: a disk or a stadium."""
    if kernel.is_segment:
        (x0, y0), (x1, y1) = kernel.segment
        flat = ArcPolygon(
            [Segment((x0, y0), (x1, y1)), Segment((x1, y1), (x0, y0))],
            tol=math.inf,
        )
        return roll_chain(flat, r, scale)
    return _disk_chain(kernel.points[0], r)


def roll(body: InnerBody, r: float | None = None, scale: float = 1.0):
    """Rolled components of an eroded body (one chain per component)."""
    if r is None:
        r = body.radius
    if body.is_degenerate:
        return [roll_kernel(body.kernel, r, scale)]
    return [roll_chain(c, r, scale) for c in body.components]


def opened(domain: Domain, r: float, inr: InradiusResult | None = None):
    """Morphological opening of the domain by radius r, per component."""
    body = erode(domain, r, inr=inr)
    if body.is_empty:
        raise EmptyInnerBodyError(f"opening empty at r = {r}")
    return roll(body, r, scale=domain.scale)


# ---------------------------------------------------------------------------
# no-neck check


def no_neck_check(
    domain: Domain,
    n_samples: int = 256,
    r_min_factor: float = 1e-4,
    inr: InradiusResult | None = None,
) -> NoNeckReport:
    """Sampled connectivity check of the eroded family.

    A domain has no necks when every eroded body is connected; the check
    samples radii on a geometric grid over (0, R] and refines around any
    radius where the component count changes.
    """
    if inr is None:
        inr = inradius(domain)
    R = inr.radius
    if isinstance(domain, Disk):
        radii = tuple(np.geomspace(R * r_min_factor, R, 8))
        return NoNeckReport(
            passed=True,
            radii=radii,
            component_counts=tuple([1] * len(radii)),
            note="disk: erosion is a concentric disk at every radius",
        )
    if domain.is_convex():
        radii = tuple(np.geomspace(R * r_min_factor, R, 8))
        return NoNeckReport(
            passed=True,
            radii=radii,
            component_counts=tuple([1] * len(radii)),
            note="convex: every inner parallel body is convex, hence connected",
        )
    delta = 1e-9 * max(1.0, domain.scale)
    grid = list(np.geomspace(R * r_min_factor, R - delta, n_samples))
    counts = [_component_count(domain, r, inr) for r in grid]
    radii = list(grid)
    critical = []
    for i in range(len(grid) - 1):
        if counts[i] != counts[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            c_lo = counts[i]
            for _ in range(10):
                mid = 0.5 * (lo + hi)
                c_mid = _component_count(domain, mid, inr)
                radii.append(mid)
                counts.append(c_mid)
                if c_mid == c_lo:
                    lo = mid
                else:
                    hi = mid
            critical.append(0.5 * (lo + hi))
    order = np.argsort(radii)
    radii_sorted = tuple(float(radii[k]) for k in order)
    counts_sorted = tuple(int(counts[k]) for k in order)
    passed = all(c == 1 for c in counts_sorted)
    return NoNeckReport(
        passed=passed,
        radii=radii_sorted,
        component_counts=counts_sorted,
        critical_radii=tuple(critical),
    )


def _component_count(domain: Polygon, r: float, inr: InradiusResult) -> int:
    body = erode(domain, r, inr=inr)
    if body.is_degenerate:
        return 1
    return len(body.components)
