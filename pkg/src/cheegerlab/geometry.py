"""Planar domains and arc-polygon boundary chains.

Domains are simple polygons (plus exact disks for round test domains).
Minimizer geometry is represented by closed chains of line segments and
circular arcs; areas and perimeters come from Green's theorem in closed
form, so no quadrature enters any measure used by the solvers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateAreaError,
    InputError,
    OpenChainError,
    SelfIntersectingError,
    TooFewVerticesError,
)

# Geometric tolerance, in input coordinate units (scaled up for large domains).
EPS_GEOM = 1e-9

_TWO_PI = 2.0 * math.pi

# fixed skew direction of the containment ray: an arbitrary angle keeps
# endpoint seams of axis-aligned and concentric geometry off the ray line
_RAY_ANGLE = 0.5537216
_RAY_C = math.cos(_RAY_ANGLE)
_RAY_S = math.sin(_RAY_ANGLE)


def geom_tol(scale: float) -> float:
    return EPS_GEOM * max(1.0, scale)


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite coordinate")
    return a


# ---------------------------------------------------------------------------
# chain elements


@dataclass(frozen=True, eq=False)
class Segment:
    """Directed straight element from a to b."""

    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(map(float, self.a)))
        object.__setattr__(self, "b", tuple(map(float, self.b)))

    @property
    def start(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def end(self) -> np.ndarray:
        return np.array(self.b)

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    def point_at(self, t: float) -> np.ndarray:
        return (1.0 - t) * self.start + t * self.end

    def midpoint(self) -> np.ndarray:
        return self.point_at(0.5)

    def area_term(self) -> float:
        return 0.5 * (self.a[0] * self.b[1] - self.b[0] * self.a[1])


@dataclass(frozen=True, eq=False)
class Arc:
    """Circular element; sweep is signed, positive = counterclockwise."""

    center: tuple
    radius: float
    theta0: float
    sweep: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(map(float, self.center)))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "theta0", float(self.theta0))
        object.__setattr__(self, "sweep", float(self.sweep))
        if self.radius <= 0.0:
            raise ValueError("arc radius must be positive")
        if abs(self.sweep) > _TWO_PI + 1e-12:
            raise ValueError("arc sweep exceeds a full turn")

    def angle_at(self, t: float) -> float:
        return self.theta0 + t * self.sweep

    def point_at(self, t: float) -> np.ndarray:
        ang = self.angle_at(t)
        return np.array(
            [
                self.center[0] + self.radius * math.cos(ang),
                self.center[1] + self.radius * math.sin(ang),
            ]
        )

    @property
    def start(self) -> np.ndarray:
        return self.point_at(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.point_at(1.0)

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def midpoint(self) -> np.ndarray:
        return self.point_at(0.5)

    def area_term(self) -> float:
        cx, cy = self.center
        r = self.radius
        a0 = self.theta0
        a1 = self.theta0 + self.sweep
        return 0.5 * (
            r * r * self.sweep
            + r * (cx * (math.sin(a1) - math.sin(a0)) - cy * (math.cos(a1) - math.cos(a0)))
        )

    def contains_angle(self, phi: float, slack: float = 0.0) -> bool:
        """Whether the ray angle phi falls in the swept angular interval."""
        if self.sweep >= 0.0:
            off = (phi - self.theta0) % _TWO_PI
            return off <= self.sweep + slack or off - _TWO_PI >= -slack
        off = (self.theta0 - phi) % _TWO_PI
        return off <= -self.sweep + slack or off - _TWO_PI >= -slack


Element = Segment | Arc


# ---------------------------------------------------------------------------
# closed chains


class ArcPolygon:
    """Closed boundary chain of segments and arcs, traversed once.

    The enclosed region lies on the left of the traversal, so an outer
    boundary has positive Green's-theorem area.  A full circle is a
    single-element chain (sweep 2*pi).
    """

    def __init__(self, elements, tol: float | None = None):
        elements = tuple(elements)
        if not elements:
            raise OpenChainError("empty chain")
        pts = [el.start for el in elements] + [elements[-1].end]
        span = max(
            np.max(np.abs(np.array([el.start for el in elements]))), 1.0
        )
        if tol is None:
            tol = 1e3 * geom_tol(span)
        for i, el in enumerate(elements):
            nxt = elements[(i + 1) % len(elements)]
            gap = float(np.hypot(*(el.end - nxt.start)))
            if gap > tol:
                raise OpenChainError(
                    f"chain gap {gap:.3e} between elements {i} and {(i + 1) % len(elements)}"
                )
        self.elements = elements
        self._area = None
        self._perimeter = None
        del pts

    @property
    def area(self) -> float:
        if self._area is None:
            self._area = float(sum(el.area_term() for el in self.elements))
        return self._area

    @property
    def perimeter(self) -> float:
        if self._perimeter is None:
            self._perimeter = float(sum(el.length for el in self.elements))
        return self._perimeter

    def bounding_box(self) -> tuple[float, float, float, float]:
        xs, ys = [], []
        for el in self.elements:
            if isinstance(el, Segment):
                xs += [el.a[0], el.b[0]]
                ys += [el.a[1], el.b[1]]
            else:
                # arc extremes: endpoints plus any axis-aligned extreme angle swept
                for t in (0.0, 1.0):
                    p = el.point_at(t)
                    xs.append(p[0])
                    ys.append(p[1])
                for k, (dx, dy) in enumerate([(1, 0), (0, 1), (-1, 0), (0, -1)]):
                    phi = 0.5 * math.pi * k
                    if el.contains_angle(phi):
                        xs.append(el.center[0] + el.radius * dx)
                        ys.append(el.center[1] + el.radius * dy)
        return min(xs), min(ys), max(xs), max(ys)

    def sample_boundary(self, per_element: int = 16) -> np.ndarray:
        pts = []
        for el in self.elements:
            n = max(2, per_element)
            if isinstance(el, Arc):
                n = max(n, int(abs(el.sweep) / 0.05) + 2)
            for i in range(n):
                pts.append(el.point_at((i + 0.5) / n))
        return np.array(pts)

    def contains_point(self, p) -> bool:
        """Crossing-number test along a fixed skew ray.

        The ray leaves the query point at an arbitrary fixed angle so that
        seams and junctions of axis-aligned chains (every ball chain meets
        itself on the horizontal through its center) cannot lie along it.
        Queries exactly on the boundary remain unreliable.
        """
        px, py = _as_point(p)
        crossings = 0
        for el in self.elements:
            if isinstance(el, Segment):
                ax = _RAY_C * (el.a[0] - px) + _RAY_S * (el.a[1] - py)
                ay = _RAY_C * (el.a[1] - py) - _RAY_S * (el.a[0] - px)
                bx = _RAY_C * (el.b[0] - px) + _RAY_S * (el.b[1] - py)
                by = _RAY_C * (el.b[1] - py) - _RAY_S * (el.b[0] - px)
                if (ay > 0.0) != (by > 0.0):
                    x_int = ax - ay * (bx - ax) / (by - ay)
                    if x_int > 0.0:
                        crossings += 1
            else:
                cx = _RAY_C * (el.center[0] - px) + _RAY_S * (el.center[1] - py)
                cy = _RAY_C * (el.center[1] - py) - _RAY_S * (el.center[0] - px)
                h = -cy
                if abs(h) >= el.radius:
                    continue
                dx = math.sqrt(el.radius * el.radius - h * h)
                if dx < 1e-14 * el.radius:
                    continue
                for sgn in (1.0, -1.0):
                    x_cand = cx + sgn * dx
                    if x_cand <= 0.0:
                        continue
                    phi = math.atan2(h, sgn * dx) + _RAY_ANGLE
                    if not el.contains_angle(phi):
                        continue
                    # count only transversal crossings of the closed chain;
                    # the arc crosses the ray line once per admissible root
                    crossings += 1
        return crossings % 2 == 1

    def boundary_distance(self, p) -> float:
        q = _as_point(p)
        best = math.inf
        for el in self.elements:
            best = min(best, _point_element_distance(q, el))
        return best

    def to_dict(self) -> dict:
        out = []
        for el in self.elements:
            if isinstance(el, Segment):
                out.append(
                    {"type": "segment", "start": list(el.a), "end": list(el.b)}
                )
            else:
                out.append(
                    {
                        "type": "arc",
                        "center": list(el.center),
                        "radius": el.radius,
                        "start_angle": el.theta0,
                        "sweep": el.sweep,
                    }
                )
        return {"elements": out}

    @staticmethod
    def from_dict(obj: dict) -> "ArcPolygon":
        els = []
        for rec in obj["elements"]:
            if rec["type"] == "segment":
                els.append(Segment(tuple(rec["start"]), tuple(rec["end"])))
            elif rec["type"] == "arc":
                els.append(
                    Arc(
                        tuple(rec["center"]),
                        float(rec["radius"]),
                        float(rec["start_angle"]),
                        float(rec["sweep"]),
                    )
                )
            else:
                raise ValueError(f"unknown element type {rec['type']!r}")
        return ArcPolygon(els)


def measure(chain: ArcPolygon) -> tuple[float, float]:
    """(area, perimeter) of a closed chain, from Green's theorem."""
    return chain.area, chain.perimeter


def _point_element_distance(q: np.ndarray, el: Element) -> float:
    if isinstance(el, Segment):
        return _point_segment_distance(q, el.start, el.end)
    d = q - np.array(el.center)
    rho = math.hypot(d[0], d[1])
    if rho < 1e-300:
        return el.radius
    phi = math.atan2(d[1], d[0])
    if el.contains_angle(phi):
        return abs(rho - el.radius)
    return min(
        float(np.hypot(*(q - el.start))),
        float(np.hypot(*(q - el.end))),
    )


def _point_segment_distance(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(q - a)))
    t = float((q - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    proj = a + t * ab
    return float(np.hypot(*(q - proj)))


# ---------------------------------------------------------------------------
# polygon domain


class Polygon:
    """Simple planar polygon, stored counterclockwise.

    Validation rejects self-intersections (including spikes and touching
    vertices), repeated points, and degenerate enclosed area.
    """

    def __init__(self, vertices, validate: bool = True):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise TooFewVerticesError("vertices must be an (n, 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinate")
        v = self._dedupe(v)
        if len(v) < 3:
            raise TooFewVerticesError(f"need at least 3 distinct vertices, got {len(v)}")
        signed = _shoelace(v)
        scale = float(np.max(np.abs(v))) if len(v) else 1.0
        if abs(signed) <= EPS_GEOM * max(1.0, scale) ** 2:
            raise DegenerateAreaError("polygon encloses no area")
        if signed < 0.0:
            v = v[::-1].copy()
            signed = -signed
        if validate:
            _check_simple(v, scale)
        v.setflags(write=False)
        self.vertices = v
        self.area = float(signed)
        self._edges_a = v
        self._edges_b = np.roll(v, -1, axis=0)
        d = self._edges_b - self._edges_a
        self._edge_len = np.hypot(d[:, 0], d[:, 1])
        self._edge_dir = d / self._edge_len[:, None]
        # interior lies on the left of each edge for ccw orientation
        self._inward = np.column_stack([-self._edge_dir[:, 1], self._edge_dir[:, 0]])
        self.perimeter = float(self._edge_len.sum())
        self.scale = scale

    @staticmethod
    def _dedupe(v: np.ndarray) -> np.ndarray:
        keep = []
        n = len(v)
        for i in range(n):
            if not keep or np.hypot(*(v[i] - v[keep[-1]])) > EPS_GEOM:
                keep.append(i)
        if len(keep) > 1 and np.hypot(*(v[keep[-1]] - v[keep[0]])) <= EPS_GEOM:
            keep.pop()
        return v[keep].copy()

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def is_convex(self) -> bool:
        d = self._edges_b - self._edges_a
        cross = d[:, 0] * np.roll(d[:, 1], -1) - d[:, 1] * np.roll(d[:, 0], -1)
        return bool(np.all(cross >= -geom_tol(self.scale) * np.max(self._edge_len)))

    def reflex_vertices(self) -> np.ndarray:
        """Indices i such that the corner at vertex i is reflex."""
        d = self._edges_b - self._edges_a
        cross = np.roll(d, 1, axis=0)[:, 0] * d[:, 1] - np.roll(d, 1, axis=0)[:, 1] * d[:, 0]
        return np.nonzero(cross < -geom_tol(self.scale) * np.max(self._edge_len))[0]

    def bounding_box(self) -> tuple[float, float, float, float]:
        return (
            float(self.vertices[:, 0].min()),
            float(self.vertices[:, 1].min()),
            float(self.vertices[:, 0].max()),
            float(self.vertices[:, 1].max()),
        )

    def contains_points(self, pts) -> np.ndarray:
        """Vectorized crossing-number interior test (boundary unreliable)."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.zeros(len(pts), dtype=bool)
        for lo in range(0, len(pts), 65536):
            out[lo : lo + 65536] = self._contains_chunk(pts[lo : lo + 65536])
        return out

    def _contains_chunk(self, pts: np.ndarray) -> np.ndarray:
        px = pts[:, 0][:, None]
        py = pts[:, 1][:, None]
        ax, ay = self._edges_a[:, 0][None, :], self._edges_a[:, 1][None, :]
        bx, by = self._edges_b[:, 0][None, :], self._edges_b[:, 1][None, :]
        straddle = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = ax + (py - ay) * (bx - ax) / (by - ay)
        hits = straddle & (x_int > px)
        return (hits.sum(axis=1) % 2).astype(bool)

    def contains_point(self, p) -> bool:
        return bool(self.contains_points(np.asarray(p, dtype=float)[None, :])[0])

    def boundary_distances(self, pts) -> np.ndarray:
        """Distance from each point to the polygon boundary (unsigned)."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.empty(len(pts))
        for lo in range(0, len(pts), 65536):
            out[lo : lo + 65536] = self._distance_chunk(pts[lo : lo + 65536])
        return out

    def _distance_chunk(self, pts: np.ndarray) -> np.ndarray:
        rel = pts[:, None, :] - self._edges_a[None, :, :]
        t = np.einsum("mne,ne->mn", rel, self._edge_dir) / self._edge_len[None, :]
        t = np.clip(t, 0.0, 1.0)
        proj = self._edges_a[None, :, :] + t[:, :, None] * (
            self._edges_b - self._edges_a
        )[None, :, :]
        d = np.hypot(pts[:, None, 0] - proj[:, :, 0], pts[:, None, 1] - proj[:, :, 1])
        return d.min(axis=1)

    def boundary_distance(self, p) -> float:
        return float(self.boundary_distances(np.asarray(p, dtype=float)[None, :])[0])

    def as_chain(self) -> ArcPolygon:
        els = [
            Segment(tuple(self._edges_a[i]), tuple(self._edges_b[i]))
            for i in range(self.n_vertices)
        ]
        return ArcPolygon(els)

    def to_json_dict(self) -> dict:
        return {"vertices": [[float(x), float(y)] for x, y in self.vertices]}


class Disk:
    """Exact round domain; keeps ball test cases free of polygonal error."""

    def __init__(self, center, radius: float):
        self.center = _as_point(center)
        self.center.setflags(write=False)
        self.radius = float(radius)
        if self.radius <= 0.0:
            raise DegenerateAreaError("disk radius must be positive")
        self.area = math.pi * self.radius**2
        self.perimeter = _TWO_PI * self.radius
        self.scale = float(max(np.max(np.abs(self.center)) + self.radius, self.radius))

    def bounding_box(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        r = self.radius
        return cx - r, cy - r, cx + r, cy + r

    def contains_points(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return d < self.radius

    def contains_point(self, p) -> bool:
        return bool(self.contains_points(np.asarray(p, dtype=float)[None, :])[0])

    def boundary_distances(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return np.abs(self.radius - d)

    def boundary_distance(self, p) -> float:
        return float(self.boundary_distances(np.asarray(p, dtype=float)[None, :])[0])

    def as_chain(self) -> ArcPolygon:
        c = tuple(self.center)
        return ArcPolygon(
            [
                Arc(c, self.radius, 0.0, math.pi),
                Arc(c, self.radius, math.pi, math.pi),
            ]
        )

    def to_json_dict(self) -> dict:
        return {
            "disk": {
                "center": [float(self.center[0]), float(self.center[1])],
                "radius": self.radius,
            }
        }


Domain = Polygon | Disk


def validate_polygon(vertices) -> Polygon:
    """Build a validated, counterclockwise simple polygon."""
    return Polygon(vertices, validate=True)


def domain_from_json_dict(obj: dict) -> Domain:
    if "vertices" in obj:
        return validate_polygon(obj["vertices"])
    if "disk" in obj:
        rec = obj["disk"]
        try:
            center = rec["center"]
            radius = float(rec["radius"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed disk record: {exc}") from exc
        if not (math.isfinite(radius) and radius > 0.0):
            raise InputError(f"disk radius must be positive, got {radius}")
        return Disk(center, radius)
    raise InputError("domain JSON needs a 'vertices' or 'disk' key")


# ---------------------------------------------------------------------------
# validation helpers


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _check_simple(v: np.ndarray, scale: float) -> None:
    n = len(v)
    tol = geom_tol(scale)
    # spikes: consecutive edges folding straight back
    for i in range(n):
        d0 = v[(i + 1) % n] - v[i]
        d1 = v[(i + 2) % n] - v[(i + 1) % n]
        cross = d0[0] * d1[1] - d0[1] * d1[0]
        if abs(cross) <= tol * max(np.hypot(*d0), np.hypot(*d1)) and d0 @ d1 < 0.0:
            raise SelfIntersectingError(f"spike at vertex {(i + 1) % n}")
    for i in range(n):
        a0, a1 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b0, b1 = v[j], v[(j + 1) % n]
            if _segments_cross(a0, a1, b0, b1, tol):
                raise SelfIntersectingError(f"edges {i} and {j} intersect")


def _segments_cross(a0, a1, b0, b1, tol: float) -> bool:
    """Whether closed segments intersect (touching counts)."""
    d1 = a1 - a0
    d2 = b1 - b0
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    rel = b0 - a0
    if abs(denom) > tol * max(1.0, np.hypot(*d1) * np.hypot(*d2)):
        t = (rel[0] * d2[1] - rel[1] * d2[0]) / denom
        u = (rel[0] * d1[1] - rel[1] * d1[0]) / denom
        eps = 1e-12
        return -eps <= t <= 1.0 + eps and -eps <= u <= 1.0 + eps
    # parallel: overlap only if collinear
    if abs(rel[0] * d1[1] - rel[1] * d1[0]) > tol * max(1.0, np.hypot(*d1)):
        return False
    # collinear: check 1-d interval overlap along the longer direction
    axis = 0 if abs(d1[0]) >= abs(d1[1]) else 1
    lo1, hi1 = sorted((a0[axis], a1[axis]))
    lo2, hi2 = sorted((b0[axis], b1[axis]))
    return min(hi1, hi2) - max(lo1, lo2) > tol


# ---------------------------------------------------------------------------
# contact length


def contact_length(chain: ArcPolygon, domain: Domain) -> float:
    """Total length of the chain's boundary that lies on the domain boundary.

    Assumes the chain is contained in the (closed) domain; only exact
    feature overlaps count, tangency contributes zero.
    """
    tol = 1e3 * geom_tol(domain.scale)
    total = 0.0
    if isinstance(domain, Disk):
        for el in chain.elements:
            if isinstance(el, Arc):
                if (
                    abs(el.radius - domain.radius) <= tol
                    and np.hypot(*(np.array(el.center) - domain.center)) <= tol
                ):
                    total += el.length
        return total
    for el in chain.elements:
        if not isinstance(el, Segment):
            continue
        p, q = el.start, el.end
        for i in range(domain.n_vertices):
            a = domain._edges_a[i]
            u = domain._edge_dir[i]
            length = domain._edge_len[i]
            # collinearity with the edge's supporting line
            dp = p - a
            dq = q - a
            if abs(dp[0] * u[1] - dp[1] * u[0]) > tol:
                continue
            if abs(dq[0] * u[1] - dq[1] * u[0]) > tol:
                continue
            s0 = float(dp @ u)
            s1 = float(dq @ u)
            lo, hi = min(s0, s1), max(s0, s1)
            overlap = min(hi, length) - max(lo, 0.0)
            if overlap > 0.0:
                total += overlap
            # no break: several edges may share one supporting line
    return total
