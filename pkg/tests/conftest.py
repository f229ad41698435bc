"""Shared fixtures: reference domains and their profiles.

Profiles are session-scoped because building one samples the rolled
family at 512 radii; the geometry itself is cheap and rebuilt per test.
"""
import numpy as np
import pytest
from scipy.spatial import ConvexHull

from cheegerlab.geometry import Disk, Polygon
from cheegerlab.profile import build_profile

# fixed seed for the random convex polygon batch used across the suite
CONVEX_SEED = 20260815
N_CONVEX = 20

# length of the thin arm that puts the two supercritical minima of the
# tie-arm domain in a near-exact tie at p = 2
TIE_ARM_LENGTH = 63.0476


def square_vertices():
    return [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def rect2x1_vertices():
    return [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]


def lshape_vertices():
    return [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]


def plus_vertices():
    return [
        (1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (3.0, 1.0), (3.0, 2.0), (2.0, 2.0),
        (2.0, 3.0), (1.0, 3.0), (1.0, 2.0), (0.0, 2.0), (0.0, 1.0), (1.0, 1.0),
    ]


def glued_arm_vertices(length=3.0, width=0.2):
    """A 2x2 square with a thin rectangular arm glued to its right side."""
    half = width / 2.0
    return [
        (0.0, 0.0), (2.0, 0.0), (2.0, 1.0 - half), (2.0 + length, 1.0 - half),
        (2.0 + length, 1.0 + half), (2.0, 1.0 + half), (2.0, 2.0), (0.0, 2.0),
    ]


def dumbbell_vertices():
    """Two unit boxes joined by a 0.5 x 0.1 neck: fails the no-neck test."""
    return [
        (0.0, 0.0), (1.0, 0.0), (1.0, 0.45), (1.5, 0.45), (1.5, 0.0),
        (2.5, 0.0), (2.5, 1.0), (1.5, 1.0), (1.5, 0.55), (1.0, 0.55),
        (1.0, 1.0), (0.0, 1.0),
    ]


def random_convex_polygons(count=N_CONVEX, seed=CONVEX_SEED, n_min=8, n_max=16):
    """Convex hulls of random point clouds, rejected to 8..16 vertices."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        pts = rng.random((60, 2)) * rng.uniform(0.5, 3.0, size=2)
        hull = ConvexHull(pts)
        if not (n_min <= len(hull.vertices) <= n_max):
            continue
        out.append(Polygon(pts[hull.vertices]))
    return out


@pytest.fixture
def square():
    return Polygon(square_vertices())


@pytest.fixture
def rect2x1():
    return Polygon(rect2x1_vertices())


@pytest.fixture
def unit_disk():
    return Disk((0.0, 0.0), 1.0)


@pytest.fixture
def lshape():
    return Polygon(lshape_vertices())


@pytest.fixture
def plus_shape():
    return Polygon(plus_vertices())


@pytest.fixture
def glued_arm():
    return Polygon(glued_arm_vertices())


@pytest.fixture
def tie_arm():
    return Polygon(glued_arm_vertices(length=TIE_ARM_LENGTH))


@pytest.fixture
def dumbbell():
    return Polygon(dumbbell_vertices())


@pytest.fixture(scope="session")
def square_profile():
    return build_profile(Polygon(square_vertices()))


@pytest.fixture(scope="session")
def rect_profile():
    return build_profile(Polygon(rect2x1_vertices()))


@pytest.fixture(scope="session")
def disk_profile():
    return build_profile(Disk((0.0, 0.0), 1.0))


@pytest.fixture(scope="session")
def lshape_profile():
    return build_profile(Polygon(lshape_vertices()))


@pytest.fixture(scope="session")
def glued_arm_profile():
    return build_profile(Polygon(glued_arm_vertices()))


@pytest.fixture(scope="session")
def convex_batch():
    return random_convex_polygons()


@pytest.fixture(scope="session")
def convex_batch_profiles(convex_batch):
    return [build_profile(p) for p in convex_batch]


def exhaustive_min_energy(grid):
    """Brute-force minimum of the grid energy over every pixel subset.

    Search is an independent float model of the stencil energy (all 2^n
    subsets, vectorized); candidates within a quantization-sized window of
    the float minimum are then re-scored exactly with grid_energy.  Returns
    (exact_min, union_of_minimizers).
    """
    from cheegerlab.oracle import grid_energy

    mask = grid.mask
    cells = np.argwhere(mask)
    n = len(cells)
    if n == 0:
        return 0.0, np.zeros(mask.shape, bool)
    if n > 20:
        raise ValueError("exhaustive search capped at 20 pixels")
    index = -np.ones(mask.shape, dtype=int)
    index[mask] = np.arange(n)

    internal = []   # (k1, k2, w)
    single = []     # (k, w)
    nr, nc = mask.shape
    for (dr, dc), w in grid.stencil:
        w = float(w)
        for k, (r, c) in enumerate(cells):
            rp, cp = r + dr, c + dc
            if 0 <= rp < nr and 0 <= cp < nc and mask[rp, cp]:
                internal.append((k, int(index[rp, cp]), w))
            else:
                single.append((k, w))
            rm, cm = r - dr, c - dc
            if not (0 <= rm < nr and 0 <= cm < nc and mask[rm, cm]):
                single.append((k, w))

    bits = (np.arange(1 << n, dtype=np.uint32)[:, None] >> np.arange(n)) & 1
    energies = -grid.kappa * grid.spacing**2 * bits.sum(axis=1, dtype=np.float64)
    for k, w in single:
        energies += w * bits[:, k]
    for k1, k2, w in internal:
        energies += w * (bits[:, k1] ^ bits[:, k2])

    window = energies.min() + 1e-4
    exact_best = None
    union = np.zeros(mask.shape, bool)
    for code in np.nonzero(energies <= window)[0]:
        sel = np.zeros(mask.shape, bool)
        sel[tuple(cells[bits[code].astype(bool)].T)] = True
        e = grid_energy(grid, sel)
        if exact_best is None or e < exact_best:
            exact_best = e
            union = sel
        elif e == exact_best:
            union |= sel
    return exact_best, union
