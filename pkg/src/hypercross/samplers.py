"""Random generation of hyperplane processes and derived point processes.

The driving object is a stationary isotropic Poisson process on affine
hyperplanes, restricted to those hitting the centred ball of radius R. Under
the normalisation used throughout (hit measure of the unit ball equal to 2),
the restricted process has Poisson(2 t R) many planes, each independent with
a uniform unit normal and an offset uniform on [0, R]; this factorisation
samples the hit measure exactly, with no rejection.

Every sampler takes an explicit generator; see :mod:`hypercross.rng` for the
reproducibility contract.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constants import ball_constants
from .errors import DomainError, TupleBudgetExceeded, Unbounded
from .geometry import GRAM_DET_TOL, Hyperplane
from .hull import (
    Polytope,
    assemble_polytope_from_halfspaces,
    origin_in_hull_interior,
)

DEFAULT_TUPLE_CAP = 10_000_000


@dataclass
class HyperplaneSample:
    """One realisation of a ball-restricted hyperplane process.

    Planes are stored as arrays (canonical form: unit normals, offsets in
    [0, radius]); ``planes`` materialises them as Hyperplane objects.
    ``skipped_tuples`` is filled by :func:`intersection_process`.
    """

    dim: int
    radius: float
    normals: np.ndarray
    offsets: np.ndarray
    skipped_tuples: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.normals.shape[0]

    @property
    def planes(self) -> list:
        return [Hyperplane(n, s) for n, s in zip(self.normals, self.offsets)]


@dataclass
class PointSample:
    """Finite realisation of a point process in R^d."""

    dim: int
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.points.shape[0]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)


@dataclass
class SimConfig:
    """Shared experiment parameters.

    The restriction radius follows the scaling R = t^(-e) with exponent
    ``e = dim / (dim + 1)`` unless overridden.
    """

    dim: int = 2
    intensity: float = 1000.0
    radius_exponent: float | None = None
    r_min: float = 0.1
    reps: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dimension must be >= 2")
        if self.intensity <= 0:
            raise DomainError("intensity must be positive")
        if self.r_min <= 0:
            raise DomainError("truncation radius must be positive")
        if self.reps < 1:
            raise DomainError("replication count must be >= 1")

    @property
    def exponent(self) -> float:
        if self.radius_exponent is not None:
            return self.radius_exponent
        return self.dim / (self.dim + 1.0)

    @property
    def radius(self) -> float:
        return float(self.intensity ** (-self.exponent))


def _unit_vectors(n: int, d: int, rng) -> np.ndarray:
    if n == 0:
        return np.empty((0, d))
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_poisson_hyperplanes(t: float, radius: float, d: int, rng) -> HyperplaneSample:
    """Poisson(2 t R) planes hitting the ball of radius R, i.i.d. uniform."""
    if t <= 0 or radius <= 0:
        raise DomainError("intensity and radius must be positive")
    if d < 2:
        raise DomainError("dimension must be >= 2")
    n = int(rng.poisson(2.0 * t * radius))
    normals = _unit_vectors(n, d, rng)
    offsets = rng.uniform(0.0, radius, size=n)
    return HyperplaneSample(d, radius, normals, offsets, meta={"t": t, "R": radius})


def sample_binomial_hyperplanes(n: int, radius: float, d: int, rng) -> HyperplaneSample:
    """Exactly ``n`` i.i.d. planes uniform on the hit set of the ball."""
    if n < 0:
        raise DomainError("count must be >= 0")
    if radius <= 0 or d < 2:
        raise DomainError("radius must be positive and dimension >= 2")
    normals = _unit_vectors(n, d, rng)
    offsets = rng.uniform(0.0, radius, size=n)
    return HyperplaneSample(d, radius, normals, offsets, meta={"n": n, "R": radius})


def _pairwise_intersections_2d(normals, offsets):
    n = normals.shape[0]
    i, j = np.triu_indices(n, k=1)
    u1, u2 = normals[i], normals[j]
    s1, s2 = offsets[i], offsets[j]
    det = u1[:, 0] * u2[:, 1] - u1[:, 1] * u2[:, 0]
    ok = det * det > GRAM_DET_TOL
    skipped = int(np.count_nonzero(~ok))
    det = det[ok]
    x = (s1[ok] * u2[ok, 1] - s2[ok] * u1[ok, 1]) / det
    y = (u1[ok, 0] * s2[ok] - u2[ok, 0] * s1[ok]) / det
    return np.stack([x, y], axis=1), skipped


@lru_cache(maxsize=64)
def _combination_array(n: int, d: int) -> np.ndarray:
    import itertools

    out = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), d)),
        dtype=np.intp,
        count=d * math.comb(n, d),
    )
    out = out.reshape(-1, d)
    out.setflags(write=False)
    return out


def _combination_chunks(n: int, d: int, chunk: int):
    total = math.comb(n, d)
    if total <= 65536:
        yield _combination_array(n, d)
        return
    import itertools

    buf = []
    for combo in itertools.combinations(range(n), d):
        buf.append(combo)
        if len(buf) == chunk:
            yield np.array(buf, dtype=np.intp)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.intp)


def _subset_intersections(normals, offsets, d, chunk=8192):
    points = []
    skipped = 0
    for idx in _combination_chunks(normals.shape[0], d, chunk):
        a = normals[idx]
        dets = np.linalg.det(a)
        ok = dets * dets > GRAM_DET_TOL
        skipped += int(np.count_nonzero(~ok))
        if ok.any():
            rhs = offsets[idx][ok][:, :, None]
            points.append(np.linalg.solve(a[ok], rhs)[:, :, 0])
    if points:
        return np.concatenate(points, axis=0), skipped
    return np.empty((0, d)), skipped


def intersection_process(sample: HyperplaneSample, cap: int = DEFAULT_TUPLE_CAP) -> PointSample:
    """All intersection points of d-subsets of the sampled planes.

    Every subset in general position contributes one point; degenerate
    subsets (Gram determinant below tolerance) are counted, never silently
    dropped, so ``len(result) + skipped == C(N, d)`` exactly. Raises
    :class:`TupleBudgetExceeded` when C(N, d) exceeds ``cap``.
    """
    n, d = len(sample), sample.dim
    total = math.comb(n, d) if n >= d else 0
    if total > cap:
        raise TupleBudgetExceeded(f"C({n},{d}) = {total} exceeds cap {cap}")
    if total == 0:
        points, skipped = np.empty((0, d)), 0
    elif d == 2:
        points, skipped = _pairwise_intersections_2d(sample.normals, sample.offsets)
    else:
        points, skipped = _subset_intersections(sample.normals, sample.offsets, d)
    sample.skipped_tuples = skipped
    meta = dict(sample.meta)
    meta.update(kind="intersection", planes=n, skipped=skipped, dim=d)
    return PointSample(d, points, meta)


def sample_limit_process(d: int, c_d: float, r_min: float, rng) -> PointSample:
    """Poisson sample of the power-law limit process outside radius r_min.

    The intensity c_d |x|^-(d+1) has total mass c_d omega_d / r_min outside
    the truncation radius; radii follow the exact inverse CDF
    ``rho = r_min / (1 - U)`` and directions are uniform on the sphere.
    """
    if r_min <= 0 or c_d <= 0:
        raise DomainError("truncation radius and limit constant must be positive")
    mean = c_d * ball_constants(d)[1] / r_min
    n = int(rng.poisson(mean))
    radii = r_min / (1.0 - rng.random(n))
    points = _unit_vectors(n, d, rng) * radii[:, None]
    return PointSample(d, points, meta={"kind": "limit", "c_d": c_d, "r_min": r_min, "dim": d})


def sample_zero_cell(d: int, gamma: float, rng, max_doublings: int = 10) -> Polytope:
    """The cell containing the origin in a Poisson hyperplane tessellation.

    Planes hitting an initial ball of radius 4d/gamma are sampled first
    (about 8d of them in expectation, so the cell closes up on the first
    pass almost always). If the candidate cell is not provably enclosed by
    that radius, planes hitting the next shell are added - by Poisson
    independence this is distributionally identical to one global draw -
    and the radius doubles, up to ``max_doublings`` times.
    """
    if gamma <= 0:
        raise DomainError("tessellation intensity must be positive")
    r_cur = 4.0 * d / gamma
    n0 = int(rng.poisson(2.0 * gamma * r_cur))
    normals = _unit_vectors(n0, d, rng)
    offsets = rng.uniform(0.0, r_cur, size=n0)
    for _ in range(max_doublings + 1):
        cell = _close_cell(normals, offsets, d, r_cur)
        if cell is not None:
            return cell
        extra = int(rng.poisson(2.0 * gamma * r_cur))
        normals = np.vstack([normals, _unit_vectors(extra, d, rng)])
        offsets = np.concatenate([offsets, rng.uniform(r_cur, 2.0 * r_cur, size=extra)])
        r_cur *= 2.0
    raise Unbounded(f"cell not enclosed after {max_doublings} radius doublings")


def _close_cell(normals, offsets, d, r_cur):
    """Try to assemble the zero cell from the planes seen so far.

    Returns None when the cell cannot yet be certified: the normals must
    positively span R^d (checked via the convex hull of the normals having
    the origin strictly inside), and every feasible vertex must lie within
    the sampled radius, otherwise unseen planes could still cut the cell.
    """
    n = normals.shape[0]
    if n < d + 1:
        return None
    if not origin_in_hull_interior(normals):
        return None

    if d == 2:
        candidates, _ = _pairwise_intersections_2d(normals, offsets)
    else:
        candidates, _ = _subset_intersections(normals, offsets, d)
    if candidates.shape[0] == 0:
        return None
    slack = normals @ candidates.T - offsets[:, None]
    bound = 1e-9 * (1.0 + np.linalg.norm(candidates, axis=1))
    feasible = np.all(slack <= bound[None, :], axis=0)
    verts = candidates[feasible]
    if verts.shape[0] < d + 1:
        return None
    norms = np.linalg.norm(verts, axis=1)
    if float(norms.max()) > r_cur:
        return None
    if d == 2:
        order = np.argsort(np.arctan2(verts[:, 1], verts[:, 0]))
        verts = verts[order]
    return assemble_polytope_from_halfspaces(verts, normals, offsets)
