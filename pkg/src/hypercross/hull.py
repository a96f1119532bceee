"""Convex polytopes: hulls, face lattices, polar duality.

Two hull paths are provided. Dimension 2 uses a monotone chain, which is the
hot path for planar experiments. Dimension >= 3 uses an incremental
construction: starting from a full-dimensional simplex, each remaining point
that lies strictly outside the current hull replaces its visible facets by a
cone of new facets over the horizon ridges. Coplanarity is decided by a
relative epsilon on the signed-volume predicate (default 1e-9, with one
documented retry at 1e-7 if the construction turns out inconsistent).

The face lattice is derived from vertex-facet incidence: a k-face is a
maximal vertex set contained in at least d-k common facets. This is cheap
for the small polytopes sampled here and is supported for d <= 6.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, OriginNotInterior
from .rng import master_rng

HULL_TOL = 1e-9
HULL_RETRY_TOL = 1e-7

# Face-lattice construction gets combinatorially expensive past this.
MAX_LATTICE_DIM = 6


class _HullNumerics(Exception):
    """Internal signal: retry the construction with a looser epsilon."""


@dataclass
class Polytope:
    """Bounded convex polytope with explicit combinatorics.

    vertices      : (n, d) array, one row per vertex
    facet_normals : (m, d) array of unit outward normals
    facet_offsets : (m,) support values, the polytope is {x : N x <= b}
    face_lattice  : face_lattice[k] lists the k-faces (k = 0 .. d-1) as
                    sorted tuples of vertex indices
    """

    vertices: np.ndarray
    facet_normals: np.ndarray
    facet_offsets: np.ndarray
    face_lattice: list

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def f_vector(self) -> tuple:
        return tuple(len(level) for level in self.face_lattice)

    def contains(self, points, tol: float = HULL_TOL) -> bool:
        """True when every point satisfies all facet inequalities within tol."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        slack = self.facet_normals @ pts.T - self.facet_offsets[:, None]
        bound = tol * (1.0 + np.linalg.norm(pts, axis=1))
        return bool(np.all(slack <= bound[None, :]))

    def support(self, directions) -> np.ndarray:
        """Support function h(u) = max_x <u, x> over the polytope."""
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        return (self.vertices @ dirs.T).max(axis=0)

    def max_violation(self, points) -> float:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        slack = self.facet_normals @ pts.T - self.facet_offsets[:, None]
        return float(slack.max())


def f_vector(p: Polytope) -> tuple:
    """Face counts (f_0, ..., f_{d-1}) from the face lattice."""
    return p.f_vector()


def euler_relation_holds(fv, d: int) -> bool:
    """Check sum_k (-1)^k f_k == 1 - (-1)^d."""
    alt = sum((-1) ** k * c for k, c in enumerate(fv))
    return alt == 1 - (-1) ** d


def polygon_area(p: Polytope) -> float:
    """Area of a 2-polytope whose vertices are stored in cyclic order."""
    if p.dim != 2:
        raise ValueError("polygon_area is only defined for d = 2")
    v = p.vertices
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


# ---------------------------------------------------------------------------
# hull construction


def convex_hull(points, tol: float = HULL_TOL) -> Polytope:
    """Convex hull of a full-dimensional point set.

    Vertices of the result are a subset of the input points; all input
    points satisfy the facet inequalities within ``tol`` relative tolerance.
    Raises :class:`Degenerate` when the input is not affinely
    full-dimensional within tolerance.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.ndim != 2:
        raise ValueError("points must be a 2d array-like")
    n, d = pts.shape
    if d < 2:
        raise ValueError("ambient dimension must be >= 2")
    if n < d + 1:
        raise Degenerate(f"need at least {d + 1} distinct points in dimension {d}")

    for attempt_tol in (tol, HULL_RETRY_TOL):
        try:
            if d == 2:
                vertices = pts[_chain_2d(pts, attempt_tol)]
                normals, offsets = _polygon_facets(vertices)
            else:
                vert_ids, facet_planes = _hull_nd(pts, attempt_tol)
                vertices = pts[vert_ids]
                normals = np.stack([f[0] for f in facet_planes])
                offsets = np.array([f[1] for f in facet_planes])
            poly = _assemble_polytope(vertices, normals, offsets, attempt_tol)
            # containment of the full input is the construction's contract
            if not poly.contains(pts, 100 * attempt_tol):
                raise _HullNumerics("input point escapes the built hull")
            return poly
        except _HullNumerics:
            if attempt_tol == HULL_RETRY_TOL:
                raise RuntimeError("convex hull construction failed at both tolerances")
    raise AssertionError("unreachable")


def _coord_scale(pts) -> float:
    return max(1.0, float(np.max(np.abs(pts))))


def _chain_2d(pts: np.ndarray, tol: float) -> list:
    """Monotone chain; returns vertex indices in counter-clockwise order.

    The turn predicate is scale-free: a triple counts as collinear when the
    cross product is below ``tol`` times the product of the edge lengths
    (i.e. the sine of the turn angle is below tol). Point clouds spanning
    many orders of magnitude keep their near-origin vertices this way.
    """
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    coords = pts[order].tolist()
    idx = order.tolist()

    def build(rng_iter):
        out = []
        for i in rng_iter:
            x, y = coords[i]
            while len(out) >= 2:
                ox, oy = coords[out[-2]]
                ax, ay = coords[out[-1]]
                ux, uy = ax - ox, ay - oy
                vx, vy = x - ox, y - oy
                cross = ux * vy - uy * vx
                if cross <= tol * math.sqrt((ux * ux + uy * uy) * (vx * vx + vy * vy)):
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    m = len(coords)
    lower = build(range(m))
    upper = build(range(m - 1, -1, -1))
    cyc = lower[:-1] + upper[:-1]
    if len(cyc) < 3:
        raise Degenerate("points are collinear within tolerance")
    return [idx[i] for i in cyc]


def _polygon_facets(vertices: np.ndarray):
    """Outward unit normals and offsets for a CCW-ordered polygon."""
    nxt = np.roll(vertices, -1, axis=0)
    edges = nxt - vertices
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = np.einsum("ij,ij->i", normals, vertices)
    return normals, offsets


def _initial_simplex(pts: np.ndarray, eps: float) -> list:
    """Indices of d+1 affinely independent points, greedily far apart."""
    n, d = pts.shape
    first = int(np.lexsort(pts.T[::-1])[0])
    chosen = [first]
    basis = np.zeros((0, d))
    for _ in range(d):
        rel = pts - pts[first]
        resid = rel - rel @ basis.T @ basis
        dist = np.linalg.norm(resid, axis=1)
        j = int(np.argmax(dist))
        if dist[j] <= eps:
            raise Degenerate("points are not full-dimensional within tolerance")
        chosen.append(j)
        new = resid[j] / dist[j]
        basis = np.vstack([basis, new])
    return chosen


def _facet_plane(V: np.ndarray, interior: np.ndarray, eps: float):
    """Oriented unit normal and offset of the hyperplane through d points."""
    d = V.shape[1]
    A = V[1:] - V[0]
    if d == 3:
        nrm = np.cross(A[0], A[1])
        nn = float(np.linalg.norm(nrm))
        if nn <= eps * max(1.0, float(np.abs(A).max())):
            raise _HullNumerics("degenerate facet simplex")
        nrm = nrm / nn
    else:
        s, vt = np.linalg.svd(A, compute_uv=True)[1:]
        if s[-1] <= eps * max(1.0, float(s[0])):
            raise _HullNumerics("degenerate facet simplex")
        nrm = vt[-1]
    off = float(nrm @ V[0])
    side = float(nrm @ interior) - off
    if abs(side) <= eps:
        raise _HullNumerics("interior reference point lies on a facet plane")
    if side > 0:
        nrm, off = -nrm, -off
    return nrm, off


def _facet_planes_3d(tris: np.ndarray, interior: np.ndarray, eps: float):
    """Vectorised plane fit for a batch of triangle facets in R^3."""
    a = tris[:, 1] - tris[:, 0]
    b = tris[:, 2] - tris[:, 0]
    nrm = np.stack(
        [
            a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
            a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
            a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
        ],
        axis=1,
    )
    nn = np.linalg.norm(nrm, axis=1)
    if np.any(nn <= eps * max(1.0, float(np.abs(tris).max()))):
        raise _HullNumerics("degenerate facet simplex")
    nrm /= nn[:, None]
    off = np.einsum("ij,ij->i", nrm, tris[:, 0])
    side = nrm @ interior - off
    if np.any(np.abs(side) <= eps):
        raise _HullNumerics("interior reference point lies on a facet plane")
    flip = side > 0
    nrm[flip] *= -1.0
    off[flip] *= -1.0
    return nrm, off


def _hull_nd(pts: np.ndarray, tol: float):
    """Incremental hull for d >= 3.

    Returns (sorted vertex indices, list of (normal, offset) facet planes),
    with coplanar facet groups merged and facet-interior points discarded.
    Facet arrays are kept compacted so each insertion is a single matrix
    product plus ridge bookkeeping over the visible facets.
    """
    n, d = pts.shape
    scale = _coord_scale(pts)
    eps = tol * scale

    simplex = _initial_simplex(pts, eps)
    interior = pts[simplex].mean(axis=0)

    first = list(itertools.combinations(sorted(simplex), d))
    planes = [_facet_plane(pts[list(vs)], interior, eps) for vs in first]
    normals = np.array([p[0] for p in planes])
    offsets = np.array([p[1] for p in planes])
    verts_of = list(first)

    in_simplex = set(simplex)
    for i in range(n):
        if i in in_simplex:
            continue
        p = pts[i]
        sv = normals @ p - offsets
        outside = sv > eps
        if not outside.any():
            continue
        ridge_count: dict = {}
        for f in np.flatnonzero(outside):
            vs = verts_of[f]
            for j in range(d):
                r = vs[:j] + vs[j + 1 :]
                ridge_count[r] = ridge_count.get(r, 0) + 1
        horizon = [r for r, c in ridge_count.items() if c == 1]
        if not horizon:
            raise _HullNumerics("no horizon ridges for an outside point")
        new_vs = [tuple(sorted(r + (i,))) for r in horizon]
        if d == 3:
            tris = pts[np.array([list(vs) for vs in new_vs])]
            new_n, new_b = _facet_planes_3d(tris, interior, eps)
        else:
            fitted = [_facet_plane(pts[list(vs)], interior, eps) for vs in new_vs]
            new_n = np.array([p[0] for p in fitted])
            new_b = np.array([p[1] for p in fitted])
        keep = ~outside
        normals = np.concatenate([normals[keep], new_n])
        offsets = np.concatenate([offsets[keep], new_b])
        verts_of = [vs for vs, k in zip(verts_of, keep) if k] + new_vs

    final = range(len(verts_of))
    groups = _merge_coplanar(final, verts_of, normals, offsets, eps)

    facet_planes = []
    vertex_ids: set = set()
    for fids, vs_union in groups:
        if len(fids) > 1:
            vs_union = _extreme_on_facet(pts, vs_union, normals[fids[0]], tol)
        rep_n = normals[fids].mean(axis=0)
        rep_n /= np.linalg.norm(rep_n)
        rep_b = float(np.mean(offsets[fids]))
        facet_planes.append((rep_n, rep_b))
        vertex_ids.update(vs_union)
    return sorted(vertex_ids), facet_planes


def _merge_coplanar(fids, verts_of, normals, offsets, eps):
    """Union-find grouping of facets whose supporting planes coincide."""
    fids = list(fids)
    k = len(fids)
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    nrm = normals[fids]
    off = offsets[fids]
    for a in range(k):
        close = np.flatnonzero(
            (nrm[a + 1 :] @ nrm[a] > 1.0 - 1e-8) & (np.abs(off[a + 1 :] - off[a]) <= 10 * eps)
        )
        for b in close + a + 1:
            ra, rb = find(a), find(int(b))
            if ra != rb:
                parent[rb] = ra
    buckets: dict = {}
    for a in range(k):
        buckets.setdefault(find(a), []).append(a)
    groups = []
    for members in buckets.values():
        group_fids = [fids[a] for a in members]
        vs: set = set()
        for f in group_fids:
            vs.update(verts_of[f])
        groups.append((group_fids, tuple(sorted(vs))))
    return groups


def _extreme_on_facet(pts, vertex_ids, normal, tol):
    """Prune facet-interior points after a coplanar merge.

    Projects the candidate vertices into the facet plane and keeps only the
    extreme ones of the projected (d-1)-dimensional configuration.
    """
    ids = list(vertex_ids)
    basis = _plane_basis(normal)
    proj = pts[ids] @ basis.T
    keep = _extreme_indices(proj, tol)
    return tuple(sorted(ids[j] for j in keep))


def _plane_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``normal``."""
    d = normal.shape[0]
    m = np.vstack([normal, np.eye(d)])
    q = np.linalg.qr(m.T)[0]
    return q[:, 1:d].T


def _extreme_indices(pts: np.ndarray, tol: float) -> list:
    """Indices of the extreme points of a small full-dimensional set."""
    n, d = pts.shape
    if d == 1:
        return [int(np.argmin(pts[:, 0])), int(np.argmax(pts[:, 0]))]
    if d == 2:
        try:
            return _chain_2d(pts, tol)
        except Degenerate:
            return _extreme_indices(pts[:, :1], tol)
    try:
        ids, _ = _hull_nd(pts, tol)
        return list(ids)
    except (Degenerate, _HullNumerics):
        return list(range(n))


# ---------------------------------------------------------------------------
# face lattice and assembly


def _assemble_polytope(vertices, normals, offsets, tol) -> Polytope:
    """Build a Polytope (incidence, pruning, face lattice) from raw data.

    Facets supported by fewer than d vertices are dropped; this also removes
    candidate halfspaces that do not touch the body (used by the zero-cell
    sampler, which passes every sampled plane).
    """
    vertices = np.asarray(vertices, dtype=float)
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    n, d = vertices.shape
    if d > MAX_LATTICE_DIM:
        raise ValueError(f"face lattice construction supports d <= {MAX_LATTICE_DIM}")

    inc = _incidence(vertices, normals, offsets, tol)
    keep = np.flatnonzero(inc.sum(axis=0) >= d)
    if keep.size < d + 1:
        raise _HullNumerics("fewer than d+1 supporting facets")
    inc = inc[:, keep]
    normals = normals[keep]
    offsets = offsets[keep]
    if np.any(inc.sum(axis=1) < d):
        raise _HullNumerics("vertex incident to fewer than d facets")

    facet_vsets = [
        tuple(int(v) for v in np.flatnonzero(inc[:, j])) for j in range(inc.shape[1])
    ]
    if all(len(vs) == d for vs in facet_vsets):
        lattice = _lattice_simplicial(facet_vsets, d)
    else:
        lattice = _lattice_closure(vertices, facet_vsets, tol)
    if len(lattice[0]) != n:
        raise _HullNumerics("face lattice lost vertices")
    return Polytope(vertices, normals, offsets, lattice)


def _incidence(vertices, normals, offsets, tol) -> np.ndarray:
    slack = np.abs(vertices @ normals.T - offsets[None, :])
    bound = 10 * tol * (1.0 + np.linalg.norm(vertices, axis=1))
    return slack <= bound[:, None]


def _lattice_simplicial(facet_vsets, d: int) -> list:
    """Face lattice of a simplicial polytope: all subsets of facet simplices."""
    lattice = [None] * d
    lattice[d - 1] = sorted(set(facet_vsets))
    for k in range(d - 1):
        faces = set()
        for vs in facet_vsets:
            faces.update(itertools.combinations(vs, k + 1))
        lattice[k] = sorted(faces)
    return lattice


def _lattice_closure(vertices, facet_vsets, tol) -> list:
    """General face lattice via closure of vertex-facet incidence.

    Every face of a polytope is the intersection of the facets containing
    it, so the meet-closure of the facet vertex sets enumerates all faces;
    they are then bucketed by affine rank.
    """
    n, d = vertices.shape
    scale = _coord_scale(vertices)
    m = len(facet_vsets)
    vmask = [0] * n
    vbits_of_facet = []
    for j, vs in enumerate(facet_vsets):
        bits = 0
        for v in vs:
            bits |= 1 << v
            vmask[v] |= 1 << j
        vbits_of_facet.append(bits)
    full_f = (1 << m) - 1

    def closure(vbits: int) -> int:
        fbits = full_f
        b = vbits
        while b:
            v = (b & -b).bit_length() - 1
            fbits &= vmask[v]
            b &= b - 1
        if fbits == 0:
            return 0
        out = 0
        for v in range(n):
            if vmask[v] & fbits == fbits:
                out |= 1 << v
        return out

    seen = set()
    queue = []
    for vbits in vbits_of_facet:
        cl = closure(vbits)
        if cl and cl not in seen:
            seen.add(cl)
            queue.append(cl)
    while queue:
        cur = queue.pop()
        for fb in vbits_of_facet:
            nb = cur & fb
            if nb == 0 or nb == cur:
                continue
            cl = closure(nb)
            if cl and cl not in seen:
                seen.add(cl)
                queue.append(cl)

    lattice = [[] for _ in range(d)]
    for vbits in seen:
        ids = _bits_to_tuple(vbits)
        rank = _affine_rank(vertices[list(ids)], tol * scale)
        if rank <= d - 1:
            lattice[rank].append(ids)
    return [sorted(level) for level in lattice]


def _bits_to_tuple(bits: int) -> tuple:
    out = []
    while bits:
        v = (bits & -bits).bit_length() - 1
        out.append(v)
        bits &= bits - 1
    return tuple(out)


def _affine_rank(x: np.ndarray, eps: float) -> int:
    if x.shape[0] == 1:
        return 0
    a = x[1:] - x[0]
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > eps * max(1.0, float(s[0]))))


def assemble_polytope_from_halfspaces(vertices, normals, offsets, tol=HULL_TOL) -> Polytope:
    """Public wrapper used by samplers that already know vertices and planes."""
    try:
        return _assemble_polytope(vertices, normals, offsets, tol)
    except _HullNumerics:
        return _assemble_polytope(vertices, normals, offsets, HULL_RETRY_TOL)


# ---------------------------------------------------------------------------
# polar duality and Hausdorff distance


def polar_dual(p: Polytope, tol: float = HULL_TOL) -> Polytope:
    """Polar dual {x : <x, y> <= 1 for all y in p} of a polytope with 0 inside.

    Each facet (u, h) of ``p`` becomes the dual vertex u/h; each vertex x of
    ``p`` becomes the dual facet with normal x/|x| and offset 1/|x|. The face
    lattice is transposed, so f_k(dual) = f_{d-1-k}(p), and the double dual
    restores the original vertex set.
    """
    if float(p.facet_offsets.min()) <= tol:
        raise OriginNotInterior("all facet support values must exceed tol")
    d = p.dim
    dual_vertices = p.facet_normals / p.facet_offsets[:, None]
    vnorms = np.linalg.norm(p.vertices, axis=1)
    dual_normals = p.vertices / vnorms[:, None]
    dual_offsets = 1.0 / vnorms

    inc = _incidence(p.vertices, p.facet_normals, p.facet_offsets, tol)
    dual_lattice = [None] * d
    for k in range(d):
        level = []
        for face in p.face_lattice[k]:
            common = np.flatnonzero(inc[list(face)].all(axis=0))
            level.append(tuple(int(j) for j in common))
        dual_lattice[d - 1 - k] = sorted(level)
    return Polytope(dual_vertices, dual_normals, dual_offsets, dual_lattice)


def origin_in_hull_interior(points, tol: float = 1e-9) -> bool:
    """True when 0 lies strictly inside the convex hull of the points.

    Used as the positive-span test for unit normals: the normals of a cell
    positively span R^d exactly when their hull has the origin interior.
    Skips face-lattice assembly for speed.
    """
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    try:
        if d == 2:
            vertices = pts[_chain_2d(pts, tol)]
            normals, offsets = _polygon_facets(vertices)
        else:
            _ids, planes = _hull_nd(pts, tol)
            offsets = np.array([b for _n, b in planes])
    except (Degenerate, _HullNumerics):
        return False
    return bool(offsets.min() > tol)


def direction_grid(d: int, n: int) -> np.ndarray:
    """Deterministic quasi-uniform unit directions for support comparisons."""
    if d == 2:
        ang = 2.0 * math.pi * np.arange(n) / n
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if d == 3:
        i = np.arange(n) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    g = master_rng(0xD1CE).standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


def approx_hausdorff(p: Polytope, q: Polytope, ndirs: int = 512) -> float:
    """Direction-grid approximation of the Hausdorff distance.

    For convex bodies the Hausdorff distance equals the sup-norm distance of
    the support functions; this evaluates it on ``ndirs`` quasi-uniform
    directions, hence is exact in the limit and diagnostic-grade otherwise.
    """
    if p.dim != q.dim:
        raise ValueError("polytopes must share the ambient dimension")
    dirs = direction_grid(p.dim, ndirs)
    return float(np.max(np.abs(p.support(dirs) - q.support(dirs))))
