"""Deterministic geometric primitives.

Hyperplanes are stored in canonical form ``(u, s)`` with unit normal ``u``
and offset ``s >= 0``, i.e. the plane ``{x : <u, x> = s}``. The pair
``(-u, -s)`` describes the same plane; canonicalisation makes hashing and
deduplication unambiguous.

All tolerances in this module are engineering choices: the processes being
simulated are in general position almost surely, so the thresholds only have
to separate "generic" from "numerically hopeless".
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearSingular

# A d-tuple of unit normals counts as degenerate when the Gram determinant
# (squared parallelotope volume) falls below this.
GRAM_DET_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine hyperplane ``{x : <normal, x> = offset}`` in canonical form."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))
        object.__setattr__(self, "offset", float(self.offset))
        norm = float(np.linalg.norm(self.normal))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"normal must be a unit vector, got norm {norm!r}")
        if self.offset < 0:
            raise ValueError("offset must be >= 0 (use canonical_hyperplane)")
        self.normal.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def signed_distance(self, x) -> float:
        """Distance of ``x`` from the plane, positive on the far side from 0."""
        return float(np.dot(self.normal, np.asarray(x, dtype=float)) - self.offset)

    def key(self, decimals: int = 12) -> tuple:
        """Hashable rounded representation, for deduplication."""
        return (round(self.offset, decimals), tuple(np.round(self.normal, decimals)))


def canonical_hyperplane(normal, offset) -> Hyperplane:
    """Normalise ``(normal, offset)`` to canonical form.

    The normal is rescaled to unit length, the sign is flipped so the offset
    is nonnegative, and for offset zero the normal with first nonzero
    coordinate positive is chosen.
    """
    u = np.asarray(normal, dtype=float).copy()
    norm = float(np.linalg.norm(u))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("normal must be a nonzero finite vector")
    u /= norm
    s = float(offset) / norm
    if s < 0.0:
        u, s = -u, -s
    elif s == 0.0:
        nz = np.flatnonzero(u)
        if nz.size and u[nz[0]] < 0:
            u = -u
    return Hyperplane(u, s)


def subspace_determinant(normals) -> float:
    """Volume of the parallelepiped spanned by the given vectors.

    Computed as the square root of the Gram determinant, which is symmetric
    under permutations and invariant under sign flips of any input. For unit
    vectors the value lies in [0, 1]; degenerate inputs give 0.
    """
    v = np.atleast_2d(np.asarray(normals, dtype=float))
    if v.shape[0] > v.shape[1]:
        return 0.0
    gram = v @ v.T
    return math.sqrt(max(float(np.linalg.det(gram)), 0.0))


def intersect_hyperplanes(planes, tol: float = 1e-12) -> np.ndarray:
    """Unique intersection point of ``d`` hyperplanes in dimension ``d``.

    Raises :class:`NearSingular` when the normal matrix has absolute
    determinant below ``tol`` (hyperplanes not in general position), or when
    the solved point fails the residual bound ``|<u_i, x> - s_i| <=
    tol * (1 + |x|)``.
    """
    normals, offsets = _plane_arrays(planes)
    d = normals.shape[1]
    if normals.shape[0] != d:
        raise ValueError(f"need exactly {d} hyperplanes in dimension {d}")
    det = float(np.linalg.det(normals))
    if abs(det) < tol:
        raise NearSingular(f"normal matrix determinant {det:.3e} below {tol:.3e}")
    x = np.linalg.solve(normals, offsets)
    residual = float(np.max(np.abs(normals @ x - offsets)))
    if residual > tol * (1.0 + float(np.linalg.norm(x))):
        raise NearSingular(f"solution residual {residual:.3e} exceeds tolerance")
    return x


def _plane_arrays(planes) -> tuple[np.ndarray, np.ndarray]:
    """Stack a list of Hyperplane (or an (normals, offsets) pair) into arrays."""
    if isinstance(planes, tuple) and len(planes) == 2:
        normals = np.asarray(planes[0], dtype=float)
        offsets = np.asarray(planes[1], dtype=float)
        return normals, offsets
    normals = np.stack([p.normal for p in planes])
    offsets = np.array([p.offset for p in planes], dtype=float)
    return normals, offsets


def haar_rotations(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent rotations drawn from the Haar measure on SO(d).

    Each rotation comes from the QR factorisation of a d x d standard
    Gaussian matrix: the signs are corrected so every diagonal factor of R is
    positive (which makes Q Haar on the full orthogonal group), then matrices
    with determinant -1 have their last column flipped.
    """
    if d < 2:
        raise ValueError("rotation dimension must be >= 2")
    a = rng.standard_normal((n, d, d))
    q, r = np.linalg.qr(a)
    diag = np.einsum("...ii->...i", r)
    signs = np.where(diag < 0, -1.0, 1.0)
    q = q * signs[:, None, :]
    neg = np.linalg.det(q) < 0
    q[neg, :, -1] *= -1.0
    return q


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed rotation matrix from SO(d)."""
    return haar_rotations(d, 1, rng)[0]


def is_rotation(m: np.ndarray, tol: float = 1e-10) -> bool:
    """Check orthogonality (entrywise) and determinant +1 within ``tol``."""
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    if m.shape != (d, d):
        return False
    ortho = float(np.max(np.abs(m.T @ m - np.eye(d))))
    return ortho < tol and abs(float(np.linalg.det(m)) - 1.0) < tol


def batched_abs_det(a: np.ndarray) -> np.ndarray:
    """Absolute determinants of a stack of small square matrices.

    Hand-expanded for sizes 1-3 (the Monte Carlo hot paths), LAPACK
    otherwise.
    """
    m = a.shape[-1]
    if m == 1:
        return np.abs(a[..., 0, 0])
    if m == 2:
        return np.abs(a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0])
    if m == 3:
        return np.abs(
            a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
        )
    return np.abs(np.linalg.det(a))
