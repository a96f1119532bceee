"""Constants and densities of the intersection process and its limit.

The limiting intensity of the ball-restricted hyperplane intersection
process has density ``c_d / |x|^(d+1)``. The dimension constant ``c_d``
equals ``(2 w_{d-1}/w_d)^d / d!`` times the expected volume of a random
parallelotope spanned by d independent vectors uniform on
``S^(d-2) x [-1, 1]`` (unit sphere of a fixed coordinate hyperplane, plus a
uniform last coordinate). Only d = 2 admits a closed form, ``4 / (3 pi^2)``;
higher dimensions are evaluated by Monte Carlo with a reported standard
error, and verified golden values are kept in
:data:`LIMIT_CONSTANT_REFERENCE`.

All 1d quadratures use adaptive Simpson with a 1e-10 target; endpoint
square-root singularities are removed by the ``y = sin(phi)`` substitution
before integrating.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NearSingular
from .geometry import batched_abs_det, haar_rotations

_MC_CHUNK = 1 << 19


# ---------------------------------------------------------------------------
# exact constants

def _gamma_half(two_z: int) -> float:
    """Gamma(two_z / 2) for integer two_z >= 1, by upward recursion."""
    if two_z < 1:
        raise DomainError("argument must be >= 1/2")
    if two_z % 2 == 0:
        val, z = 1.0, 1.0  # Gamma(1)
    else:
        val, z = math.sqrt(math.pi), 0.5  # Gamma(1/2)
    while 2 * z < two_z:
        val *= z
        z += 1.0
    return val


def ball_constants(d: int) -> tuple:
    """Volume kappa_d of the unit ball and surface area omega_d of its sphere.

    kappa_d = pi^(d/2) / Gamma(1 + d/2) and omega_d = d * kappa_d.
    """
    if d < 1:
        raise DomainError("dimension must be >= 1")
    kappa = math.pi ** (d / 2.0) / _gamma_half(d + 2)
    return kappa, d * kappa


def limit_constant_2d() -> float:
    """Closed-form planar limit constant 4 / (3 pi^2)."""
    return 4.0 / (3.0 * math.pi**2)


def dual_intensity(d: int, c_d: float) -> float:
    """Hyperplane-process intensity whose zero cell is the polar match.

    The convex hull of the limit process is distributed as the polar dual of
    the zero cell of a tessellation with this intensity: c_d * omega_d / 2.
    """
    if c_d <= 0:
        raise DomainError("limit constant must be positive")
    return 0.5 * c_d * ball_constants(d)[1]


# Reference values for the limit constant. d = 2 is exact. d = 3 comes from
# a deterministic quadrature oracle (angular tensor grid x exact box-spline
# formula for E|a1 U1 + a2 U2 + a3 U3|, converged to ~3e-11), confirmed by
# estimate_limit_constant with n = 2e8, seed 2027: 0.09314069 +- 5.1e-6.
# d = 4, 5, 6 are Monte Carlo golden values (seeds 2028-2030):
#   c_4: n = 3e7, stderr 7.1e-6;  c_5: n = 2e7, stderr 3.9e-6;
#   c_6: n = 1e7, stderr 2.1e-6.
LIMIT_CONSTANT_REFERENCE = {
    2: 4.0 / (3.0 * math.pi**2),
    3: 0.0931399757,
    4: 0.04512800583388657,
    5: 0.018200706319769385,
    6: 0.0064699713045546165,
}

# Flat-region sphere-determinant moments (the ball-hit moment above ratio 1,
# power 1). d = 2 is exactly 2/pi. d = 3 is a Monte Carlo golden value
# (n = 5e7, seed 4103, stderr 3.7e-5; numerically indistinguishable from
# pi/8, which is not relied upon).
SPHERE_DET_MOMENT_REFERENCE = {
    2: 2.0 / math.pi,
    3: 0.3927087825527971,
}


def reference_limit_constant(d: int) -> float:
    """Best known value of the limit constant for dimension ``d``."""
    try:
        return LIMIT_CONSTANT_REFERENCE[d]
    except KeyError:
        raise DomainError(
            f"no reference limit constant for d={d}; run estimate_limit_constant"
        ) from None


# ---------------------------------------------------------------------------
# Monte Carlo estimators

@dataclass
class EstimateWithCI:
    """Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    n: int
    seed: int | None = None

    def ci(self, level: float = 0.99) -> tuple:
        hw = self.half_width(level)
        return self.value - hw, self.value + hw

    def half_width(self, level: float = 0.99) -> float:
        return normal_quantile(0.5 + level / 2.0) * self.stderr

    def agrees_with(self, other: "EstimateWithCI", sigmas: float = 3.0) -> bool:
        joint = math.hypot(self.stderr, other.stderr)
        return abs(self.value - other.value) <= sigmas * joint


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF by bisection on erf (1e-12 accurate)."""
    if not 0.0 < p < 1.0:
        raise DomainError("quantile level must be in (0, 1)")
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mc_mean(chunk_fn, n: int, seed=None) -> EstimateWithCI:
    """Accumulate mean and stderr of chunk_fn(batch_size) over n samples."""
    if n < 1:
        raise DomainError("sample count must be >= 1")
    total = 0.0
    total_sq = 0.0
    left = n
    while left > 0:
        b = min(_MC_CHUNK, left)
        x = chunk_fn(b)
        total += float(x.sum())
        total_sq += float((x * x).sum())
        left -= b
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return EstimateWithCI(mean, math.sqrt(var / n), n, seed)


def _slab_dets(m: int, batch: int, rng: np.random.Generator) -> np.ndarray:
    """|det| of m vectors uniform on S^(m-2) x [-1, 1], stacked as rows."""
    g = rng.standard_normal((batch, m, m - 1))
    g /= np.linalg.norm(g, axis=2, keepdims=True)
    z = rng.uniform(-1.0, 1.0, size=(batch, m, 1))
    return batched_abs_det(np.concatenate([g, z], axis=2))


def estimate_slab_moment(m: int, a: int, n: int, rng, seed=None) -> EstimateWithCI:
    """Monte Carlo moment E[det^a] on the slab, scaled by (2 w_{m-1}/w_m)^m.

    This is the small-ratio coefficient of the ball-hit moment: the value
    for dimension difference ``m`` and determinant power ``a``. For
    ``m = d, a = 1`` it equals d! times the limit constant.
    """
    if m < 2:
        raise DomainError("dimension difference must be >= 2")
    if a < 1:
        raise DomainError("determinant power must be >= 1")
    omega_m = ball_constants(m)[1]
    omega_m1 = ball_constants(m - 1)[1]
    scale = (2.0 * omega_m1 / omega_m) ** m

    def chunk(b):
        dets = _slab_dets(m, b, rng)
        return dets if a == 1 else dets**a

    est = _mc_mean(chunk, n, seed)
    return EstimateWithCI(scale * est.value, scale * est.stderr, n, seed)


def estimate_limit_constant(d: int, n: int, rng, seed=None) -> EstimateWithCI:
    """Monte Carlo estimate of the limit constant c_d."""
    if d < 2:
        raise DomainError("dimension must be >= 2")
    est = estimate_slab_moment(d, 1, n, rng, seed)
    fact = math.factorial(d)
    return EstimateWithCI(est.value / fact, est.stderr / fact, n, seed)


def estimate_ball_hit_moment(
    d: int, k: int, a: int, ratio: float, n: int, rng, seed=None
) -> EstimateWithCI:
    """Determinant moment of sphere directions whose planes hit the ball.

    Draws d-k directions uniformly on the unit sphere of the orthogonal
    complement of a k-flat at distance 1 from the origin, and averages
    ``prod_i 1{|<u_i, x>| <= ratio} * det(u_1..u_{d-k})^a`` where ``x`` is
    the unit vector towards the flat's foot point. The hyperplane through
    the foot point with normal u hits the ball of radius ``ratio`` exactly
    when ``|<u, x>| <= ratio``, so for ratio >= 1 the indicator vanishes and
    the value is constant in ratio; for small ratios the value scales like
    ``ratio^(d-k+a)`` times the slab moment.
    """
    if not 0 <= k <= d - 2:
        raise DomainError("flat dimension must satisfy 0 <= k <= d-2")
    if a < k + 1:
        raise DomainError("determinant power must be >= k+1")
    if ratio <= 0:
        raise DomainError("ratio must be positive")
    m = d - k

    def chunk(b):
        g = rng.standard_normal((b, m, m))
        g /= np.linalg.norm(g, axis=2, keepdims=True)
        hit = np.all(np.abs(g[:, :, -1]) <= ratio, axis=1)
        dets = batched_abs_det(g)
        if a != 1:
            dets = dets**a
        return dets * hit

    return _mc_mean(chunk, n, seed)


# ---------------------------------------------------------------------------
# the law of the norm of a random flat intersection

def _check_norm_args(d: int, k: int, s_f: float, r: float):
    if not 1 <= k <= d - 1:
        raise DomainError("subspace dimension must satisfy 1 <= k <= d-1")
    if s_f <= 0 or r <= 0:
        raise DomainError("distances must be positive")


def intersection_norm_density(d: int, k: int, s_f: float, r: float) -> float:
    """Density at r of the norm of (random k-space) . (fixed (d-k)-flat).

    The flat sits at distance ``s_f`` from the origin. The density is
    supported on [s_f, inf); for dimension difference 1 it has an integrable
    singularity at the left endpoint.
    """
    _check_norm_args(d, k, s_f, r)
    if r < s_f:
        return 0.0
    m = d - k
    pref = 2.0 * ball_constants(m)[1] / ball_constants(m + 1)[1]
    base = max(1.0 - (s_f * s_f) / (r * r), 0.0)
    expo = (m - 2) / 2.0
    if base == 0.0:
        if m == 1:
            return math.inf
        radial = 1.0 if m == 2 else 0.0
    else:
        radial = base**expo
    return pref * radial * s_f / (r * r)


def intersection_norm_survival(d: int, k: int, s_f: float, r: float) -> float:
    """P(norm >= r) for the intersection-norm law; equals 1 for r <= s_f."""
    _check_norm_args(d, k, s_f, r)
    if r <= s_f:
        return 1.0
    m = d - k
    q = s_f / r
    if m == 1:
        return (2.0 / math.pi) * math.asin(q)
    if m == 2:
        return q
    ratio = ball_constants(m)[1] / ball_constants(m + 1)[1]
    upper = math.asin(q)
    integral = adaptive_simpson(lambda phi: math.cos(phi) ** (m - 1), 0.0, upper)
    return min(1.0, 2.0 * ratio * integral)


def intersection_norm_cdf(d: int, k: int, s_f: float, r: float) -> float:
    return 1.0 - intersection_norm_survival(d, k, s_f, r)


def sample_intersection_norms(
    d: int, k: int, s_f: float, n: int, rng, max_tries: int = 100
) -> np.ndarray:
    """Draw ``n`` intersection norms by rotating the flat uniformly.

    Keeps a fixed k-space spanned by the first k axes and a fixed
    complementary flat at distance ``s_f`` along the last axis; for each
    Haar rotation the joint linear system gives the intersection point
    inside the k-space, whose norm is returned. Numerically parallel
    configurations are redrawn, up to ``max_tries`` rounds.
    """
    _check_norm_args(d, k, s_f, 1.0)
    cols = list(range(k - 1)) + [d - 1]
    rhs = np.zeros(k)
    rhs[-1] = s_f
    out = np.empty(n)
    pending = n
    filled = 0
    for _ in range(max_tries):
        if pending == 0:
            return out
        rots = haar_rotations(d, pending, rng)
        m = np.swapaxes(rots[:, :k, :][:, :, cols], 1, 2)
        good = batched_abs_det(m) > 1e-12
        sol = np.linalg.solve(m[good], rhs)
        norms = np.linalg.norm(sol, axis=1)
        out[filled : filled + norms.size] = norms
        filled += norms.size
        pending = n - filled
    raise NearSingular("persistent near-parallel configurations while sampling")


def sample_intersection_norm(d: int, k: int, s_f: float, rng) -> float:
    """Single draw of the intersection norm."""
    return float(sample_intersection_norms(d, k, s_f, 1, rng)[0])


# ---------------------------------------------------------------------------
# limiting intensity and the restricted process intensity

def limit_density(d: int, c_d: float, x) -> float:
    """Density c_d / |x|^(d+1) of the limiting intensity measure."""
    r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    if r == 0.0:
        raise DomainError("the limit density is undefined at the origin")
    return c_d * r ** (-(d + 1))


def annulus_mass(d: int, c_d: float, r1: float, r2: float) -> float:
    """Mass of the annulus r1 <= |x| <= r2 under the limiting intensity.

    Radially the density integrates to c_d * omega_d * (1/r1 - 1/r2), with
    ``r2 = inf`` allowed.
    """
    if r1 <= 0:
        raise DomainError("inner radius must be positive")
    if r2 <= r1:
        raise DomainError("outer radius must exceed inner radius")
    inv2 = 0.0 if math.isinf(r2) else 1.0 / r2
    return c_d * ball_constants(d)[1] * (1.0 / r1 - inv2)


def predicted_intensity_density(
    d: int, t: float, radius: float, c1: float, c_d: float, x
) -> float:
    """Leading-order density of the restricted intersection intensity.

    Inside the ball the density is flat, ``(c1 / d!) t^d`` where ``c1`` is
    the ball-hit moment above ratio 1; outside it decays like
    ``t^d c_d (R/|x|)^(d+1)``. The dropped correction is of relative order
    (R/|x|)^2, so callers should keep R/|x| small.
    """
    if t <= 0 or radius <= 0:
        raise DomainError("intensity and radius must be positive")
    r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    if r == 0.0:
        raise DomainError("undefined at the origin")
    if r < radius:
        return (c1 / math.factorial(d)) * t**d
    return t**d * c_d * (radius / r) ** (d + 1)


# ---------------------------------------------------------------------------
# exact planar formulas

def hit_det_moment_2d_exact(ratio: float) -> float:
    """Closed form of the planar ball-hit moment (k = 0, power 1).

    With alpha = arcsin(min(1, ratio)) the value is
    ``(2/pi^2) (2 alpha - sin 2 alpha)``; above ratio 1 it saturates at
    2/pi, and for small ratios it behaves like ``(8/(3 pi^2)) ratio^3``.
    """
    if ratio <= 0:
        raise DomainError("ratio must be positive")
    alpha = math.asin(min(1.0, ratio))
    return (2.0 / math.pi**2) * _two_x_minus_sin_two_x(alpha)


def _two_x_minus_sin_two_x(x: float) -> float:
    """2x - sin(2x), series-protected against cancellation near 0."""
    if x > 1e-3:
        return 2.0 * x - math.sin(2.0 * x)
    y = 2.0 * x
    y3 = y**3
    return y3 / 6.0 - y3 * y * y / 120.0 + y3 * y3 * y / 5040.0


def restricted_intensity_density_2d(t: float, radius: float, r: float) -> float:
    """Exact radial density of the planar restricted intersection intensity."""
    if r <= 0:
        raise DomainError("radius must be positive")
    return 0.5 * t * t * hit_det_moment_2d_exact(radius / r)


def restricted_intensity_mass_2d(t: float, radius: float, r1: float, r2: float) -> float:
    """Exact mass of an annulus under the planar restricted intensity.

    Uses the substitution r = R / sin(phi), which turns the radial integral
    into a smooth one; ``r2 = inf`` is allowed and ``r1 = 0`` gives the total
    mass (which equals (2 t R)^2 / 2, the expected number of plane pairs).
    """
    if r1 < 0 or r2 <= r1:
        raise DomainError("need 0 <= r1 < r2")
    return _mass_to_inf_2d(t, radius, r1) - (
        0.0 if math.isinf(r2) else _mass_to_inf_2d(t, radius, r2)
    )


def _mass_to_inf_2d(t: float, radius: float, r: float) -> float:
    if r < radius:
        # flat density (t^2/2)(2/pi) times the disk-annulus area pi(R^2-r^2)
        inner = t * t * (radius**2 - r * r)
        return inner + _mass_to_inf_2d(t, radius, radius)
    upper = math.asin(min(1.0, radius / r))
    if upper == 0.0:
        return 0.0

    def integrand(phi):
        if phi < 1e-12:
            return (2.0 / math.pi**2) * (4.0 / 3.0)
        s = math.sin(phi)
        return (2.0 / math.pi**2) * _two_x_minus_sin_two_x(phi) * math.cos(phi) / s**3

    tail = adaptive_simpson(integrand, 0.0, upper)
    return math.pi * t * t * radius**2 * tail


# ---------------------------------------------------------------------------
# quadrature

def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 48) -> float:
    """Adaptive Simpson quadrature with Richardson correction.

    Non-finite evaluations are treated as integrable endpoint singularities:
    intervals sampling entirely non-finite contribute 0, mixed intervals are
    subdivided. That keeps the recursion linear along a singularity instead
    of exponential inside it.
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    za, zm, zb = (v if math.isfinite(v) else 0.0 for v in (fa, fm, fb))
    whole = (b - a) / 6.0 * (za + 4.0 * zm + zb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    vals = (fa, flm, fm, frm, fb)
    all_finite = all(map(math.isfinite, vals))
    if not all_finite and not any(map(math.isfinite, vals)):
        return 0.0
    za, zlm, zm, zrm, zb = (v if math.isfinite(v) else 0.0 for v in vals)
    left = (m - a) / 6.0 * (za + 4.0 * zlm + zm)
    right = (b - m) / 6.0 * (zm + 4.0 * zrm + zb)
    if all_finite:
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
    elif depth <= 0:
        return left + right
    half = 0.5 * tol
    return _simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, half, depth - 1
    )
