"""Distribution-level comparison machinery for the simulation experiments.

Self-contained implementations: the KS p-value uses the asymptotic
Kolmogorov distribution with the Stephens small-sample correction (two-sample
use is documented for combined sizes >= 35), and the chi-square survival
function is evaluated through the regularized incomplete gamma function
(series / continued fraction). Statistical verdicts default to level 0.01.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import EstimateWithCI, normal_quantile
from .errors import BinMismatch, DegenerateCategories, TooFewSamples

DEFAULT_ALPHA = 0.01


@dataclass
class TestReport:
    """Outcome of a hypothesis test."""

    name: str
    statistic: float
    p_value: float
    n1: int
    n2: int = 0
    alpha: float = DEFAULT_ALPHA

    @property
    def passed(self) -> bool:
        return self.p_value > self.alpha


@dataclass
class RadialHistogram:
    """Aggregated per-annulus counts over many replications."""

    edges: np.ndarray
    counts: np.ndarray
    reps: int

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.edges.ndim != 1 or np.any(np.diff(self.edges) <= 0):
            raise BinMismatch("edges must be strictly increasing")
        if self.counts.shape != (self.edges.size - 1,):
            raise BinMismatch("need one count per bin")
        if np.any(self.counts < 0) or self.reps < 1:
            raise BinMismatch("counts must be >= 0 and reps >= 1")

    def mean_counts(self) -> np.ndarray:
        return self.counts / self.reps


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution, alternating series."""
    if lam < 1e-8:
        return 1.0
    total = 0.0
    for j in range(1, 200):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += term if j % 2 == 1 else -term
        if term < 1e-16:
            break
    return float(min(max(2.0 * total, 0.0), 1.0))


def _ks_pvalue(d_stat: float, en: float) -> float:
    return kolmogorov_sf((en + 0.12 + 0.11 / en) * d_stat)


def ks_test(samples, cdf_or_samples, alpha: float = DEFAULT_ALPHA) -> TestReport:
    """One- or two-sample Kolmogorov-Smirnov test.

    ``cdf_or_samples`` is either a callable analytic CDF or a second sample.
    p-values use the asymptotic Kolmogorov distribution; for the two-sample
    form the approximation is intended for n1 + n2 >= 35.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n1 = x.size
    if n1 < 10:
        raise TooFewSamples("need at least 10 samples")
    if callable(cdf_or_samples):
        f = np.asarray([cdf_or_samples(v) for v in x], dtype=float)
        grid = np.arange(1, n1 + 1) / n1
        d_stat = float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n1))))
        return TestReport("ks-1", d_stat, _ks_pvalue(d_stat, math.sqrt(n1)), n1, 0, alpha)
    y = np.sort(np.asarray(cdf_or_samples, dtype=float))
    n2 = y.size
    if n2 < 10:
        raise TooFewSamples("need at least 10 samples in the second sample")
    pooled = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, pooled, side="right") / n1
    cdf2 = np.searchsorted(y, pooled, side="right") / n2
    d_stat = float(np.max(np.abs(cdf1 - cdf2)))
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return TestReport("ks-2", d_stat, _ks_pvalue(d_stat, en), n1, n2, alpha)


def _gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x)."""
    if x < 0 or a <= 0:
        raise ValueError("invalid incomplete gamma arguments")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        # series for P(a, x)
        term = 1.0 / a
        total = term
        for k in range(1, 10_000):
            term *= x / (a + k)
            total += term
            if abs(term) < abs(total) * 1e-15:
                break
        p = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
        return float(min(max(1.0 - p, 0.0), 1.0))
    # Lentz continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    q = h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return float(min(max(q, 0.0), 1.0))


def chi_square_sf(x: float, df: int) -> float:
    """Survival function of the chi-square distribution."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return _gamma_q(df / 2.0, x / 2.0)


def _merge_small_cells(c1: np.ndarray, c2: np.ndarray, min_expected: float):
    """Merge trailing/small categories into a tail cell.

    Scans categories in order and accumulates; a cell is closed once both
    pooled-expected counts reach the threshold, and whatever remains at the
    end is folded into the last cell.
    """
    n1, n2 = c1.sum(), c2.sum()
    total = n1 + n2
    out1, out2 = [], []
    acc1 = acc2 = 0
    for a, b in zip(c1, c2):
        acc1 += a
        acc2 += b
        pooled = acc1 + acc2
        if pooled and min(n1, n2) * pooled / total >= min_expected:
            out1.append(acc1)
            out2.append(acc2)
            acc1 = acc2 = 0
    if acc1 or acc2:
        if out1:
            out1[-1] += acc1
            out2[-1] += acc2
        else:
            out1, out2 = [acc1], [acc2]
    return np.array(out1, dtype=float), np.array(out2, dtype=float)


def chi_square_two_sample(
    counts1, counts2, alpha: float = DEFAULT_ALPHA, min_expected: float = 5.0
) -> TestReport:
    """Two-sample chi-square homogeneity test over shared categories.

    Cells whose pooled expected count falls below ``min_expected`` are
    merged into a tail cell; the statistic then has cells - 1 degrees of
    freedom. Identical count vectors give statistic 0 and p-value 1.
    """
    c1 = np.asarray(counts1, dtype=np.int64)
    c2 = np.asarray(counts2, dtype=np.int64)
    if c1.shape != c2.shape:
        raise BinMismatch("count vectors must share the category set")
    n1, n2 = int(c1.sum()), int(c2.sum())
    if n1 == 0 or n2 == 0:
        raise TooFewSamples("both samples must be nonempty")
    m1, m2 = _merge_small_cells(c1, c2, min_expected)
    if m1.size < 2:
        raise DegenerateCategories("fewer than 2 cells after merging")
    pooled = (m1 + m2) / (n1 + n2)
    e1, e2 = n1 * pooled, n2 * pooled
    stat = float(np.sum((m1 - e1) ** 2 / e1) + np.sum((m2 - e2) ** 2 / e2))
    df = m1.size - 1
    return TestReport("chi2-2", stat, chi_square_sf(stat, df), n1, n2, alpha)


def counts_to_histogram(values1, values2) -> tuple:
    """Tabulate two integer samples over their shared category range."""
    v1 = np.asarray(values1, dtype=np.int64)
    v2 = np.asarray(values2, dtype=np.int64)
    hi = int(max(v1.max(initial=0), v2.max(initial=0)))
    lo = int(min(v1.min(initial=hi), v2.min(initial=hi)))
    rng = np.arange(lo, hi + 2)
    h1, _ = np.histogram(v1, bins=rng)
    h2, _ = np.histogram(v2, bins=rng)
    return h1, h2


def mean_with_ci(samples, level: float = 0.99, seed=None) -> EstimateWithCI:
    """Sample mean with standard error (normal-approximation CI via .ci())."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise TooFewSamples("need at least 2 samples")
    mean = float(x.mean())
    stderr = float(x.std(ddof=1) / math.sqrt(x.size))
    est = EstimateWithCI(mean, stderr, int(x.size), seed)
    # attach the requested-level CI for report serialisation
    est.ci_level = level
    est.ci_bounds = est.ci(level)
    return est


def empirical_intensity(samples, edges) -> RadialHistogram:
    """Total per-annulus counts across replications.

    The per-replication mean count of an annulus estimates the intensity
    measure of that annulus.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise BinMismatch("edges must be strictly increasing with >= 2 entries")
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    reps = 0
    dim = None
    for sample in samples:
        if dim is None:
            dim = sample.dim
        elif sample.dim != dim:
            raise BinMismatch("all samples must share the ambient dimension")
        if len(sample):
            h, _ = np.histogram(sample.norms(), bins=edges)
            counts += h
        reps += 1
    if reps == 0:
        raise TooFewSamples("need at least one replication")
    return RadialHistogram(edges, counts, reps)


def tv_distance_on_annuli(hist: RadialHistogram, model_masses) -> float:
    """Total variation distance between binned empirical and model measures.

    Equals the maximum over unions of bins of the absolute measure
    difference, i.e. max(sum of positive parts, sum of negative parts); for
    a single bin this reduces to |mean count - mass|.
    """
    model = np.asarray(model_masses, dtype=float)
    if model.shape != (hist.edges.size - 1,):
        raise BinMismatch("model masses must match the histogram bins")
    diff = hist.mean_counts() - model
    pos = float(diff[diff > 0].sum())
    neg = float(-diff[diff < 0].sum())
    return max(pos, neg)
