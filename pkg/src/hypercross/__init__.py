"""Monte Carlo toolkit for ball-restricted hyperplane intersection processes.

Simulates the intersection point process of a stationary isotropic Poisson
hyperplane process restricted to a ball, its power-law Poisson limit, and
the convex-hull / zero-cell duality, with statistical machinery to verify
the limit behaviour end to end.
"""

__version__ = "0.1.0"

from .constants import (  # noqa: F401
    EstimateWithCI,
    annulus_mass,
    ball_constants,
    dual_intensity,
    estimate_ball_hit_moment,
    estimate_limit_constant,
    estimate_slab_moment,
    intersection_norm_cdf,
    intersection_norm_density,
    intersection_norm_survival,
    limit_constant_2d,
    limit_density,
    predicted_intensity_density,
    reference_limit_constant,
    sample_intersection_norm,
    sample_intersection_norms,
)
from .errors import (  # noqa: F401
    BinMismatch,
    ConfigError,
    Degenerate,
    DegenerateCategories,
    DomainError,
    HypercrossError,
    NearSingular,
    OriginNotInterior,
    TooFewSamples,
    TupleBudgetExceeded,
    Unbounded,
    UnsupportedDimension,
)
from .geometry import (  # noqa: F401
    Hyperplane,
    canonical_hyperplane,
    intersect_hyperplanes,
    is_rotation,
    random_rotation,
    subspace_determinant,
)
from .hull import (  # noqa: F401
    Polytope,
    approx_hausdorff,
    convex_hull,
    euler_relation_holds,
    f_vector,
    polar_dual,
    polygon_area,
)
from .rng import derive_seed, master_rng, replication_rng  # noqa: F401
from .samplers import (  # noqa: F401
    HyperplaneSample,
    PointSample,
    SimConfig,
    intersection_process,
    sample_binomial_hyperplanes,
    sample_limit_process,
    sample_poisson_hyperplanes,
    sample_zero_cell,
)
from .stats import (  # noqa: F401
    RadialHistogram,
    TestReport,
    chi_square_two_sample,
    empirical_intensity,
    ks_test,
    mean_with_ci,
    tv_distance_on_annuli,
)
