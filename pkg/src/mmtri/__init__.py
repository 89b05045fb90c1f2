"""Curvature-controlled nets, triangulations and graph discretizations of
metric measure spaces, with explicit volume-comparison bounds."""

from ._accel import NUMBA_ENABLED, backend_name
from .comparison import (
    ComparisonProfile,
    MonotonicityReport,
    PackingBounds,
    bishop_gromov_check,
    bound_degree,
    bound_n1,
    bound_n2,
    bound_n3,
    bound_net_in_ball,
    compute_packing_bounds,
    doubling_constant,
    s_integral,
    s_profile,
    small_ball_constant,
)
from .complexes import (
    SimplicialComplex,
    ThicknessReport,
    flag_complex,
    simplex_volume,
    thickness,
    triangulate,
)
from .discretization import (
    BoundedGeometryReport,
    DiscretizationGraph,
    RoughIsometryCertificate,
    bounded_geometry_check,
    build_graph,
    rough_isometry_certificate,
)
from .errors import DomainError, UnsupportedRegimeError, ValidationError
from .growth import AgreementVerdict, GrowthReport, growth_agreement, growth_profile
from .nets import (
    EpsilonNet,
    IntersectionPattern,
    PatternComparison,
    build_net,
    compare_patterns,
    intersection_pattern,
)
from .spaces import (
    CurvatureDimensionData,
    FisherSimplexSpace,
    MetricMeasureSpace,
    ModelSpace,
    PointCloudSpace,
    WeightedSpace,
    fisher_distance,
    fisher_embed,
    kl_divergence,
    load_space,
    model_ball_volume,
)

__version__ = "0.1.0"
