"""mu-critical point analysis of distance functions to point clouds, offset
reconstruction certificates and their empirical verification."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    Ball,
    Cone,
    GeometryError,
    PointCloud,
    hausdorff,
    min_enclosing_ball,
    min_enclosing_cap,
    nearest_distance,
)
from .distance import (  # noqa: E402
    AnnulusSpec,
    CriticalScanReport,
    GradientInfo,
    critical_scan,
    estimate_mu_reach,
    estimate_wfs,
    gradient,
    is_mu_critical,
    support_set,
)
