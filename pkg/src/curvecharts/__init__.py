"""Chart-based geometry of closed embedded curves modulo reparameterization.

Normal-bundle quotient charts over three ambient backends (euclidean
space, flat torus, unit sphere), parameterization-invariant functionals
with first and second variation, a chart re-centering critical-point
solver, and isometry-orbit analysis.
"""

from .ambient import (
    AmbientPoint,
    AmbientSpace,
    Euclidean,
    FlatTorus,
    Sphere2,
    TangentVec,
    exp_map,
    injectivity_radius,
    log_map,
    metric_inner,
)
from .charts import (
    Chart,
    NormalFrame,
    NormalSection,
    chart_apply,
    chart_invert,
    full_chart_apply,
    make_chart,
    project_normal,
    reach_estimate,
    section_to_field,
    transition,
)
from .curve import (
    Embedding,
    GridCircle,
    Reparam,
    SectionField,
    arclength_lift,
    curvature,
    derivative,
    image_distance,
    is_embedding,
    is_immersion,
    length,
    make_diffeo,
    quadrature_weights,
    reparam_compose,
    reparam_inverse,
    resample,
    separation,
    speeds,
)
from .errors import (
    ChartBreakdownError,
    CurveChartsError,
    CutLocusError,
    DegenerateFrameError,
    LineSearchFailedError,
    NonMonotoneError,
    NotEmbeddingError,
    OutsideDomainError,
    OutsideTubeError,
    ProjectionFailedError,
    SingularSystemError,
    UnsupportedAmbientError,
)
from .files import curve_from_dict, curve_to_dict, load_curve, save_curve
from .functionals import (
    Functional,
    HessianPair,
    evaluate,
    first_variation,
    grad_norm,
    gradient_in_chart,
    hessian_full,
    hessian_in_chart,
    is_critical,
    parse_functional,
    restriction_matrix,
)
from .solver import (
    SolveOptions,
    SolveTrace,
    minimize,
    newton_refine,
    recenter,
    smooth_center,
    spectrum,
)
from .symmetry import (
    Isometry,
    KillingBasis,
    KillingField,
    action_continuity_probe,
    apply_isometry,
    orbit_differential,
    orbit_rank,
    orbit_singular_values,
    standard_killing_basis,
)

__version__ = "0.1.0"
