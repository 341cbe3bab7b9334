"""Numerical differential geometry engine for almost contact metric
structures on 5-manifolds: SU(2) quadruples and their differential systems,
D-homothetic deformations, the circle family of nearly cosymplectic
structures on a Sasaki-Einstein base, and skew-torsion connections solving
the Einstein metricity condition — with a verification harness that checks
the defining identities by numerical sampling on concrete models.
"""

from .connections import (
    AffineConnection,
    CurvatureAtPoint,
    covariant_derivative,
    curvature,
    killing_residual,
    levi_civita,
    torsion,
    torsion_lowered,
    totally_skew_residual,
)
from .deform import (
    anc_curvature_residuals,
    attached_sasaki_einstein,
    circle_family,
    d_homothety,
    dhom_connection_residual,
)
from .fields import (
    Chart,
    ChartPoint,
    TensorField,
    exterior_derivative,
    use_engine,
    wedge,
)
from .jets import Jet, jet_einsum, seed
from .models import (
    MODEL_BUILDERS,
    Model,
    ModelBuildError,
    build_anc_s5,
    build_flat_cosymplectic,
    build_model,
    build_s5_sasaki_einstein,
    d_homothety_quadruple,
)
from .ngts import (
    NGTS_RICCI_REFERENCE,
    metricity_residuals,
    ngts_connection,
    ngts_connection_closed,
    ngts_curvature_residuals,
    ngts_ricci_fit,
    torsion_residuals,
)
from .report import (
    SCHEMA_VERSION,
    SUITES,
    CheckResult,
    UsageError,
    VerificationReport,
    emit_report,
    run_suite,
)
from .structures import (
    AlmostContactMetricStructure,
    SU2Quadruple,
    acm_residuals,
    anc_relations_residuals,
    class_residuals,
    eta_einstein_fit,
    h_tensor,
    su2_system_residuals,
)

__version__ = "0.1.0"

__all__ = [
    "AffineConnection",
    "AlmostContactMetricStructure",
    "Chart",
    "ChartPoint",
    "CheckResult",
    "CurvatureAtPoint",
    "Jet",
    "MODEL_BUILDERS",
    "Model",
    "ModelBuildError",
    "NGTS_RICCI_REFERENCE",
    "SCHEMA_VERSION",
    "SU2Quadruple",
    "SUITES",
    "TensorField",
    "UsageError",
    "VerificationReport",
    "acm_residuals",
    "anc_curvature_residuals",
    "anc_relations_residuals",
    "attached_sasaki_einstein",
    "build_anc_s5",
    "build_flat_cosymplectic",
    "build_model",
    "build_s5_sasaki_einstein",
    "circle_family",
    "class_residuals",
    "covariant_derivative",
    "curvature",
    "d_homothety",
    "d_homothety_quadruple",
    "dhom_connection_residual",
    "emit_report",
    "eta_einstein_fit",
    "exterior_derivative",
    "h_tensor",
    "jet_einsum",
    "killing_residual",
    "levi_civita",
    "metricity_residuals",
    "ngts_connection",
    "ngts_connection_closed",
    "ngts_curvature_residuals",
    "ngts_ricci_fit",
    "run_suite",
    "seed",
    "su2_system_residuals",
    "torsion",
    "torsion_lowered",
    "torsion_residuals",
    "totally_skew_residual",
    "use_engine",
    "wedge",
]
