"""Nonseparable space-time covariance kernels on networks with Euclidean
edges.

The package provides, end to end:

- validated network construction, generation, and file IO
  (:mod:`netkernel.network`);
- geodesic, resistance, and ambient-Euclidean distance matrices between
  arbitrary on-network points, plus linear/circular time separations
  (:mod:`netkernel.metrics`);
- parametric spatial/temporal family catalogs and the distance-rescaling
  space-time kernel composition, with JSON serialization
  (:mod:`netkernel.kernels`);
- rule-based validity verdicts (valid / invalid / unknown with the
  governing rule id) (:mod:`netkernel.validity`);
- empirical positive-definiteness audits and adversarial counterexample
  search (:mod:`netkernel.pdcheck`);
- Gaussian-field simulation, exact log-likelihood, and multi-start
  maximum-likelihood fitting (:mod:`netkernel.gp`), with a scikit-learn
  style estimator facade (:mod:`netkernel.estimator`);
- a reproducible model-comparison simulation study
  (:mod:`netkernel.study`) and a CLI tying it together
  (:mod:`netkernel.cli`).
"""

from .errors import (
    DanglingEndpointError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    FileFormatError,
    InconsistentNetworkError,
    InnerFamilyNotCompletelyMonotoneError,
    InvalidParamsError,
    MetricMismatchError,
    MissingCoordinatesError,
    NetkernelError,
    NetworkBuildError,
    NonPositiveLengthError,
    NotPositiveDefiniteError,
    SelfLoopError,
    SingularSystemError,
)
from .estimator import NetworkKernelRegressor
from .gp import (
    FitResult,
    SimSpec,
    SpaceTimeDesign,
    covariance_matrix,
    default_init,
    fit,
    loglik,
    simulate,
)
from .kernels import (
    CIRCULAR_FAMILIES,
    MODEL_SHORTCUTS,
    REFERENCE_PARAMS,
    SPATIAL_FAMILIES,
    TEMPORAL_FAMILIES,
    AdaptedMultiquadric,
    Askey,
    CircularKernel,
    Dagum,
    DagumPsi,
    GenCauchy,
    GenCauchyPsi,
    GneitingKernel,
    GneitingPsi,
    Matern,
    Multiquadric,
    NegBinomial,
    Poisson,
    PowerPsi,
    PowExp,
    Schilling,
    SinePower,
    SineSeries,
    SpaceTimeKernel,
    eval_circular,
    eval_gneiting,
    eval_phi,
    eval_psi,
    gram,
    kernel_from_json,
    kernel_to_json,
    load_kernel,
    model_C1,
    model_C2,
    model_T,
    model_askey_st,
    save_kernel,
)
from .metrics import (
    SPATIAL_METRICS,
    TIME_KINDS,
    DistanceMatrix,
    clear_cache,
    distance,
    distance_matrix,
    euclidean_matrix,
    geodesic_matrix,
    resistance_matrix,
    temporal_separation,
)
from .network import (
    Edge,
    Network,
    PointOnNetwork,
    TopologyClass,
    Vertex,
    build_network,
    check_distance_consistency,
    classify_topology,
    generate,
    load_network,
    load_points,
    network_diameter,
    network_from_json,
    network_to_json,
    sample_points,
    save_network,
    save_points,
)
from .pdcheck import (
    AuditConfig,
    AuditReport,
    SearchResult,
    audit,
    audit_matrix,
    counterexample_search,
)
from .study import (
    StudyConfig,
    StudyResult,
    load_study_config,
    run_sim_study,
    study_config_from_json,
    write_replicates_csv,
    write_summary_csv,
)
from .validity import ValidityVerdict, askey_nu_bound, check_validity

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
