"""Structural entropy of causal DAG models, layered experimental designs,
edge-centric interventions, and causal-influence testing."""

from .bayesnet import (
    DiscreteNet,
    JointTable,
    StateSpaceError,
    intervene,
    joint,
    marginal,
    sample,
)
from .design import (
    EntropyPoint,
    InfeasibleDesignError,
    LayeredDesign,
    binary_entropy,
    estimate_density,
    optimize_design,
    structural_entropy,
    three_layer_construction,
)
from .divergence import (
    ClosenessReport,
    DivergenceSpec,
    closeness,
    directed_divergence,
    inequality_chain,
    phi_divergence,
    power_divergence,
    power_phi,
)
from .enumeration import (
    EnumCensus,
    check_lower_bound,
    count_kpartite,
    empirical_entropy_curve,
    enumerate_orders,
)
from .influence import (
    InfluenceResult,
    causal_influence,
    kpartite_aci,
    localizability_check,
    subadditivity_audit,
)
from .orders import (
    CycleError,
    HasseDag,
    KPartition,
    LevelAssignment,
    StrictOrder,
    compute_levels,
    mirsky_partition,
    transitive_closure,
    transitive_reduction,
    validate_kpartition,
)
from .sem import (
    GaussianDist,
    LinearSem,
    gaussian_hellinger_sq,
    gaussian_kl,
    intervened_cov,
    observational_cov,
    sem_kpartite_aci,
)
from .stats import (
    InsufficientSamples,
    RunTestResult,
    TestVerdict,
    erl_estimate,
    hellinger_closeness_test,
    kpartite_influence_test,
    power_divergence_gof,
    required_sample_count,
    ww_ate_run_test,
)

__version__ = "0.1.0"
