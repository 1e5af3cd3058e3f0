"""copula-lab: grid verification of copula axioms, rank statistics, and
transform-invariance experiments for bivariate dependence."""

from .core import (
    DEFAULT_TOL,
    SNAP_TOL,
    Copula2D,
    GridSpec,
    JointCDF,
    MarginalCDF,
    Rectangle,
    UnitPoint,
    VerificationReport,
    check_boundary,
    check_componentwise_monotone,
    check_lipschitz,
    check_partial_difference_monotone,
    check_two_increasing,
    h_volume,
    sklar_join,
    verify_copula,
)
from .errors import (
    ConfigError,
    CopulaLabError,
    CsvFormatError,
    DegenerateSampleError,
    DegenerateTransformError,
    DomainError,
    InputError,
)
from .experiments import (
    BatteryReport,
    DistributionSpec,
    ExperimentConfig,
    InvarianceResult,
    copula_invariance_experiment,
    draw_sample,
    load_config_file,
    load_shipped_config,
    pearson_breakage_experiment,
    pearson_invariance_experiment,
    rng_for,
    run_battery,
)
from .families import (
    builtin_copulas,
    builtin_names,
    counterexample_findings,
    counterexample_max,
    counterexample_product_factor,
    fgm,
    independence,
    min_copula,
    resolve_builtin,
    w_copula,
)
from .stats import (
    DependenceReport,
    EmpiricalCopula,
    Sample,
    dependence_report,
    empirical_copula,
    empirical_copula_distance,
    kendall_tau,
    pearson_rho,
    ranks,
    spearman_rho,
)
from .transforms import (
    AffinityVerdict,
    Monotonicity,
    MonotonicityVerdict,
    TransformSpec,
    apply_transform,
    detect_affine,
    detect_monotone,
    uniform_probes,
)

__version__ = "0.1.0"
