"""Adaptive weighted least-squares regression under heteroscedastic noise.

A library plus CLI implementing a shrinkage estimator selected by
penalized empirical cost over a Pinsker weight family, together with the
Monte Carlo machinery that audits its non-asymptotic risk envelope and
the supporting inequalities at desk scale.
"""

__version__ = "0.1.0"

from .basis import (  # noqa: F401
    DesignGrid,
    basis_function,
    basis_matrix,
    basis_matrix_at,
    dft,
    empirical_inner,
    reconstruct,
)
from .errors import (  # noqa: F401
    ConfigError,
    DimensionError,
    DomainError,
    UnsupportedSignalError,
    VolatilityBoundError,
)
from .signals import (  # noqa: F401
    NoiseSpec,
    Sample,
    SignalSpec,
    VolatilitySpec,
    ellipsoid_weight,
    fourier_tail,
    generate_sample,
    make_signal,
    signal_from_coeffs,
    sobolev_norm,
    volatility_at,
)
from .weights import (  # noqa: F401
    FamilyStats,
    SievePlan,
    WeightFamily,
    WeightVector,
    build_sieve,
    family_stats,
    pinsker_constant,
    pinsker_family,
    pinsker_weight,
)
from .estimator import (  # noqa: F401
    EstimateConfig,
    FourierState,
    SelectionResult,
    cost,
    default_rho,
    default_tail_cutoff,
    estimate,
    penalty,
    select,
    tail_variance,
)
from .audit import (  # noqa: F401
    OracleConstants,
    OracleReport,
    Scenario,
    audit_oracle,
    empirical_error,
    overhead_factors,
    remainder_base,
    slow_variation_check,
    variance_error_bound,
)
from .lemmas import (  # noqa: F401
    CheckRow,
    check_centered_sums,
    check_penalty_dominance,
    check_projection_variance,
    check_tail_energy,
    check_variance_estimator_error,
    noise_coeff_variance,
)
