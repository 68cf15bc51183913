"""tiltbound: exact tilt scans and certified one-term Edgeworth error bounds
for bounded integer-valued random variables ("dice").

For any die the package computes exact tilts of n-fold IID sums by
big-integer convolution, evaluates the leading Edgeworth constant L per
congruence class of n modulo the span, bounds the approximation error with
fully explicit constants, and combines bound and exact scan into a proof
of the exact index from which the sign of the tilt equals the sign of L.
"""

from .bounds import (
    BoundTerms,
    ClassConstants,
    GlobalConstants,
    class_constants,
    error_bound_cdf,
    error_bound_tilt,
    error_bound_tilt_terms,
    global_constants,
    n1,
    n2,
)
from .cf import (
    CfProfile,
    TailEnvelope,
    build_envelope,
    cf_eval,
    peak_profile,
    prob_below_mean_quadrature,
    r_optimal,
    tail_integral_bound,
)
from .die import (
    CanonicalDie,
    Die,
    MomentSet,
    canonicalize,
    difference,
    moments,
    negate,
    parse_die,
)
from .errors import (
    BudgetError,
    DieParseError,
    SymmetricUndetermined,
    ValidityFloorError,
)
from .exact import (
    SumPmf,
    TiltValue,
    prob_below_mean,
    sum_pmf,
    tilt,
    tilt_series,
)
from .lattice import (
    LatticeStructure,
    certificate,
    cf_quadratic_coefficient,
    span_normalize,
    span_shift,
)
from .prove import (
    ClassReport,
    DieAnalysis,
    DominanceReport,
    analyze_die,
    dominance,
    prove_all,
    prove_class,
)

__version__ = "0.1.0"

__all__ = [
    "BoundTerms",
    "BudgetError",
    "CanonicalDie",
    "CfProfile",
    "ClassConstants",
    "ClassReport",
    "Die",
    "DieAnalysis",
    "DieParseError",
    "DominanceReport",
    "GlobalConstants",
    "LatticeStructure",
    "MomentSet",
    "SumPmf",
    "SymmetricUndetermined",
    "TailEnvelope",
    "TiltValue",
    "ValidityFloorError",
    "analyze_die",
    "build_envelope",
    "canonicalize",
    "certificate",
    "cf_eval",
    "cf_quadratic_coefficient",
    "class_constants",
    "difference",
    "dominance",
    "error_bound_cdf",
    "error_bound_tilt",
    "error_bound_tilt_terms",
    "global_constants",
    "moments",
    "n1",
    "n2",
    "negate",
    "parse_die",
    "peak_profile",
    "prob_below_mean",
    "prob_below_mean_quadrature",
    "prove_all",
    "prove_class",
    "r_optimal",
    "span_normalize",
    "span_shift",
    "sum_pmf",
    "tail_integral_bound",
    "tilt",
    "tilt_series",
]
