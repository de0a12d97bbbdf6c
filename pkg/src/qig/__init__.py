"""Monotone quantum Fisher metrics, generalized covariances and the
determinant uncertainty inequalities relating them."""

__version__ = "0.1.0"

from .channels import (
    KrausChannel,
    adjoint_apply,
    apply,
    check_cov_monotonicity,
    check_fisher_monotonicity,
    identity_channel,
    partial_trace_channel,
    pinching_channel,
    random_channel,
)
from .errors import (
    BadDims,
    ConditionViolated,
    DimMismatch,
    DomainError,
    NotFaithful,
    NotHermitian,
    NotTraceless,
    ParseError,
    QigError,
    TraceNotOne,
)
from .functions import (
    CATALOG,
    KM,
    RLD,
    SLD,
    WY,
    StandardFunction,
    at_zero,
    evaluate,
    kosaki,
    mean,
    parse_function,
    tilde,
)
from .inequalities import (
    InequalityVerdict,
    check_dynamical_ucp,
    check_robertson,
    check_theorem1,
    check_theorem3,
    check_theorem4,
    check_tilde_identity,
    gram_metric_commutators,
    gram_qcov,
    robertson_matrix,
)
from .metrics import (
    MetricContext,
    cov_symmetrized,
    gamma,
    j_apply,
    j_inv_apply,
    metric_context,
    qcov,
    skew_information,
    tilde_identity_residual,
)
from .states import DensityMatrix, make_rng, new_density, random_density, random_observable, random_observable_tuple
