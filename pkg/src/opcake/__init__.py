"""Numerical operator calculus for layer cake integrals and relative entropy.

The package cross-validates three equivalent representations of the
directional derivative of the matrix logarithm -- the closed divided
difference form, the one-sided projection integral for positive
directions, and the two-sided projection integral for general Hermitian
directions -- together with the integral formula expressing quantum
relative entropy through hockey-stick divergences.
"""

from .divergences import (
    DivergenceReport,
    frenkel_gamma,
    frenkel_t,
    hockey_stick,
    relative_entropy,
    umegaki,
)
from .errors import IllConditionedWarning, InputError, NumericalFailure, ToleranceNotMet
from .frechet import (
    LoewnerMatrix,
    dlog_daleckii_krein,
    dlog_finite_difference,
    dlog_trace_identity,
)
from .layercake import (
    SupportRadius,
    layer_cake_positive,
    layer_cake_two_sided,
    shift_identity_residual,
    support_radius,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureResult,
    compactify_reciprocal,
    integrate_matrix,
    integrate_scalar,
)
from .spectral import (
    HermitianMatrix,
    Projection,
    SpectralDecomposition,
    eig_hermitian,
    hs_inner,
    inv_sqrt,
    matrix_log,
    negative_part,
    operator_norm,
    pencil_eigenvalues,
    positive_part,
    positive_projection,
    projection_gt,
    projection_le,
    trace_norm,
    variational_positive_trace,
)
from .verify import (
    InstanceSpec,
    VerificationReport,
    check_derivative_identity,
    check_dominated_quotient_bound,
    check_equivalence_chain,
    check_hockey_stick_partials,
    check_lemma_differentiability,
    check_lipschitz,
    check_mixed_partials,
    check_self_adjointness,
    gen_instance,
    registered_checks,
    run_single_trial,
    run_suite,
)

__version__ = "0.1.0"
