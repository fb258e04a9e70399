"""Boundary nowhere-differentiability with respect to position: lacunary seeds,
conformal transport, multiscale difference-quotient certificates and
rational perturbation experiments."""

__version__ = "0.1.0"

from .errors import NdposError
from .series import (
    LacunarySeries,
    WeierstrassParams,
    partial_sums,
    tail_bound,
    truncation_level,
    validate_params,
    weierstrass_u,
)
from .domains import (
    DomainSpec,
    JSample,
    domain_from_id,
    grid_J,
    sample_J_near,
    seminorm,
)
from .transport import (
    TransportChain,
    TransportMap,
    chain_from_ids,
    deriv_floor,
    piece_chain,
    transport_from_id,
    transport_function,
    verify_chain_rule,
)
from .quotient import (
    BlowupCertificate,
    QuotientProfile,
    ScaleLadder,
    bounded_quotient_check,
    certify_blowup,
    default_ladder,
    default_thresholds,
    en_test,
    profile,
    profile_grid,
)
from .perturb import (
    RationalFunction,
    derivative_bound_on_J,
    eval_rational,
    eval_rational_derivative,
    fit_fixed_poles,
    perturbation_invariance,
    random_rational,
)
