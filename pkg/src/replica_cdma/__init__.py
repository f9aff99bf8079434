"""Large-system spectral efficiency of trained MIMO DS-CDMA receivers.

Replica-symmetric fixed-point analysis of four receivers (joint channel
estimation and multiuser decoding, one-shot CE-MUDD, optimum separated,
separated LMMSE) under pilot-based LMMSE channel estimation, plus a
finite-system Monte Carlo simulator of the LMMSE receiver.
"""

__version__ = "0.1.0"

from .config import (
    ConfigError,
    CurvePoint,
    Detector,
    FixedPointCandidate,
    FixedPointOutcome,
    ReceiverCurve,
    ReceiverKind,
    SystemConfig,
    TrainingSolution,
    validate,
)
from .fixedpoint import (
    NoConvergence,
    SolverSpec,
    data_fixed_point,
    kappa_continuation,
    kappa_nodes,
    locate_kappa_jump,
)
from .simo import (
    DEFAULT_QUAD,
    QuadratureSpec,
    SimoContext,
    bpsk_capacity,
    channel_uncertainty_info,
    decoupled_mutual_info,
    free_energy,
    gamma_expectation,
    gaussian_kl,
    mmse_bpsk,
    mmse_term_lmmse,
    mmse_term_optimal,
    qfunc,
    qpsk_posterior_mean,
    ser_large_system,
)
from .simulate import (
    Block,
    McConfig,
    SerEstimate,
    Spreading,
    generate_block,
    lmmse_channel_estimate,
    lmmse_detect,
    run_ser,
)
from .spectral import (
    kappa_average_info,
    optimize_tau,
    perfect_csi_training,
    se_joint,
    se_lmmse,
    se_one_shot,
    se_optimum_separated,
    se_perfect_csi_bound,
    spectral_efficiency,
)
from .training import solve_training, solve_training_bisection, xi_squared

__all__ = [
    "Block",
    "ConfigError",
    "CurvePoint",
    "DEFAULT_QUAD",
    "Detector",
    "FixedPointCandidate",
    "FixedPointOutcome",
    "McConfig",
    "NoConvergence",
    "QuadratureSpec",
    "ReceiverCurve",
    "ReceiverKind",
    "SerEstimate",
    "SimoContext",
    "SolverSpec",
    "Spreading",
    "SystemConfig",
    "TrainingSolution",
    "bpsk_capacity",
    "channel_uncertainty_info",
    "data_fixed_point",
    "decoupled_mutual_info",
    "free_energy",
    "gamma_expectation",
    "gaussian_kl",
    "generate_block",
    "kappa_average_info",
    "kappa_continuation",
    "kappa_nodes",
    "lmmse_channel_estimate",
    "lmmse_detect",
    "locate_kappa_jump",
    "mmse_bpsk",
    "mmse_term_lmmse",
    "mmse_term_optimal",
    "optimize_tau",
    "perfect_csi_training",
    "qfunc",
    "qpsk_posterior_mean",
    "run_ser",
    "se_joint",
    "se_lmmse",
    "se_one_shot",
    "se_optimum_separated",
    "se_perfect_csi_bound",
    "ser_large_system",
    "solve_training",
    "solve_training_bisection",
    "spectral_efficiency",
    "validate",
    "xi_squared",
]
