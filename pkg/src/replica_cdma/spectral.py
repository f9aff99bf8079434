"""Per-receiver spectral-efficiency formulas and the pilot-length optimizer.

All results are in bits per chip. Each receiver's value is a training
prefactor times the decoupled per-stream mutual information evaluated at
the free-energy-selected effective noise variance; the successive-decoding
receivers additionally average that information over the decoded fraction
``kappa`` in [0, 1].
"""

from __future__ import annotations

import functools

import numpy as np

from .config import (
    Detector,
    ReceiverKind,
    SystemConfig,
    TrainingSolution,
)
from .fixedpoint import (
    SolverSpec,
    data_fixed_point,
    kappa_continuation,
    kappa_nodes,
    locate_kappa_jump,
)
from .simo import DEFAULT_QUAD, QuadratureSpec, SimoContext, decoupled_mutual_info
from .training import solve_training

# Relative change of the selected sigma2 between adjacent kappa scan points
# above which a first-order branch jump is assumed and the integral split.
JUMP_REL_TOL = 0.08


def perfect_csi_training(config: SystemConfig) -> TrainingSolution:
    """Genie-aided training with zero estimation error (xi2 = 0)."""
    return TrainingSolution(sigma_tr2=config.noise_var, xi2=0.0, pilots=1)


def _mutual_info(config, training, sigma2, quad):
    ctx = SimoContext(
        xi2=training.xi2, sigma2=sigma2, power=config.power, m=config.m, n=config.n
    )
    return decoupled_mutual_info(ctx, quad)


def _info_on_grid(config, training, nodes, spec, quad):
    """Selected sigma2 and mutual information along a sorted kappa grid."""
    outcomes = kappa_continuation(config, training, Detector.OPTIMAL, nodes, spec, quad)
    sigma2 = np.array([o.sigma2 for o in outcomes])
    info = np.array([_mutual_info(config, training, s, quad) for s in sigma2])
    return sigma2, info


def kappa_average_info(
    config: SystemConfig,
    training: TrainingSolution,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    n_nodes: int = 33,
) -> float:
    """Integral over kappa in [0,1] of the decoupled mutual information.

    Gauss-Legendre on the full interval, preceded by a scan (including both
    endpoints) for a discontinuity of the selected solution. If the selected
    branch jumps, the threshold is bisected to 1e-4 and the integral split
    there so each piece is smooth again.
    """
    if training.xi2 >= 1.0:
        return 0.0
    inner, weights = kappa_nodes(n_nodes)
    scan = np.concatenate(([0.0], inner, [1.0]))
    sigma2, info = _info_on_grid(config, training, scan, spec, quad)

    rel_step = np.abs(np.diff(sigma2)) / sigma2[1:]
    if rel_step.max() <= JUMP_REL_TOL:
        return float(weights @ info[1:-1])

    i = int(np.argmax(rel_step))
    kc = locate_kappa_jump(config, training, scan[i], scan[i + 1], spec, quad)
    total = 0.0
    for lo, hi in ((0.0, kc), (kc, 1.0)):
        sub_nodes, sub_w = kappa_nodes(n_nodes, lo, hi)
        _, sub_info = _info_on_grid(config, training, sub_nodes, spec, quad)
        total += sub_w @ sub_info
    return float(total)


def se_optimum_separated(
    config: SystemConfig,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    tau=None,
) -> float:
    """Optimal multiuser detection on the pilot-based channel estimate,
    without successive interference cancellation.

    ``tau`` overrides ``config.tau`` and may be fractional; that is a
    display and continuity-analysis convenience, never used to optimize.
    """
    tau = config.tau if tau is None else tau
    if tau >= config.tc or tau == 0:
        return 0.0
    training = solve_training(config, tau)
    out = data_fixed_point(config, training, 0.0, Detector.OPTIMAL, spec, quad)
    info = _mutual_info(config, training, out.sigma2, quad)
    return config.beta * config.m * (1.0 - tau / config.tc) * info


def se_one_shot(
    config: SystemConfig,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    n_nodes: int = 33,
    tau=None,
) -> float:
    """Successive decoding on a one-shot (pilot-only) channel estimate.

    ``tau`` overrides ``config.tau``; fractional values are allowed for
    plotting and continuity analysis.
    """
    tau = config.tau if tau is None else tau
    if tau >= config.tc or tau == 0:
        return 0.0
    training = solve_training(config, tau)
    avg = kappa_average_info(config, training, spec, quad, n_nodes)
    return config.beta * config.m * (1.0 - tau / config.tc) * avg


@functools.lru_cache(maxsize=4096)
def _joint_stage_info(
    beta: float,
    m: int,
    n: int,
    power: float,
    noise_var: float,
    pilots: int,
    gamma_nodes: int,
    hermite_nodes: int,
    n_nodes: int,
) -> float:
    """kappa-averaged mutual information of one decoding stage.

    Stage values depend on the pilot count available to that stage, not on
    tau or Tc, so they are cached across tau sweeps and optimizer scans.
    """
    if pilots == 0:
        return 0.0
    config = SystemConfig(
        beta=beta, m=m, n=n, power=power, noise_var=noise_var, tc=pilots + 1, tau=0
    )
    training = solve_training(config, pilots)
    quad = QuadratureSpec(gamma_nodes, hermite_nodes)
    return kappa_average_info(config, training, SolverSpec(), quad, n_nodes)


def se_joint(
    config: SystemConfig,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    n_nodes: int = 33,
) -> float:
    """Joint channel estimation and multiuser decoding.

    Each data period t in (tau, Tc] is decoded with the channel re-estimated
    from all t-1 previously resolved periods, so the stage sum runs over
    pilot counts tau..Tc-1 regardless of how many were actual pilots.
    """
    total = 0.0
    for pilots in range(config.tau, config.tc):
        total += _joint_stage_info(
            config.beta,
            config.m,
            config.n,
            config.power,
            config.noise_var,
            pilots,
            quad.gamma_nodes,
            quad.hermite_nodes,
            n_nodes,
        )
    return config.beta * config.m * total / config.tc


def se_lmmse(
    config: SystemConfig,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Separated LMMSE detection on the pilot-based channel estimate."""
    if config.tau >= config.tc or config.tau == 0:
        return 0.0
    training = solve_training(config, config.tau)
    out = data_fixed_point(config, training, 0.0, Detector.LMMSE, spec, quad)
    info = _mutual_info(config, training, out.sigma2, quad)
    return config.beta * config.m * (1.0 - config.tau / config.tc) * info


def se_perfect_csi_bound(
    config: SystemConfig,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Upper bound: receiver knows the channel exactly (xi2 = 0)."""
    if config.tau >= config.tc:
        return 0.0
    training = perfect_csi_training(config)
    out = data_fixed_point(config, training, 0.0, Detector.OPTIMAL, spec, quad)
    info = _mutual_info(config, training, out.sigma2, quad)
    return config.beta * config.m * (1.0 - config.tau / config.tc) * info


_SE_FUNCS = {
    ReceiverKind.JOINT_CE_MUDD: se_joint,
    ReceiverKind.ONE_SHOT_CE_MUDD: se_one_shot,
    ReceiverKind.OPTIMUM_SEPARATED: se_optimum_separated,
    ReceiverKind.LMMSE: se_lmmse,
    ReceiverKind.PERFECT_CSI_BOUND: se_perfect_csi_bound,
}


def spectral_efficiency(
    config: SystemConfig,
    receiver: ReceiverKind,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Spectral efficiency in bits per chip of the requested receiver."""
    return _SE_FUNCS[receiver](config, spec, quad)


def optimize_tau(
    config: SystemConfig,
    receiver: ReceiverKind,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
):
    """Exhaustive scan of integer pilot lengths 0..Tc.

    Returns (tau_opt, se_at_opt); ties break toward the smaller tau.
    """
    best_tau, best_se = 0, -np.inf
    for tau in range(config.tc + 1):
        se = spectral_efficiency(config.with_tau(tau), receiver, spec, quad)
        if se > best_se:
            best_tau, best_se = tau, se
    return best_tau, best_se
