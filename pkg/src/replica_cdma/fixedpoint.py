"""Data-phase fixed-point solver with free-energy solution selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .config import (
    Detector,
    FixedPointCandidate,
    FixedPointOutcome,
    SystemConfig,
    TrainingSolution,
)
from .simo import (
    DEFAULT_QUAD,
    QuadratureSpec,
    SimoContext,
    decoupled_mutual_info,
    free_energy,
    mmse_term_lmmse,
    mmse_term_optimal,
)

DEDUP_REL_TOL = 1e-6


class NoConvergence(RuntimeError):
    """All seeds exhausted the iteration cap."""

    def __init__(self, residuals):
        self.residuals = residuals
        super().__init__(f"fixed point did not converge; final residuals {residuals}")


@dataclass(frozen=True)
class SolverSpec:
    """Damped-iteration settings for the data-phase fixed point."""

    damping: float = 0.5
    tol: float = 1e-10
    max_iters: int = 10000
    extra_seeds: tuple = ()

    def seeds(self, config: SystemConfig) -> tuple:
        """Standard decoupled and interference-limited starts, plus extras."""
        base = (config.noise_var, config.noise_var + config.beta * config.power)
        return base + tuple(self.extra_seeds)


def _rhs(sigma2, config, training, kappa, detector, quad):
    """Right-hand side of the data fixed-point equation at sigma2."""
    xi2 = training.xi2
    p_stream = config.stream_power
    a = p_stream * xi2
    shrink = sigma2 / (a + sigma2)
    ctx = SimoContext(xi2=xi2, sigma2=sigma2, power=config.power, m=config.m, n=config.n)
    if detector is Detector.LMMSE:
        mmse = mmse_term_lmmse(ctx, quad)
        known_frac = 0.0
    else:
        mmse = mmse_term_optimal(ctx, quad)
        known_frac = kappa
    return (
        config.noise_var
        + config.beta * config.power * xi2 * shrink
        + config.beta * (1.0 - known_frac) * (config.m / config.n) * shrink**2 * mmse
    )


def _iterate(seed, config, training, kappa, detector, spec, quad):
    """Damped substitution from one seed; halves damping upon oscillation."""
    sigma2 = seed
    damping = spec.damping
    prev_resid = 0.0
    for it in range(1, spec.max_iters + 1):
        rhs = _rhs(sigma2, config, training, kappa, detector, quad)
        resid = rhs - sigma2
        if abs(resid) <= spec.tol * sigma2:
            return sigma2, True, it, abs(resid) / sigma2
        if resid * prev_resid < 0.0 and damping > 1.0 / 64.0:
            damping = max(damping / 2.0, 1.0 / 64.0)
        prev_resid = resid
        sigma2 = (1.0 - damping) * sigma2 + damping * rhs
    return sigma2, False, spec.max_iters, abs(resid) / sigma2


def data_fixed_point(
    config: SystemConfig,
    training: TrainingSolution,
    kappa: float = 0.0,
    detector: Detector = Detector.OPTIMAL,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> FixedPointOutcome:
    """Solve the data-phase fixed point from every seed and select by free energy.

    ``kappa`` is the fraction of interferers already decoded; it is ignored
    for the LMMSE detector, which performs no successive decoding.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    roots = []
    failures = []
    for seed in spec.seeds(config):
        sigma2, ok, iters, resid = _iterate(
            seed, config, training, kappa, detector, spec, quad
        )
        if not ok:
            failures.append(resid)
            continue
        if any(abs(sigma2 - r[0]) <= DEDUP_REL_TOL * r[0] for r in roots):
            continue
        roots.append((sigma2, iters, resid))
    if not roots:
        raise NoConvergence(failures)

    candidates = []
    for sigma2, iters, resid in sorted(roots):
        ctx = SimoContext(
            xi2=training.xi2, sigma2=sigma2, power=config.power, m=config.m, n=config.n
        )
        info = decoupled_mutual_info(ctx, quad)
        kap = 0.0 if detector is Detector.LMMSE else kappa
        fe = free_energy(ctx, kap, info, config.noise_var, config.beta)
        candidates.append(
            FixedPointCandidate(
                sigma2=sigma2,
                free_energy=fe,
                converged=True,
                iterations=iters,
                residual=resid,
            )
        )
    selected = int(np.argmin([c.free_energy for c in candidates]))
    return FixedPointOutcome(candidates=tuple(candidates), selected=selected)


def kappa_nodes(n_nodes: int = 33, lo: float = 0.0, hi: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to [lo, hi]."""
    x, w = roots_legendre(n_nodes)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def kappa_continuation(
    config: SystemConfig,
    training: TrainingSolution,
    detector: Detector = Detector.OPTIMAL,
    nodes=None,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
):
    """Solve the fixed point along a kappa grid with warm starts.

    Selection runs independently per node, so the selected branch may jump
    at an interior threshold when two solutions coexist.
    """
    if nodes is None:
        nodes = kappa_nodes()[0]
    nodes = np.asarray(nodes, dtype=float)
    if np.any(np.diff(nodes) < 0):
        raise ValueError("kappa nodes must be sorted ascending")
    outcomes = []
    warm: tuple = ()
    for kap in nodes:
        node_spec = SolverSpec(
            damping=spec.damping,
            tol=spec.tol,
            max_iters=spec.max_iters,
            extra_seeds=spec.extra_seeds + warm,
        )
        try:
            out = data_fixed_point(config, training, kap, detector, node_spec, quad)
        except NoConvergence as err:
            raise NoConvergence(
                {"kappa": float(kap), "residuals": err.residuals}
            ) from err
        outcomes.append(out)
        warm = tuple(c.sigma2 for c in out.candidates)
    return outcomes


def locate_kappa_jump(
    config: SystemConfig,
    training: TrainingSolution,
    kappa_lo: float,
    kappa_hi: float,
    spec: SolverSpec = SolverSpec(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    tol: float = 1e-4,
) -> float:
    """Bisect the branch-switch threshold of the selected solution.

    ``kappa_lo``/``kappa_hi`` must bracket a jump of the free-energy-selected
    sigma2 for the optimal detector.
    """

    def selected(kap):
        return data_fixed_point(
            config, training, kap, Detector.OPTIMAL, spec, quad
        ).sigma2

    s_lo, s_hi = selected(kappa_lo), selected(kappa_hi)
    mid_ref = math.sqrt(s_lo * s_hi)
    lo, hi = kappa_lo, kappa_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if selected(mid) > mid_ref:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
