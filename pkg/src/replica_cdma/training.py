"""Training-phase fixed point and the channel-estimation error variance."""

from __future__ import annotations

import math

from .config import SystemConfig, TrainingSolution


def xi_squared(sigma_tr2: float, pilots: int, power: float, m: int) -> float:
    """Per-component variance of the LMMSE channel-estimation error.

    ``sigma_tr2 / (pilots * (power/m) + sigma_tr2)``; equals 1 for zero
    pilots and decreases strictly with the pilot count.
    """
    if sigma_tr2 <= 0:
        raise ValueError("training noise variance must be positive")
    if pilots < 0:
        raise ValueError("pilot count must be nonnegative")
    return sigma_tr2 / (pilots * (power / m) + sigma_tr2)


def solve_training(config: SystemConfig, pilots: float) -> TrainingSolution:
    """Solve sigma2 = N0 + beta * P * xi2(sigma2, pilots) for the training phase.

    ``pilots`` is normally the integer pilot length but fractional values
    are accepted (the equations extend smoothly; used for interpolation
    and continuity analysis). For ``pilots > 0`` the unique positive root
    of the equivalent quadratic

        sigma2**2 + sigma2 * (pilots*P/M - N0 - beta*P) - N0*pilots*P/M = 0

    is returned in closed form. ``pilots == 0`` gives sigma2 = N0 + beta*P
    with xi2 = 1 exactly.
    """
    if pilots < 0:
        raise ValueError("pilot count must be nonnegative")
    n0 = config.noise_var
    bp = config.beta * config.power
    if pilots == 0:
        return TrainingSolution(sigma_tr2=n0 + bp, xi2=1.0, pilots=0)
    tp = pilots * config.stream_power
    b = tp - n0 - bp
    c = -n0 * tp
    sigma2 = 0.5 * (-b + math.sqrt(b * b - 4.0 * c))
    return TrainingSolution(
        sigma_tr2=sigma2,
        xi2=xi_squared(sigma2, pilots, config.power, config.m),
        pilots=pilots,
    )


def solve_training_bisection(
    config: SystemConfig, pilots: int, tol: float = 1e-14
) -> float:
    """Bisection on the scalar training equation; debug cross-check only."""
    n0 = config.noise_var
    bp = config.beta * config.power

    def resid(s2):
        return n0 + bp * xi_squared(s2, pilots, config.power, config.m) - s2

    lo, hi = n0, n0 + bp
    if resid(hi) >= 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)
