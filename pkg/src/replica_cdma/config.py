"""Shared configuration and domain types.

All variances and powers are stored in linear units. Decibel values appear
only at CLI boundaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised when a configuration violates a model constraint."""


class ReceiverKind(enum.Enum):
    """The four analyzed receivers plus the perfect-CSI upper bound."""

    JOINT_CE_MUDD = "joint"
    ONE_SHOT_CE_MUDD = "one-shot"
    OPTIMUM_SEPARATED = "separated"
    LMMSE = "lmmse"
    PERFECT_CSI_BOUND = "perfect-csi"


class Detector(enum.Enum):
    """Detector family selecting the data-phase fixed-point equation."""

    OPTIMAL = "optimal"
    LMMSE = "lmmse"


@dataclass(frozen=True)
class SystemConfig:
    """Large-system parameters of the MIMO DS-CDMA uplink.

    Parameters
    ----------
    beta : float
        System load (users per chip), > 0.
    m : int
        Transmit antennas per user. Per-stream power is ``P / m``.
    n : int
        Receive antennas.
    power : float
        Total per-user symbol power P (linear).
    noise_var : float
        Complex noise variance N0 per receive dimension (linear).
    tc : int
        Coherence time in symbol periods, >= 2.
    tau : int
        Pilot symbol periods, 0 <= tau <= tc.
    """

    beta: float
    m: int
    n: int
    power: float
    noise_var: float
    tc: int
    tau: int

    def __post_init__(self):
        if not self.beta >= 0:
            raise ConfigError("load beta must be nonnegative")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError("transmit antenna count must be a positive integer")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("receive antenna count must be a positive integer")
        if not self.power > 0:
            raise ConfigError("symbol power must be positive")
        if not self.noise_var > 0:
            raise ConfigError("noise variance must be positive")
        if int(self.tc) != self.tc or self.tc < 2:
            raise ConfigError("coherence time must be an integer >= 2")
        if int(self.tau) != self.tau or self.tau < 0:
            raise ConfigError("pilot length must be a nonnegative integer")
        if self.tau > self.tc:
            raise ConfigError("tau exceeds coherence time")

    @property
    def stream_power(self) -> float:
        """Per-stream symbol power P/M."""
        return self.power / self.m

    @property
    def snr_db(self) -> float:
        """P/N0 in dB. Exact round trip with :meth:`from_snr_db`."""
        return 10.0 * math.log10(self.power / self.noise_var)

    @classmethod
    def from_snr_db(cls, beta, m, n, snr_db, tc, tau, power=1.0):
        """Build a config with ``noise_var`` set so that P/N0 = 10^(snr_db/10)."""
        return cls(
            beta=beta,
            m=m,
            n=n,
            power=power,
            noise_var=power / 10.0 ** (snr_db / 10.0),
            tc=tc,
            tau=tau,
        )

    def with_tau(self, tau: int) -> "SystemConfig":
        return SystemConfig(
            self.beta, self.m, self.n, self.power, self.noise_var, self.tc, tau
        )


def validate(config: SystemConfig) -> SystemConfig:
    """Return ``config`` unchanged if it satisfies every invariant.

    Construction already enforces the invariants, so this re-checks a
    possibly tampered instance (e.g. one built with ``object.__setattr__``).
    """
    SystemConfig(
        config.beta,
        config.m,
        config.n,
        config.power,
        config.noise_var,
        config.tc,
        config.tau,
    )
    return config


@dataclass(frozen=True)
class TrainingSolution:
    """Training-phase effective noise variance and estimation-error variance.

    ``xi2 == sigma_tr2 / (pilots * stream_power + sigma_tr2)`` by
    construction; ``pilots == 0`` forces ``xi2 == 1``.
    """

    sigma_tr2: float
    xi2: float
    pilots: int

    def __post_init__(self):
        if not self.sigma_tr2 > 0:
            raise ConfigError("training noise variance must be positive")
        if not 0.0 <= self.xi2 <= 1.0:
            raise ConfigError("estimation-error variance must lie in [0, 1]")
        if self.pilots < 0:
            raise ConfigError("pilot count must be nonnegative")
        if self.pilots == 0 and self.xi2 != 1.0:
            raise ConfigError("zero pilots force unit estimation-error variance")


@dataclass(frozen=True)
class FixedPointCandidate:
    """One converged (or abandoned) solution of a data-phase fixed point."""

    sigma2: float
    free_energy: float
    converged: bool
    iterations: int
    residual: float


@dataclass(frozen=True)
class FixedPointOutcome:
    """All deduplicated candidates plus the free-energy-selected index."""

    candidates: tuple
    selected: int

    @property
    def sigma2(self) -> float:
        """Effective noise variance of the selected candidate."""
        return self.candidates[self.selected].sigma2

    @property
    def free_energy(self) -> float:
        return self.candidates[self.selected].free_energy


@dataclass(frozen=True)
class CurvePoint:
    x: float
    se_bits_per_chip: float
    sigma2_selected: float
    n_candidates: int = 1


@dataclass(frozen=True)
class ReceiverCurve:
    """Spectral efficiency of one receiver along a sweep axis."""

    receiver: ReceiverKind
    axis: str
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if any(p.se_bits_per_chip < -1e-12 for p in self.points):
            raise ConfigError("spectral efficiency must be nonnegative")
