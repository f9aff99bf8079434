"""Finite-size Monte Carlo simulation of the LMMSE receiver.

Simulates K users with M transmit antennas over a spreading factor L,
estimates the channel from the pilot periods with a per-receive-antenna
LMMSE solve, detects every communication period with the linear MMSE
filter that models the residual estimation error as additional Gaussian
noise, and counts uncoded QPSK symbol errors on the first stream.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, SystemConfig

THREADS_ENV = "REPLICA_CDMA_THREADS"


class Spreading(enum.Enum):
    """Chip distribution. QPSK chips are (+-1 +-1j)/sqrt(2)."""

    QPSK = "qpsk"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class McConfig:
    """Finite-system simulation parameters.

    ``config.beta`` must equal K/L; the SNR grid overrides the embedded
    noise variance point by point.
    """

    k: int
    l: int
    config: SystemConfig
    snr_db_grid: tuple
    trials: int
    seed: int
    spreading: Spreading = Spreading.QPSK

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ConfigError("K and L must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if abs(self.config.beta - self.k / self.l) > 1e-9:
            raise ConfigError("config.beta must equal K/L")


@dataclass(frozen=True)
class SerEstimate:
    """Binomial symbol-error estimate with a 95% normal interval."""

    p_hat: float
    errors: int
    decisions: int
    ci95: float

    @classmethod
    def from_counts(cls, errors: int, decisions: int) -> "SerEstimate":
        p = errors / decisions
        return cls(
            p_hat=p,
            errors=errors,
            decisions=decisions,
            ci95=1.96 * math.sqrt(p * (1.0 - p) / decisions),
        )


@dataclass(frozen=True)
class Block:
    """One coherence block: channel, chips, symbols and received signal.

    Shapes: ``h`` (N, KM), ``chips`` (Tc, L, KM), ``symbols`` (Tc, KM),
    ``y`` (Tc, L, N). The first ``tau`` periods carry pilots known to the
    receiver.
    """

    h: np.ndarray
    chips: np.ndarray
    symbols: np.ndarray
    y: np.ndarray
    tau: int


def _crandn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _qpsk(rng, shape, amplitude):
    re = rng.integers(0, 2, size=shape) * 2 - 1
    im = rng.integers(0, 2, size=shape) * 2 - 1
    return amplitude / math.sqrt(2.0) * (re + 1j * im)


def generate_block(mc: McConfig, rng: np.random.Generator, noise_var=None) -> Block:
    """Draw one coherence block of the chip-sampled vector channel.

    Every chip-period observation is ``(1/sqrt(L)) * sum_km chips * symbol
    * h_km`` plus circular noise of per-component variance ``noise_var``.
    """
    cfg = mc.config
    n0 = cfg.noise_var if noise_var is None else noise_var
    km = mc.k * cfg.m
    h = _crandn(rng, (cfg.n, km))
    if mc.spreading is Spreading.QPSK:
        chips = _qpsk(rng, (cfg.tc, mc.l, km), 1.0)
    else:
        chips = _crandn(rng, (cfg.tc, mc.l, km))
    symbols = _qpsk(rng, (cfg.tc, km), math.sqrt(cfg.stream_power))
    signal = (chips * symbols[:, None, :]) @ h.T / math.sqrt(mc.l)
    noise = math.sqrt(n0) * _crandn(rng, signal.shape)
    return Block(h=h, chips=chips, symbols=symbols, y=signal + noise, tau=cfg.tau)


def lmmse_channel_estimate(block: Block, noise_var: float):
    """LMMSE channel estimate from the pilot periods.

    Solves the stacked linear-Gaussian training model independently per
    receive antenna (channel entries and noise are independent across
    antennas). Returns the estimate (N, KM) and the KM x KM error
    covariance ``I - A^H (A A^H + N0 I)^{-1} A`` shared by all antennas.
    """
    if block.tau < 1:
        raise ConfigError("channel estimation requires at least one pilot period")
    tc, length, km = block.chips.shape
    l_sqrt = math.sqrt(length)
    a = (block.chips[: block.tau] * block.symbols[: block.tau, None, :]).reshape(
        -1, km
    ) / l_sqrt
    obs = block.y[: block.tau].reshape(-1, block.y.shape[-1])
    gram = a.conj().T @ a
    lhs = gram + noise_var * np.eye(km)
    hhat = np.linalg.solve(lhs, a.conj().T @ obs).T
    err_cov = noise_var * np.linalg.inv(lhs)
    return hhat, err_cov


def _detect_all(block: Block, hhat, err_var, noise_var: float, stream_power: float):
    """Batched LMMSE soft symbol estimates for all communication periods.

    Returns an array (Tc - tau, KM). The model covariance per period is
    ``(P/M)(1/L) sum_km chips_km chips_km^H (x) (hhat_km hhat_km^H +
    err_var_km I_N) + N0 I``; the soft estimate is the standard Wiener
    form with prior symbol variance P/M.
    """
    tc, length, km = block.chips.shape
    n = hhat.shape[0]
    chips = block.chips[block.tau :] / math.sqrt(length)
    tprime = chips.shape[0]

    # per-stream rank-one channel outer products plus error covariance
    outer_h = hhat.T[:, :, None] * hhat.conj().T[:, None, :]
    outer_h += err_var[:, None, None] * np.eye(n)

    # cov[(l,n),(l',n')] built as kron over (L,L) chip and (N,N) channel parts
    outer_s = chips[:, :, None, :] * chips[:, None, :, :].conj()
    cov = stream_power * np.einsum("tabk,kcd->tacbd", outer_s, outer_h)
    cov = cov.reshape(tprime, length * n, length * n)
    idx = np.arange(length * n)
    cov[:, idx, idx] += noise_var

    phi = (chips[:, :, None, :] * hhat[None, None, :, :]).reshape(tprime, length * n, km)
    yv = block.y[block.tau :].reshape(tprime, length * n)

    try:
        z = np.linalg.solve(cov, yv[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        warnings.warn("singular detection covariance, regularizing", RuntimeWarning)
        cov[:, idx, idx] += 1e-12 * np.trace(cov, axis1=1, axis2=2)[:, None].real
        z = np.linalg.solve(cov, yv[:, :, None])[:, :, 0]
    return stream_power * np.einsum("tik,ti->tk", phi.conj(), z)


def lmmse_detect(
    block: Block, hhat, err_var, t: int, noise_var: float, stream_power: float
):
    """Soft LMMSE estimate of all streams in communication period ``t``."""
    if not block.tau <= t < block.chips.shape[0]:
        raise ConfigError("period index outside the communication phase")
    soft = _detect_all(block, hhat, np.asarray(err_var), noise_var, stream_power)
    return soft[t - block.tau]


def _count_block_errors(mc: McConfig, rng, noise_var: float) -> tuple:
    """Errors and decisions on user 1 antenna 1 for one coherence block."""
    block = generate_block(mc, rng, noise_var)
    hhat, err_cov = lmmse_channel_estimate(block, noise_var)
    err_var = np.real(np.diag(err_cov))
    soft = _detect_all(block, hhat, err_var, noise_var, mc.config.stream_power)
    sent = block.symbols[block.tau :, 0]
    got = soft[:, 0]
    wrong = (np.sign(got.real) != np.sign(sent.real)) | (
        np.sign(got.imag) != np.sign(sent.imag)
    )
    return int(wrong.sum()), wrong.size


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return min(4, os.cpu_count() or 1)


def run_ser(mc: McConfig) -> list:
    """Monte Carlo SER of the first stream at every SNR grid point.

    Deterministic for a fixed seed regardless of the thread count: every
    (SNR point, block) pair gets its own spawned RNG stream and the counts
    are summed in index order.
    """
    if mc.config.tau < 1:
        raise ConfigError("simulation requires at least one pilot period")
    root = np.random.SeedSequence(mc.seed)
    per_point = root.spawn(len(mc.snr_db_grid))
    results = []
    workers = _thread_count()
    for point_seq, snr_db in zip(per_point, mc.snr_db_grid):
        noise_var = mc.config.power / 10.0 ** (snr_db / 10.0)
        streams = [np.random.default_rng(s) for s in point_seq.spawn(mc.trials)]

        def one(rng):
            return _count_block_errors(mc, rng, noise_var)

        if workers > 1 and mc.trials > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                counts = list(pool.map(one, streams))
        else:
            counts = [one(rng) for rng in streams]
        errors = sum(c[0] for c in counts)
        decisions = sum(c[1] for c in counts)
        results.append(SerEstimate.from_counts(errors, decisions))
    return results
