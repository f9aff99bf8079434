"""Decoupled-channel quantities against enumeration and Monte Carlo oracles.

The posterior-mean oracle enumerates the four QPSK hypotheses directly;
the expectation oracles re-simulate the decoupled channel with plain
sampling, independent of the quadrature rules under test.
"""

import math

import numpy as np
import pytest

from replica_cdma import (
    DEFAULT_QUAD,
    QuadratureSpec,
    SimoContext,
    bpsk_capacity,
    channel_uncertainty_info,
    decoupled_mutual_info,
    gamma_expectation,
    gaussian_kl,
    mmse_bpsk,
    mmse_term_lmmse,
    mmse_term_optimal,
    qfunc,
    qpsk_posterior_mean,
    ser_large_system,
)

# Independently integrated reference values (adaptive quadrature of the
# defining one-dimensional integrals, absolute error below 1e-9).
BPSK_CAPACITY_AT_1 = 0.4859441541329354
MMSE_BPSK_AT_1 = 0.4495995092066727


def ctx(xi2=0.12, sigma2=0.2, power=1.0, m=1, n=2):
    return SimoContext(xi2=xi2, sigma2=sigma2, power=power, m=m, n=n)


def qpsk_alphabet(power, m):
    a = math.sqrt(power / (2.0 * m))
    return np.array([a + 1j * a, a - 1j * a, -a + 1j * a, -a - 1j * a])


def enumerate_posterior_mean(z, hhat, sigma_v2, power, m):
    """Brute-force posterior mean over the four QPSK hypotheses."""
    alphabet = qpsk_alphabet(power, m)
    logw = np.array(
        [-np.sum(np.abs(z - hhat * b) ** 2) / sigma_v2 for b in alphabet]
    )
    w = np.exp(logw - logw.max())
    return np.sum(alphabet * w) / np.sum(w)


class TestPosteriorMean:
    def test_matches_enumeration(self):
        rng = np.random.default_rng(123)
        for n in (1, 2, 4):
            for power, m in ((1.0, 1), (2.0, 4)):
                for _ in range(20):
                    hhat = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
                    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                    sigma_v2 = float(rng.uniform(0.05, 2.0))
                    got = qpsk_posterior_mean(z, hhat, sigma_v2, power, m)
                    want = enumerate_posterior_mean(z, hhat, sigma_v2, power, m)
                    assert abs(got - want) < 1e-12

    def test_noiseless_limit_recovers_symbol(self):
        rng = np.random.default_rng(5)
        hhat = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b = qpsk_alphabet(1.0, 1)[2]
        z = hhat * b
        got = qpsk_posterior_mean(z, hhat, 1e-9, 1.0, 1)
        assert abs(got - b) < 1e-8

    def test_high_noise_limit_is_zero(self):
        hhat = np.array([1.0 + 0j])
        z = np.array([0.7 - 0.2j])
        got = qpsk_posterior_mean(z, hhat, 1e9, 1.0, 1)
        assert abs(got) < 1e-6

    def test_batched_matches_scalar(self):
        rng = np.random.default_rng(9)
        hhat = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
        z = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
        batched = qpsk_posterior_mean(z, hhat, 0.3, 1.0, 1)
        singles = [qpsk_posterior_mean(z[i], hhat[i], 0.3, 1.0, 1) for i in range(8)]
        assert np.allclose(batched, singles, atol=1e-14)


class TestScalarCurves:
    def test_frozen_capacity_constant(self):
        assert abs(bpsk_capacity(1.0) - BPSK_CAPACITY_AT_1) < 1e-9

    def test_frozen_mmse_constant(self):
        assert abs(mmse_bpsk(1.0) - MMSE_BPSK_AT_1) < 1e-8

    def test_mmse_identity(self):
        # E[tanh(rho + sqrt(rho) w)] = E[tanh^2(rho + sqrt(rho) w)], so the
        # MMSE equals E[1 - tanh^2] as well.
        from replica_cdma.simo import _hermite_rule

        w, wt = _hermite_rule(400)
        for rho in (0.1, 0.5, 1.0, 3.0, 8.0):
            arg = rho + math.sqrt(rho) * w
            diff = wt @ (np.tanh(arg) - np.tanh(arg) ** 2)
            assert abs(diff) < 1e-9

    def test_i_mmse_relation(self):
        # d/drho of the capacity in bits equals mmse(rho) / (2 ln 2)
        quad = QuadratureSpec(64, 200)
        h = 1e-4
        for rho in (0.3, 1.0, 2.5):
            deriv = (bpsk_capacity(rho + h, quad) - bpsk_capacity(rho - h, quad)) / (2 * h)
            assert abs(deriv - mmse_bpsk(rho, quad) / (2 * math.log(2))) < 1e-5

    def test_limits(self):
        assert bpsk_capacity(1e-9) < 1e-6
        assert abs(bpsk_capacity(50.0) - 1.0) < 1e-9
        assert abs(mmse_bpsk(1e-12) - 1.0) < 1e-6
        assert mmse_bpsk(50.0) < 1e-9

    def test_monotonicity(self):
        rho = np.linspace(0.01, 6.0, 40)
        cap = bpsk_capacity(rho)
        mm = mmse_bpsk(rho)
        assert np.all(np.diff(cap) > 0)
        assert np.all(np.diff(mm) < 0)


def _sample_decoupled(c, rng, samples):
    """Draw (hhat, b, z) from the decoupled channel of context ``c``."""
    n = c.n
    hhat = math.sqrt(c.hhat_var / 2.0) * (
        rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    )
    b = rng.choice(qpsk_alphabet(c.power, c.m), size=samples)
    v = math.sqrt(c.sigma_v2 / 2.0) * (
        rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    )
    z = hhat * b[:, None] + v
    return hhat, b, z


class TestExpectationOracles:
    def test_mmse_term_optimal_against_simulation(self):
        c = ctx()
        rng = np.random.default_rng(42)
        hhat, b, z = _sample_decoupled(c, rng, 400_000)
        a = math.sqrt(c.stream_power / 2.0)
        u = np.sum(hhat.conj() * z, axis=1)
        scale = 2.0 * a / c.sigma_v2
        post = a * (np.tanh(scale * u.real) + 1j * np.tanh(scale * u.imag))
        # the tanh form equals the enumeration oracle (separate test), so
        # this checks the Gamma/Gaussian quadrature reduction
        vals = np.sum(np.abs(hhat) ** 2, axis=1) * np.abs(b - post) ** 2
        se = vals.std() / math.sqrt(vals.size)
        assert abs(vals.mean() - mmse_term_optimal(c)) < 4 * se

    def test_mmse_term_lmmse_against_simulation(self):
        c = ctx()
        rng = np.random.default_rng(43)
        hhat, b, z = _sample_decoupled(c, rng, 400_000)
        r2 = np.sum(np.abs(hhat) ** 2, axis=1)
        u = np.sum(hhat.conj() * z, axis=1)
        post = c.stream_power * u / (c.stream_power * r2 + c.sigma_v2)
        vals = r2 * np.abs(b - post) ** 2
        se = vals.std() / math.sqrt(vals.size)
        assert abs(vals.mean() - mmse_term_lmmse(c)) < 4 * se

    def test_mutual_info_against_simulation(self):
        c = ctx()
        rng = np.random.default_rng(44)
        samples = 400_000
        r2 = c.hhat_var * rng.gamma(c.n, 1.0, size=samples)
        rho = c.stream_power * r2 / c.sigma_v2
        w = rng.standard_normal(samples)
        vals = 2.0 * (1.0 - np.logaddexp(0.0, -2.0 * rho - 2.0 * np.sqrt(rho) * w) / math.log(2))
        se = vals.std() / math.sqrt(samples)
        assert abs(vals.mean() - decoupled_mutual_info(c)) < 4 * se

    def test_ser_against_simulation(self):
        c = ctx()
        rng = np.random.default_rng(45)
        hhat, b, z = _sample_decoupled(c, rng, 400_000)
        u = np.sum(hhat.conj() * z, axis=1)
        wrong = (np.sign(u.real) != np.sign(b.real)) | (np.sign(u.imag) != np.sign(b.imag))
        p = wrong.mean()
        se = math.sqrt(p * (1 - p) / wrong.size)
        assert abs(p - ser_large_system(c)) < 4 * se

    def test_lmmse_never_beats_optimal(self):
        for xi2 in (0.0, 0.1, 0.4):
            for sigma2 in (0.05, 0.3, 1.5):
                c = ctx(xi2=xi2, sigma2=sigma2)
                assert mmse_term_lmmse(c) >= mmse_term_optimal(c) - 1e-12


class TestQuadrature:
    def test_gamma_expectation_moments(self):
        for shape in (1, 2, 5):
            scale = 0.7
            m1 = gamma_expectation(lambda x: x, shape, scale, 64)
            m2 = gamma_expectation(lambda x: x**2, shape, scale, 64)
            assert math.isclose(m1, shape * scale, rel_tol=1e-13)
            assert math.isclose(m2, shape * (shape + 1) * scale**2, rel_tol=1e-13)

    def test_node_doubling_stability(self):
        doubled = DEFAULT_QUAD.doubled()
        for c in (ctx(), ctx(xi2=0.4, sigma2=0.8, n=4), ctx(xi2=0.02, sigma2=0.05)):
            assert abs(mmse_term_optimal(c, DEFAULT_QUAD) - mmse_term_optimal(c, doubled)) < 1e-8
            assert abs(mmse_term_lmmse(c, DEFAULT_QUAD) - mmse_term_lmmse(c, doubled)) < 1e-8
            assert abs(decoupled_mutual_info(c, DEFAULT_QUAD) - decoupled_mutual_info(c, doubled)) < 1e-8
            assert abs(ser_large_system(c, DEFAULT_QUAD) - ser_large_system(c, doubled)) < 1e-8


class TestInformationPieces:
    def test_gaussian_kl(self):
        assert gaussian_kl(0.3, 0.3) == 0.0
        assert gaussian_kl(0.3, 0.5) > 0.0
        assert gaussian_kl(0.5, 0.3) > 0.0

    def test_channel_uncertainty_info(self):
        c = ctx(xi2=0.25, sigma2=0.5, power=2.0, m=2, n=3)
        assert math.isclose(
            channel_uncertainty_info(c), 3 * math.log2(1 + 1.0 * 0.25 / 0.5), rel_tol=1e-14
        )
        assert channel_uncertainty_info(ctx(xi2=0.0)) == 0.0

    def test_qfunc(self):
        assert math.isclose(qfunc(0.0), 0.5, rel_tol=1e-15)
        assert qfunc(6.0) < 1e-8
        assert math.isclose(qfunc(-6.0), 1.0, abs_tol=1e-8)

    def test_degenerate_estimate_short_circuits(self):
        c = ctx(xi2=1.0)
        assert mmse_term_optimal(c) == 0.0
        assert mmse_term_lmmse(c) == 0.0
        assert decoupled_mutual_info(c) == 0.0
        assert ser_large_system(c) == 0.75

    def test_context_validation(self):
        with pytest.raises(ValueError):
            ctx(xi2=1.2)
        with pytest.raises(ValueError):
            ctx(sigma2=0.0)
        c = ctx(xi2=0.2, sigma2=0.3, power=2.0, m=4)
        assert math.isclose(c.sigma_v2, 0.5 * 0.2 + 0.3, rel_tol=1e-15)
        assert math.isclose(c.hhat_var, 0.8, rel_tol=1e-15)
