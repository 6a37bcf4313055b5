import unittest

import numpy as np

from classes.SpectralDensity import FormFactor, ReservoirParams, SpectralDensity
from constants.defaults import Profile
from reservoir.certify import (
    correlationAtZeroOracle,
    decayFit,
    decayWindow,
    detailedBalanceResidual,
    psdOracle,
)
from utils.errors import AssumptionViolation, ConfigurationError, DomainError, NumericalError


def makeReservoir(beta=1.0, d_res=2, sigma=1.0, profile=Profile.GAUSSIAN, **params):
    form = FormFactor(profile=profile, sigma=sigma, d_res=d_res)
    return SpectralDensity(ReservoirParams(beta=beta, form_factor=form, **params))


class TestSpectralDensity(unittest.TestCase):
    def test_closed_form_three_dimensions(self):
        psd = makeReservoir(d_res=3)
        expected = 4.0 * np.pi * np.exp(-1.0) / (np.e - 1.0)
        np.testing.assert_allclose(psd.psd(1.0), expected, rtol=1e-13)
        np.testing.assert_allclose(psd.psd(-1.0) / psd.psd(1.0), np.e, rtol=1e-13)
        self.assertEqual(float(psd.psd(0.0)), 0.0)

    def test_value_at_zero_two_dimensions(self):
        for beta in (0.5, 1.0, 2.0):
            psd = makeReservoir(beta=beta)
            np.testing.assert_allclose(psd.psdAtZero(), 2.0 * np.pi / beta, rtol=1e-14)
            # continuity through E = 0
            np.testing.assert_allclose(psd.psd(1e-7), psd.psdAtZero(), rtol=1e-5)

    def test_detailed_balance(self):
        energies = np.linspace(-3.0, 3.0, 50)
        for beta, d_res, profile in ((1.0, 2, Profile.GAUSSIAN), (2.0, 1, Profile.R_GAUSSIAN)):
            psd = makeReservoir(beta=beta, d_res=d_res, profile=profile)
            residual = detailedBalanceResidual(
                energies, psd.psd(energies), psd.psd(-energies), beta
            )
            self.assertLessEqual(np.max(residual), 1e-10)

    def test_correlation_symmetries(self):
        psd = makeReservoir(beta=1.5)
        t = np.linspace(-4.0, 4.0, 17)
        np.testing.assert_allclose(psd.correlation(-t), np.conj(psd.correlation(t)), atol=1e-13)
        # KMS: psi_hat(t + i beta) = psi_hat(-t)
        np.testing.assert_allclose(
            psd.correlation(t + 1.5j), psd.correlation(-t), rtol=1e-10, atol=1e-13
        )

    def test_correlation_outside_strip(self):
        psd = makeReservoir()
        with self.assertRaises(DomainError):
            psd.correlation(0.3 - 0.1j)
        with self.assertRaises(DomainError):
            psd.correlation(0.3 + 1.2j)

    def test_correlation_at_zero_oracle(self):
        for d_res in (2, 3):
            psd = makeReservoir(d_res=d_res)
            np.testing.assert_allclose(
                psd.correlation(0.0).real, correlationAtZeroOracle(psd), rtol=1e-8
            )
            self.assertLessEqual(abs(psd.correlation(0.0).imag), 1e-12)

    def test_psd_oracle(self):
        psd = makeReservoir()
        energies = np.linspace(-3.0, 3.0, 20)
        np.testing.assert_allclose(psdOracle(psd, energies), psd.psd(energies), rtol=1e-6, atol=1e-10)

    def test_rescaled(self):
        psd = makeReservoir()
        energies = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(psd.rescaled(2.0).psd(energies), 2.0 * psd.psd(energies), rtol=1e-14)
        with self.assertRaises(ConfigurationError):
            psd.rescaled(0.0)


class TestReservoirParameters(unittest.TestCase):
    def test_one_dimension_needs_vanishing_coupling(self):
        with self.assertRaises(AssumptionViolation):
            FormFactor(profile=Profile.GAUSSIAN, d_res=1)
        FormFactor(profile=Profile.R_GAUSSIAN, d_res=1)

    def test_cutoff_too_small(self):
        with self.assertRaises(ConfigurationError):
            makeReservoir(cutoff=3.0)

    def test_invalid_values(self):
        with self.assertRaises(ConfigurationError):
            makeReservoir(beta=0.0)
        with self.assertRaises(ConfigurationError):
            FormFactor(sigma=-1.0)
        with self.assertRaises(ConfigurationError):
            FormFactor(d_res=0)


class TestDecayCertificate(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.t_stop = decayWindow(cls.psd, 16.0)
        cls.C, cls.g_res = decayFit(cls.psd, 16.0, 32)

    def test_positive_rate(self):
        self.assertGreater(self.g_res, 0.0)
        self.assertGreaterEqual(self.C, abs(self.psd.correlation(0.0)))

    def test_window_ends_at_the_noise_floor(self):
        self.assertLess(self.t_stop, 16.0)
        floor = 1e-12 * abs(self.psd.correlation(0.0))
        self.assertGreaterEqual(abs(self.psd.correlation(self.t_stop)), floor)
        self.assertLess(abs(self.psd.correlation(self.t_stop + 0.05)), floor)

    def test_envelope(self):
        times = np.linspace(0.0, self.t_stop, 128)
        bound = self.C * np.exp(-self.g_res * times)
        self.assertTrue(np.all(np.abs(self.psd.correlation(times)) <= bound * (1.0 + 1e-12)))

    def test_doubling_t_max(self):
        _, doubled = decayFit(self.psd, 32.0, 32)
        self.assertLess(abs(doubled - self.g_res) / self.g_res, 0.1)

    def test_window_inside_gaussian_regime(self):
        # |psi_hat| is still far above the floor at t = 8
        with self.assertRaises(NumericalError):
            decayFit(makeReservoir(), 8.0, 32)

    def test_algebraic_decay_is_rejected(self):
        with self.assertRaises(NumericalError):
            decayFit(makeReservoir(d_res=3), 16.0, 32)

    def test_cached_on_the_reservoir(self):
        self.assertEqual(self.psd.certify(), self.psd.certify())
        self.assertEqual(self.psd.certify(), (self.C, self.g_res))

    def test_fit_window(self):
        with self.assertRaises(ConfigurationError):
            decayFit(self.psd, 1.0, 32)
        with self.assertRaises(ConfigurationError):
            decayFit(self.psd, 8.0, 4)
        with self.assertRaises(ConfigurationError):
            decayFit(makeReservoir(quad_nodes=16, cutoff=20.0), 16.0, 32)


class TestBosePoleDecay(unittest.TestCase):
    """Wide form factor: past t = 1 the decay is set by the first Bose pole at 2 pi / beta"""

    @classmethod
    def setUpClass(cls):
        cls.results = {}
        for beta in (1.0, 2.0):
            psd = makeReservoir(beta=beta, sigma=10.0, cutoff=70.0, quad_nodes=800)
            cls.results[beta] = (psd, decayFit(psd, 8.0, 32))

    def test_rate_near_the_bose_pole(self):
        for beta, (_, (_, g_res)) in self.results.items():
            pole = 2.0 * np.pi / beta
            self.assertGreater(g_res, pole / 3.0)
            self.assertLess(g_res, 3.0 * pole)

    def test_doubling_t_max(self):
        for psd, (_, g_res) in self.results.values():
            _, doubled = decayFit(psd, 16.0, 32)
            self.assertLess(abs(doubled - g_res) / g_res, 0.1)


if __name__ == "__main__":
    unittest.main()
