import unittest

import numpy as np
from scipy.integrate import quad

from classes.DispersionLaw import DispersionLaw
from classes.FiniteHamiltonian import FiniteHamiltonian
from constants.defaults import DispersionKind
from lattice.propagation import (
    besselKernel,
    blochPeriod,
    blochSummary,
    blochTrace,
    combesThomasFit,
)
from utils.errors import ConfigurationError, DomainError


class TestDispersionLaw(unittest.TestCase):
    def setUp(self):
        self.eps = DispersionLaw.laplacian(1)

    def test_laplacian_values(self):
        k = np.array([[0.0], [np.pi / 2], [np.pi]])
        np.testing.assert_allclose(self.eps.evaluate(k), [0.0, 2.0, 4.0], atol=1e-14)

    def test_velocity_symbol(self):
        k = np.linspace(-np.pi, np.pi, 13)[:, None]
        np.testing.assert_allclose(self.eps.velocitySymbol(k, 0), 2.0 * np.sin(k[:, 0]), atol=1e-14)
        with self.assertRaises(ConfigurationError):
            self.eps.velocitySymbol(k, 1)

    def test_complex_momenta(self):
        k = np.array([[0.3 + 0.4j]])
        np.testing.assert_allclose(self.eps.evaluate(k), 2.0 - 2.0 * np.cos(0.3 + 0.4j), rtol=1e-14)

    def test_integrated_along_field(self):
        q, f, t = np.array([[0.3]]), np.array([0.7]), np.array([1.3])
        expected, _ = quad(lambda s: float(self.eps.evaluate(q + f * s)[0]), 0.0, 1.3)
        np.testing.assert_allclose(self.eps.integratedAlong(q, f, t)[0, 0], expected, rtol=1e-12)
        np.testing.assert_allclose(
            self.eps.integratedAlong(q, np.zeros(1), t)[0, 0], 1.3 * self.eps.evaluate(q)[0], rtol=1e-14
        )

    def test_imaginary_part_sup(self):
        np.testing.assert_allclose(self.eps.imaginaryPartSup(0.5), 2.0 * np.sinh(0.5), rtol=1e-12)
        with self.assertRaises(DomainError):
            self.eps.imaginaryPartSup(3.0)
        with self.assertRaises(DomainError):
            self.eps.imaginaryPartSup(0.0)

    def test_from_string(self):
        custom = DispersionLaw.create(DispersionKind.CUSTOM, 1, "0:2; 1:-1; -1:-1")
        self.assertEqual(custom.coeffs, self.eps.coeffs)
        with self.assertRaises(ConfigurationError):
            DispersionLaw.fromString("1-1", 1)
        with self.assertRaises(ConfigurationError):
            DispersionLaw.fromString("", 1)

    def test_rejects_odd_coefficients(self):
        with self.assertRaises(ConfigurationError):
            DispersionLaw({(0,): 1.0, (1,): -1.0}, 1)

    def test_rejects_degenerate_dispersion(self):
        # hopping along the first axis only leaves grad eps orthogonal to e_2
        with self.assertRaises(ConfigurationError):
            DispersionLaw({(0, 0): 2.0, (1, 0): -1.0, (-1, 0): -1.0}, 2)
        DispersionLaw.laplacian(2)


class TestFiniteHamiltonian(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.free = FiniteHamiltonian(DispersionLaw.laplacian(1), 201, 0.5, np.zeros(1))

    def test_bessel_oracle(self):
        U = self.free.propagator(3.0)
        expected = np.array([besselKernel(100, x, 3.0) for x in range(90, 111)])
        np.testing.assert_allclose(U[100, 90:111], expected, atol=1e-8)

    def test_unitarity_and_group_property(self):
        h = FiniteHamiltonian(DispersionLaw.laplacian(1), 40, 0.5, np.array([0.8]))
        self.assertLessEqual(h.unitarityError(1.7), 1e-12)
        self.assertLessEqual(h.groupError(0.6, 1.1), 1e-12)

    def test_invalid_box(self):
        with self.assertRaises(ConfigurationError):
            FiniteHamiltonian(DispersionLaw.laplacian(1), 1, 0.5, np.zeros(1))
        with self.assertRaises(ConfigurationError):
            FiniteHamiltonian(DispersionLaw.laplacian(1), 10, 0.5, np.zeros(2))

    def test_site_index(self):
        h = FiniteHamiltonian(DispersionLaw.laplacian(2), 5, 0.5, np.zeros(2))
        self.assertEqual(h.siteIndex([2, 3]), 13)
        np.testing.assert_array_equal(h.sites[13], [2, 3])


class TestCombesThomas(unittest.TestCase):
    def setUp(self):
        self.h = FiniteHamiltonian(DispersionLaw.laplacian(1), 60, 0.5, np.array([0.8]))

    def test_certificate_is_stable(self):
        C, C_doubled, ok = combesThomasFit(self.h, 2.0, 0.5)
        self.assertTrue(ok)
        self.assertTrue(np.isfinite(C))
        self.assertLessEqual(abs(C_doubled - C), 0.05 * max(C, C_doubled))

    def test_identity_at_time_zero(self):
        C, C_doubled, ok = combesThomasFit(self.h, 0.0, 0.5)
        np.testing.assert_allclose([C, C_doubled], [1.0, 1.0], rtol=1e-12)
        self.assertTrue(ok)

    def test_nu_outside_strip(self):
        with self.assertRaises(DomainError):
            combesThomasFit(self.h, 1.0, 3.0)


class TestBlochOscillation(unittest.TestCase):
    def test_period(self):
        h = FiniteHamiltonian(DispersionLaw.laplacian(1), 101, 0.5, np.array([0.8]))
        times = np.linspace(0.0, 100.0, 2001)
        summary = blochSummary(h, times)
        np.testing.assert_allclose(summary["expected_period"], 2.0 * np.pi / 0.2)
        np.testing.assert_allclose(summary["period"], summary["expected_period"], rtol=0.02)

    def test_no_field_no_motion(self):
        h = FiniteHamiltonian(DispersionLaw.laplacian(1), 101, 0.5, np.zeros(1))
        times = np.linspace(0.0, 20.0, 201)
        trace = blochTrace(h, times)
        np.testing.assert_allclose(trace, 0.0, atol=1e-9)

    def test_period_of_a_sinusoid(self):
        times = np.linspace(0.0, 50.0, 5001)
        np.testing.assert_allclose(blochPeriod(times, np.sin(2.0 * np.pi * times / 7.0)), 7.0, rtol=1e-4)
        self.assertTrue(np.isnan(blochPeriod(times, np.zeros_like(times))))


if __name__ == "__main__":
    unittest.main()
