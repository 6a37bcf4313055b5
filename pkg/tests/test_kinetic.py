import unittest

import numpy as np

from classes.DispersionLaw import DispersionLaw
from classes.SpectralDensity import FormFactor, ReservoirParams, SpectralDensity
from classes.TorusGrid import TorusGrid
from kinetic.assembly import buildGenerator, flatRate, rateMatrix
from kinetic.spectrum import drift, evolve, relaxationRate, spectralGap, stationaryState
from kinetic.transport import (
    branchDerivatives,
    diffusionGk,
    diffusionTimeDomain,
    eigenBranch,
    einsteinResidual,
)
from utils.errors import ConfigurationError


def makeReservoir(beta=1.0):
    return SpectralDensity(ReservoirParams(beta=beta, form_factor=FormFactor()))


def makeGenerator(N=64, beta=1.0, psd=None, **kwargs):
    psd = psd or makeReservoir(beta)
    grid = TorusGrid(1, N)
    eps = DispersionLaw.laplacian(1)
    return buildGenerator(grid, rateMatrix(grid, psd, eps), eps, **kwargs)


class TestTorusGrid(unittest.TestCase):
    def test_trapezoid_exactness(self):
        self.assertLessEqual(TorusGrid(1, 64).quadratureDefect(63), 1e-12)
        self.assertLessEqual(TorusGrid(2, 8).quadratureDefect(7), 1e-12)
        with self.assertRaises(ConfigurationError):
            TorusGrid(1, 64).quadratureDefect(64)

    def test_invalid_sizes(self):
        for N in (2, 7):
            with self.assertRaises(ConfigurationError):
                TorusGrid(1, N)

    def test_reflection(self):
        grid = TorusGrid(2, 6)
        reflected = grid.points[grid.reflection]
        # -pi is its own mirror on the periodic grid
        difference = np.mod(reflected + grid.points + np.pi, 2.0 * np.pi) - np.pi
        np.testing.assert_allclose(difference, 0.0, atol=1e-12)


class TestRateMatrix(unittest.TestCase):
    def test_detailed_balance_conjugacy(self):
        grid, eps = TorusGrid(1, 64), DispersionLaw.laplacian(1)
        rate = rateMatrix(grid, makeReservoir(), eps)
        energies = eps.evaluate(grid.points)
        expected = np.exp(energies[None, :] - energies[:, None]) * rate
        np.testing.assert_allclose(rate.T, expected, rtol=1e-10)
        np.testing.assert_allclose(np.diag(rate), 2.0 * np.pi, rtol=1e-14)

    def test_shape_checks(self):
        grid, eps = TorusGrid(1, 16), DispersionLaw.laplacian(1)
        with self.assertRaises(ConfigurationError):
            buildGenerator(grid, np.ones((4, 4)), eps)
        with self.assertRaises(ConfigurationError):
            buildGenerator(TorusGrid(2, 4), np.ones((16, 16)), eps)
        with self.assertRaises(ConfigurationError):
            buildGenerator(grid, flatRate(grid, 1.0), eps, kappa=[0.5])
        with self.assertRaises(ConfigurationError):
            flatRate(grid, 0.0)


class TestEquilibriumGenerator(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gen = makeGenerator()
        cls.zeta = stationaryState(cls.gen)

    def test_conservation(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            self.assertLessEqual(self.gen.conservationDefect(rng.random(64)), 1e-12)

    def test_gibbs_state(self):
        gibbs = np.exp(-self.gen.energies)
        gibbs /= self.gen.grid.weight * np.sum(gibbs)
        np.testing.assert_allclose(self.zeta, gibbs, rtol=1e-8)
        residual = self.gen.matrix @ gibbs
        self.assertLessEqual(np.sqrt(self.gen.grid.weight * np.sum(residual**2)), 1e-8)

    def test_stationary_state_is_even(self):
        np.testing.assert_allclose(self.zeta[self.gen.grid.reflection], self.zeta, atol=1e-12)
        np.testing.assert_allclose(drift(self.gen), 0.0, atol=1e-12)

    def test_gap(self):
        self.assertGreater(spectralGap(self.gen), 0.0)

    def test_evolution_relaxes(self):
        k = self.gen.grid.points[:, 0]
        f0 = 1.0 + 0.5 * np.cos(k) + 0.3 * np.sin(k)
        f0 /= self.gen.grid.weight * np.sum(f0)
        late, method = evolve(self.gen, f0, 200.0)
        self.assertIn(method, ("eigen", "expm"))
        np.testing.assert_allclose(late, self.zeta, atol=1e-8)
        gap = spectralGap(self.gen)
        _, rate = relaxationRate(self.gen, f0, np.linspace(0.0, 10.0 / gap, 41))
        self.assertGreaterEqual(rate / gap, 0.9)
        with self.assertRaises(ConfigurationError):
            evolve(self.gen, f0, -1.0)


class TestFlatRate(unittest.TestCase):
    """Constant rate c: gap 2 pi c, uniform stationary state, D = 1 / (pi c)"""

    @classmethod
    def setUpClass(cls):
        grid = TorusGrid(1, 32)
        cls.c = 0.5
        cls.gen = buildGenerator(grid, flatRate(grid, cls.c), DispersionLaw.laplacian(1))

    def test_gap(self):
        np.testing.assert_allclose(spectralGap(self.gen), 2.0 * np.pi * self.c, rtol=1e-10)

    def test_uniform_state(self):
        np.testing.assert_allclose(stationaryState(self.gen), 1.0 / (2.0 * np.pi), rtol=1e-12)

    def test_diffusion(self):
        np.testing.assert_allclose(diffusionGk(self.gen)[0, 0], 1.0 / (np.pi * self.c), rtol=1e-10)


class TestDrift(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gen = makeGenerator()

    def test_drift_follows_the_field(self):
        forward = drift(self.gen.withField([0.05]))
        backward = drift(self.gen.withField([-0.05]))
        self.assertGreater(forward[0], 0.0)
        np.testing.assert_allclose(backward, -forward, rtol=1e-8, atol=1e-14)

    def test_stationary_state_needs_real_generator(self):
        with self.assertRaises(ConfigurationError):
            stationaryState(self.gen.withKappa([0.1]))

    def test_stationary_state_is_the_long_time_limit(self):
        driven = self.gen.withField([0.05])
        zeta = stationaryState(driven)
        k = driven.grid.points[:, 0]
        f0 = 1.0 + 0.5 * np.cos(k) + 0.3 * np.sin(k)
        f0 /= driven.grid.weight * np.sum(f0)
        late, _ = evolve(driven, f0, 200.0)
        np.testing.assert_allclose(late, zeta, atol=1e-6)


class TestTransport(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gen = makeGenerator(N=128)
        cls.D = diffusionGk(cls.gen)

    def test_two_routes(self):
        D_branch = branchDerivatives(self.gen, 1e-2)["D"]
        np.testing.assert_allclose(D_branch, self.D, rtol=1e-4)

    def test_time_domain(self):
        np.testing.assert_allclose(diffusionTimeDomain(self.gen), self.D, rtol=1e-5)

    def test_einstein_relation(self):
        result = einsteinResidual(self.gen, 1.0, 1e-3)
        self.assertLessEqual(result["residual"], 1e-3)
        self.assertGreater(result["betaD"][0, 0], 0.0)

    def test_einstein_relation_at_lower_temperature(self):
        cold = makeGenerator(N=128, beta=2.0)
        result = einsteinResidual(cold, 2.0, 1e-3)
        self.assertLessEqual(result["residual"], 1e-3)

    def test_einstein_invariant_under_rescaling(self):
        psd = makeReservoir()
        baseline = einsteinResidual(self.gen, 1.0, 1e-3)["residual"]
        scaled = einsteinResidual(makeGenerator(N=128, psd=psd.rescaled(2.0)), 1.0, 1e-3)["residual"]
        self.assertLessEqual(abs(scaled - baseline), 1e-10)

    def test_equilibrium_required(self):
        with self.assertRaises(ConfigurationError):
            diffusionGk(self.gen.withField([0.05]))
        with self.assertRaises(ConfigurationError):
            einsteinResidual(self.gen.withKappa([0.05]), 1.0)


class TestEigenBranch(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gen = makeGenerator()
        cls.kappas = np.linspace(-0.2, 0.2, 9)
        cls.branch = eigenBranch(cls.gen, cls.kappas)

    def test_through_zero(self):
        self.assertLessEqual(abs(self.branch.at(0.0)), 1e-10)

    def test_conjugate_symmetry(self):
        np.testing.assert_allclose(
            self.branch.eigenvalues[::-1], np.conj(self.branch.eigenvalues), atol=1e-10
        )

    def test_quadratic_decay(self):
        D = diffusionGk(self.gen)[0, 0]
        u = self.branch.at(0.05)
        np.testing.assert_allclose(-u.real / 0.05**2, D, rtol=0.01)

    def test_normalisation(self):
        grid = self.gen.grid
        np.testing.assert_allclose(grid.weight * np.sum(self.branch.right, axis=1), 1.0, rtol=1e-10)
        pairing = np.sum(np.conj(self.branch.left) * self.branch.right, axis=1)
        np.testing.assert_allclose(pairing, 1.0, rtol=1e-10)

    def test_path_checks(self):
        with self.assertRaises(ConfigurationError):
            eigenBranch(self.gen, [-0.3, 0.0, 0.3])
        with self.assertRaises(ConfigurationError):
            eigenBranch(self.gen, [0.1, 0.2])


class TestGridRefinement(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        psd = makeReservoir()
        cls.coarse = makeGenerator(N=64, psd=psd)
        cls.fine = makeGenerator(N=128, psd=psd)

    def test_gap_converges(self):
        coarse = spectralGap(self.coarse)
        fine = spectralGap(self.fine)
        self.assertLessEqual(abs(fine - coarse) / fine, 0.05)

    def test_drift_converges(self):
        coarse = drift(self.coarse.withField([0.05]))
        fine = drift(self.fine.withField([0.05]))
        self.assertLessEqual(abs(fine[0] - coarse[0]) / abs(fine[0]), 1e-6)

    def test_diffusion_converges(self):
        coarse = diffusionGk(self.coarse)[0, 0]
        fine = diffusionGk(self.fine)[0, 0]
        self.assertLessEqual(abs(fine - coarse) / fine, 1e-6)


class TestTwoDimensionalGibbs(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        grid = TorusGrid(2, 32)
        eps = DispersionLaw.laplacian(2)
        cls.gen = buildGenerator(grid, rateMatrix(grid, makeReservoir(), eps), eps)

    def test_gibbs_is_stationary(self):
        gibbs = np.exp(-self.gen.energies)
        gibbs /= self.gen.grid.weight * np.sum(gibbs)
        residual = self.gen.matrix @ gibbs
        self.assertLessEqual(np.sqrt(self.gen.grid.weight * np.sum(residual**2)), 1e-7)
        np.testing.assert_allclose(stationaryState(self.gen), gibbs, rtol=1e-7)

    def test_conservation(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            self.assertLessEqual(self.gen.conservationDefect(rng.random(self.gen.grid.size)), 1e-12)


if __name__ == "__main__":
    unittest.main()
