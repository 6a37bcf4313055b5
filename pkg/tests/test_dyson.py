import unittest

import numpy as np
from scipy.linalg import expm

from classes.DispersionLaw import DispersionLaw
from classes.FiberOperator import PeriodicFiberBasis, PseudoResolventState
from classes.SpectralDensity import FormFactor, ReservoirParams, SpectralDensity
from classes.TorusGrid import TorusGrid
from dyson.mixing import mixingCheck, reducedEvolution
from dyson.propagators import (
    freeFiberPropagator,
    freeLiouvillianFiber,
    freeLiouvillianSuper,
    periodicHamiltonian,
    superOperatorFiber,
)
from dyson.resolvent import ladderLimitCheck, ladderTransfer, poleTrack, pseudoResolvent
from dyson.vertex import VertexTable, ladderVertex, literalLadderVertex, vertexN2Norm
from utils.errors import ConfigurationError, DomainError


def makeReservoir():
    return SpectralDensity(ReservoirParams(beta=1.0, form_factor=FormFactor()))


class TestFreeFiberDynamics(unittest.TestCase):
    def setUp(self):
        self.eps = DispersionLaw.laplacian(1)
        self.grid = TorusGrid(1, 16)

    def test_liouvillian_is_a_fiber_block(self):
        basis = PeriodicFiberBasis(1, 8)
        S = freeLiouvillianSuper(periodicHamiltonian(self.eps, basis))
        for m in (0, 1, 3):
            block = superOperatorFiber(S, basis, m)
            self.assertLessEqual(block.meta["leakage"], 1e-12)
            expected = freeLiouvillianFiber(basis.fiberMomentum(m), 1.0, None, self.eps, basis.grid)
            np.testing.assert_allclose(block.matrix, expected.matrix, atol=1e-12)

    def test_propagator_matches_generator(self):
        p = np.array([0.4])
        generator = freeLiouvillianFiber(p, 0.5, None, self.eps, self.grid).matrix
        propagator = freeFiberPropagator(p, 1.7, 0.5, None, self.eps, self.grid).matrix
        np.testing.assert_allclose(propagator, expm(1.7 * generator), atol=1e-12)

    def test_identity_and_group_property(self):
        p = np.array([0.4])
        np.testing.assert_allclose(
            freeFiberPropagator(p, 0.0, 0.5, None, self.eps, self.grid).matrix, np.eye(16), atol=1e-14
        )
        U = lambda t: freeFiberPropagator(p, t, 0.5, None, self.eps, self.grid).matrix
        np.testing.assert_allclose(U(1.1), U(0.4) @ U(0.7), atol=1e-12)

    def test_field_preserves_mass_at_zero_fiber(self):
        propagator = freeFiberPropagator(None, 2.0, 0.5, [0.3], self.eps, self.grid).matrix
        ones = np.ones(16)
        np.testing.assert_allclose(ones @ propagator, ones, atol=1e-12)
        np.testing.assert_allclose(propagator @ ones, ones, atol=1e-12)

    def test_negative_time(self):
        with self.assertRaises(ConfigurationError):
            freeFiberPropagator(None, -1.0, 0.5, None, self.eps, self.grid)


class TestLadderVertex(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.eps = DispersionLaw.laplacian(1)
        cls.basis = PeriodicFiberBasis(1, 8)

    def test_closed_form_matches_literal_sum(self):
        for m in (0, 1):
            literal = literalLadderVertex(self.basis, 0.7, 0.3, self.psd, self.eps, m)
            closed = ladderVertex(
                self.basis.fiberMomentum(m), 0.7, 0.3, None, self.psd, self.eps, self.basis.grid
            )
            scale = np.max(np.abs(closed.matrix))
            np.testing.assert_allclose(literal.matrix, closed.matrix, atol=1e-12 * scale)

    def test_annihilates_the_trace(self):
        grid = TorusGrid(1, 32)
        for t in (0.1, 1.0, 5.0):
            V = ladderVertex(None, t, 0.3, None, self.psd, self.eps, grid).matrix
            self.assertLessEqual(np.max(np.abs(np.ones(32) @ V)), 1e-12 * np.max(np.abs(V)))

    def test_coupling_squared(self):
        grid = TorusGrid(1, 32)
        small = ladderVertex(None, 1.0, 0.2, None, self.psd, self.eps, grid).matrix
        large = ladderVertex(None, 1.0, 0.4, None, self.psd, self.eps, grid).matrix
        np.testing.assert_allclose(large, 4.0 * small, rtol=1e-12, atol=1e-15)

    def test_decay_envelope(self):
        grid = TorusGrid(1, 16)
        _, g_res = self.psd.certify()
        lam = 0.3
        times = np.linspace(0.25, 12.0, 48)
        norms = np.array(
            [np.linalg.norm(ladderVertex(None, t, lam, None, self.psd, self.eps, grid).matrix, 2) for t in times]
        )
        scaled = norms * np.exp(g_res * times / 3.0) / lam**2
        # constant fitted on the early window bounds the late vertex
        envelope = np.max(scaled[times <= 4.0])
        self.assertTrue(np.all(scaled[times > 4.0] <= envelope))

    def test_positive_time(self):
        with self.assertRaises(ConfigurationError):
            ladderVertex(None, 0.0, 0.3, None, self.psd, self.eps, self.basis.grid)


class TestFourthOrderVertex(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.eps = DispersionLaw.laplacian(1)
        cls.basis = PeriodicFiberBasis(1, 8)
        cls.estimate, cls.stderr = vertexN2Norm(cls.basis, cls.psd, cls.eps, 1.0, 0.2)

    def test_deterministic(self):
        again = vertexN2Norm(self.basis, self.psd, self.eps, 1.0, 0.2)
        self.assertEqual(again, (self.estimate, self.stderr))

    def test_coupling_fourth_power(self):
        doubled, _ = vertexN2Norm(self.basis, self.psd, self.eps, 1.0, 0.4)
        np.testing.assert_allclose(doubled / self.estimate, 16.0, rtol=1e-10)

    def test_error_bar(self):
        self.assertGreater(self.estimate, 0.0)
        self.assertLessEqual(self.stderr, 0.3 * self.estimate)

    def test_zero_field_only(self):
        with self.assertRaises(ConfigurationError):
            vertexN2Norm(self.basis, self.psd, self.eps, 1.0, 0.2, field=[0.1])


class TestPseudoResolvent(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.eps = DispersionLaw.laplacian(1)
        cls.grid = TorusGrid(1, 32)
        cls.table = VertexTable(None, 0.3, None, cls.psd, cls.eps, cls.grid, 40.0, 1e-10)

    def test_transfer_scales_with_coupling(self):
        other = VertexTable(None, 0.15, None, self.psd, self.eps, self.grid, 40.0, 1e-10)
        np.testing.assert_allclose(
            self.table.transfer(0.0).matrix, 4.0 * other.transfer(0.0).matrix, rtol=1e-6, atol=1e-9
        )

    def test_ladder_transfer(self):
        transfer = ladderTransfer(self.table, 0.2)
        np.testing.assert_allclose(transfer.matrix, self.table.transfer(0.2).matrix)
        self.assertEqual(transfer.matrix.shape, (32, 32))

    def test_transfer_decays_in_z(self):
        self.assertLess(self.table.transfer(5.0).norm(), self.table.transfer(0.0).norm())

    def test_derivative(self):
        step = 1e-4
        forward = self.table.transfer(0.5 + step).matrix
        backward = self.table.transfer(0.5 - step).matrix
        difference = (forward - backward) / (2 * step)
        np.testing.assert_allclose(self.table.derivative(0.5), difference, rtol=1e-6, atol=1e-10)

    def test_argument_domain(self):
        with self.assertRaises(DomainError):
            self.table.transfer(-self.table.decay_rate)

    def test_short_cut_off(self):
        short = VertexTable(None, 0.3, None, self.psd, self.eps, self.grid, 1.0, 1e-10)
        with self.assertRaises(ConfigurationError):
            short.transfer(0.0)

    def test_truncation(self):
        state = pseudoResolvent(self.table, 0.1)
        self.assertEqual(state.truncation, 1)
        self.assertEqual(state.resolvent().shape, (32, 32))
        with self.assertRaises(ConfigurationError):
            pseudoResolvent(self.table, 0.1, truncation=2)
        with self.assertRaises(ConfigurationError):
            PseudoResolventState(0.1, state.S, truncation=3)


class TestPole(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.eps = DispersionLaw.laplacian(1)
        cls.grid = TorusGrid(1, 32)

    def test_pole_at_zero_momentum(self):
        pole = poleTrack(self.psd, self.eps, self.grid, [0.0], 0.3)
        self.assertLessEqual(abs(pole.u), 1e-10)
        self.assertLessEqual(pole.defect, 1e-6)
        self.assertLessEqual(pole.rank_one_difference, 1e-5)

    def test_pole_follows_kinetic_branch(self):
        pole = poleTrack(self.psd, self.eps, self.grid, [0.05], 0.1)
        self.assertLess(pole.u.real, 0.0)
        self.assertLessEqual(abs(pole.u / 0.1**2 - pole.kinetic_u), 0.25 * abs(pole.kinetic_u))

    def test_kinetic_consistency_is_second_order(self):
        lambdas = np.array([0.2, 0.1, 0.05])
        deviations = []
        for lam in lambdas:
            pole = poleTrack(self.psd, self.eps, self.grid, [0.05], lam)
            deviations.append(abs(pole.u / lam**2 - pole.kinetic_u))
        slope = np.polyfit(np.log(lambdas), np.log(deviations), 1)[0]
        self.assertGreaterEqual(slope, 1.7)

    def test_kappa_cap(self):
        with self.assertRaises(ConfigurationError):
            poleTrack(self.psd, self.eps, self.grid, [0.5], 0.3)

    def test_ladder_limit_slope(self):
        result = ladderLimitCheck(self.psd, self.eps, self.grid, [0.05], [0.3, 0.1, 0.03])
        self.assertEqual(len(result["rows"]), 3)
        self.assertLessEqual(abs(result["slope"] - 2.0), 0.3)
        with self.assertRaises(ConfigurationError):
            ladderLimitCheck(self.psd, self.eps, self.grid, [0.05], [0.3])


class TestReducedEvolution(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.psd = makeReservoir()
        cls.eps = DispersionLaw.laplacian(1)
        cls.grid = TorusGrid(1, 16)

    def test_trace_preserved(self):
        times, Z = reducedEvolution(None, 0.3, None, self.psd, self.eps, self.grid, 10.0)
        np.testing.assert_allclose(Z[0], np.eye(16))
        np.testing.assert_allclose(np.ones(16) @ Z[-1], np.ones(16), atol=1e-10)
        self.assertAlmostEqual(times[-1], 10.0)

    def test_invalid_steps(self):
        with self.assertRaises(ConfigurationError):
            reducedEvolution(None, 0.3, None, self.psd, self.eps, self.grid, 10.0, time_step=0.0)

    def test_mixing_rate(self):
        result = mixingCheck(self.psd, self.eps, self.grid, 0.3, [0.05])
        self.assertGreater(result["g_fit"], 0.0)
        self.assertGreater(result["gap"], 0.0)
        self.assertEqual(len(result["times"]), len(result["distances"]))


class TestWeakCouplingMixing(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        psd = makeReservoir()
        eps = DispersionLaw.laplacian(1)
        grid = TorusGrid(1, 16)
        cls.result = mixingCheck(psd, eps, grid, 0.1, [0.05])
        cls.doubled = mixingCheck(psd, eps, grid, 0.1, [0.05], T_cut=80.0)

    def test_rate_against_kinetic_gap(self):
        self.assertGreaterEqual(self.result["g_fit"], 0.5 * self.result["gap"])

    def test_memory_cut_off(self):
        change = abs(self.doubled["g_fit"] - self.result["g_fit"]) / self.result["g_fit"]
        self.assertLessEqual(change, 0.1)


if __name__ == "__main__":
    unittest.main()
