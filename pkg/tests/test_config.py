import os
import tempfile
import unittest

import numpy as np

from config.env import RunConfig
from constants.defaults import DEFAULT_CONFIG, PairOrder
from log.logging import NOTE_LEVEL, logger
from utils.errors import ConfigurationError, DomainError, NumericalError, exitCodeFor
from utils.factories import (
    createDispersion,
    createFiberGrid,
    createGenerator,
    createSpectralDensity,
    pairOrder,
)


class TestRunConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def writeConfig(self, text: str) -> str:
        path = os.path.join(self.tmp.name, "run.cfg")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        return path

    def test_defaults(self):
        cfg = RunConfig()
        self.assertEqual(cfg.getAllVars(), DEFAULT_CONFIG)
        self.assertEqual(cfg.source, "defaults")
        self.assertEqual(cfg.getInt("kinetic.N"), 128)
        self.assertEqual(cfg.getFloatList("dyson.lambdas"), [0.3, 0.1, 0.03])

    def test_file_then_overrides(self):
        path = self.writeConfig("reservoir.beta=2.5\nkinetic.N=64\n# comment\n")
        cfg = RunConfig(path, ["kinetic.N=32"])
        self.assertEqual(cfg.getFloat("reservoir.beta"), 2.5)
        self.assertEqual(cfg.getInt("kinetic.N"), 32)
        self.assertEqual(cfg.source, path)

    def test_unknown_key_in_file(self):
        path = self.writeConfig("reservoir.temperature=3\n")
        with self.assertRaises(ConfigurationError):
            RunConfig(path)

    def test_retired_key_is_ignored(self):
        path = self.writeConfig("dyson.bromwich_nodes=64\ndyson.T_cut=20\n")
        with self.assertLogs(logger, level="WARNING") as captured:
            cfg = RunConfig(path, ["dyson.bromwich_nodes=128"])
        self.assertEqual(sum("dyson.bromwich_nodes" in line for line in captured.output), 2)
        self.assertNotIn("dyson.bromwich_nodes", cfg.getAllVars())
        self.assertEqual(cfg.getFloat("dyson.T_cut"), 20.0)
        with self.assertRaises(ConfigurationError):
            cfg.getStr("dyson.bromwich_nodes")

    def test_file_load_is_noted(self):
        path = self.writeConfig("kinetic.N=64\n")
        with self.assertLogs(logger, level=NOTE_LEVEL) as captured:
            RunConfig(path)
        self.assertEqual([record.levelname for record in captured.records], ["NOTE"])

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(os.path.join(self.tmp.name, "absent.cfg"))

    def test_bad_overrides(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(None, ["kinetic.N"])
        with self.assertRaises(ConfigurationError):
            RunConfig(None, ["kinetic.nodes=12"])

    def test_typed_getters(self):
        cfg = RunConfig(None, ["kinetic.N=many", "kinetic.betas=1,x"])
        with self.assertRaises(ConfigurationError):
            cfg.getInt("kinetic.N")
        with self.assertRaises(ConfigurationError):
            cfg.getFloatList("kinetic.betas")

    def test_vector_padding(self):
        cfg = RunConfig(None, ["kinetic.field=0.1"])
        np.testing.assert_array_equal(cfg.getVector("kinetic.field", 3), [0.1, 0.0, 0.0])
        cfg.setVar("kinetic.field", "0.1,0.2")
        np.testing.assert_array_equal(cfg.getVector("kinetic.field", 2), [0.1, 0.2])
        with self.assertRaises(ConfigurationError):
            cfg.getVector("kinetic.field", 3)

    def test_resolved_text_sorted(self):
        lines = RunConfig().resolvedText().splitlines()
        self.assertEqual(lines, sorted(lines))
        self.assertEqual(len(lines), len(DEFAULT_CONFIG))
        self.assertIn("run.seed=0", lines)


class TestFactories(unittest.TestCase):
    def test_spectral_density(self):
        cfg = RunConfig(None, ["reservoir.beta=2"])
        self.assertEqual(createSpectralDensity(cfg).beta, 2.0)
        self.assertEqual(createSpectralDensity(cfg, beta=0.5, d_res=3).d_res, 3)

    def test_unknown_enum_values(self):
        with self.assertRaises(ConfigurationError):
            createSpectralDensity(RunConfig(None, ["reservoir.profile=lorentzian"]))
        with self.assertRaises(ConfigurationError):
            createDispersion(RunConfig(None, ["dispersion.kind=graphene"]))
        with self.assertRaises(ConfigurationError):
            pairOrder(RunConfig(None, ["diagrams.pair_order=random"]))

    def test_pair_order(self):
        self.assertIs(pairOrder(RunConfig()), PairOrder.PRINTED)
        self.assertIs(
            pairOrder(RunConfig(None, ["diagrams.pair_order=TIME_ORDERED"])),
            PairOrder.TIME_ORDERED,
        )

    def test_custom_dispersion(self):
        cfg = RunConfig(None, ["dispersion.kind=custom", "dispersion.coeffs=0:2;1:-1;-1:-1"])
        k = np.linspace(-np.pi, np.pi, 7)[:, None]
        np.testing.assert_allclose(createDispersion(cfg).evaluate(k), 2.0 - 2.0 * np.cos(k[:, 0]))

    def test_fiber_grid(self):
        grid = createFiberGrid(RunConfig(None, ["dyson.L=16"]))
        self.assertEqual(grid.size, 16)

    def test_generator_field_cap(self):
        cfg = RunConfig(None, ["kinetic.N=16"])
        psd, eps = createSpectralDensity(cfg), createDispersion(cfg)
        with self.assertRaises(ConfigurationError):
            createGenerator(cfg, psd, eps, field=np.array([0.5]))


class TestExitCodes(unittest.TestCase):
    def test_mapping(self):
        self.assertEqual(exitCodeFor(ConfigurationError("x")), 2)
        self.assertEqual(exitCodeFor(DomainError("x")), 2)
        self.assertEqual(exitCodeFor(NumericalError("x")), 3)
        self.assertEqual(exitCodeFor(ValueError("x")), 1)


if __name__ == "__main__":
    unittest.main()
