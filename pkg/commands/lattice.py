"""
Lattice Commands
combes-thomas and bloch subcommands
"""

import numpy as np

from config.env import RunConfig
from lattice.propagation import blochSummary, blochTrace, combesThomasFit
from log.logging import logger
from utils.factories import createHamiltonian
from utils.output import writeCsv


def runCombesThomas(cfg: RunConfig, out_dir: str) -> None:
    h = createHamiltonian(cfg)
    nu = cfg.getFloat("lattice.nu")
    times = cfg.getFloatList("lattice.times")
    origin = h.siteIndex(np.rint(h.center).astype(int))

    certificates = []
    kernels = []
    for t in times:
        C, C_doubled, ok = combesThomasFit(h, t, nu)
        certificates.append({"t": t, "nu": nu, "C": C, "C_doubled": C_doubled, "ok": ok})
        row = h.propagator(t)[origin]
        for xprime, value in enumerate(row):
            kernels.append(
                {"t": t, "x": origin, "xprime": xprime, "re": value.real, "im": value.imag, "abs": abs(value)}
            )

    writeCsv(out_dir, "combes_thomas.csv", certificates, ["t", "nu", "C", "C_doubled", "ok"])
    writeCsv(out_dir, "propagator.csv", kernels, ["t", "x", "xprime", "re", "im", "abs"])


def runBloch(cfg: RunConfig, out_dir: str) -> None:
    h = createHamiltonian(cfg)
    times = np.linspace(0.0, cfg.getFloat("lattice.bloch_t_max"), cfg.getInt("lattice.bloch_samples"))
    trace = blochTrace(h, times)[:, 0]
    summary = blochSummary(h, times)
    logger.info(
        f"Bloch period {summary['period']:.4f} (expected {summary['expected_period']:.4f}), "
        f"amplitude {summary['amplitude']:.3f}"
    )
    rows = [{"t": t, "x_mean": x} for t, x in zip(times, trace)]
    writeCsv(out_dir, "bloch.csv", rows, ["t", "x_mean"])
