"""
Reservoir Commands
psd and correlation subcommands
"""

import numpy as np

from config.env import RunConfig
from log.logging import logger
from reservoir.certify import detailedBalanceResidual
from utils.factories import createSpectralDensity
from utils.output import writeCsv


PSD_GRID_POINTS = 50
PSD_ENERGY_MAX = 3.0
CORRELATION_POINTS = 81


def energyGrid() -> np.ndarray:
    """Symmetric grid without E = 0"""
    return np.linspace(-PSD_ENERGY_MAX, PSD_ENERGY_MAX, PSD_GRID_POINTS)


def runPsd(cfg: RunConfig, out_dir: str) -> None:
    psd = createSpectralDensity(cfg)
    energies = energyGrid()
    psi = psd.psd(energies)
    psi_neg = psd.psd(-energies)
    residual = detailedBalanceResidual(energies, psi, psi_neg, psd.beta)
    logger.info(f"Detailed balance residual over {energies.size} energies: {np.max(residual):.3e}")

    rows = [
        {"E": E, "psi": a, "psi_neg": b, "db_residual": r}
        for E, a, b, r in zip(energies, psi, psi_neg, residual)
    ]
    writeCsv(out_dir, "psd.csv", rows, ["E", "psi", "psi_neg", "db_residual"])


def runCorrelation(cfg: RunConfig, out_dir: str) -> None:
    psd = createSpectralDensity(cfg)
    C, g_res = psd.certify()
    times = np.linspace(0.0, psd.params.decay_t_max, CORRELATION_POINTS)
    values = psd.correlation(times)

    rows = [
        {"t": t, "re": v.real, "im": v.imag, "abs": abs(v)} for t, v in zip(times, values)
    ]
    writeCsv(out_dir, "correlation.csv", rows, ["t", "re", "im", "abs"])
    writeCsv(out_dir, "decay.csv", [{"C": C, "g_res": g_res}], ["C", "g_res"])
