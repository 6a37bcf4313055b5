"""
Kinetic Assembly
Rate matrix r(k, k') = psi(eps(k') - eps(k)) and generator construction
"""

from typing import Optional

import numpy as np

from classes.DispersionLaw import DispersionLaw
from classes.KineticGenerator import KineticGenerator
from classes.SpectralDensity import SpectralDensity
from classes.TorusGrid import TorusGrid
from log.logging import logger
from utils.errors import ConfigurationError


def rateMatrix(grid: TorusGrid, psd: SpectralDensity, eps: DispersionLaw) -> np.ndarray:
    """R[a, b] = psi(eps_b - eps_a); the reservoir must pass its decay certificate"""
    if eps.d != grid.d:
        raise ConfigurationError(
            f"Dispersion dimension {eps.d} does not match grid dimension {grid.d}"
        )
    psd.certify()
    energies = eps.evaluate(grid.points)
    rate = psd.psd(energies[None, :] - energies[:, None])
    logger.debug(f"Rate matrix on {grid.size} nodes, max entry {np.max(rate):.6g}")
    return rate


def flatRate(grid: TorusGrid, c: float) -> np.ndarray:
    """Constant rate R = c, used as an analytic test generator"""
    if c <= 0:
        raise ConfigurationError(f"Flat rate must be positive: {c}")
    return np.full((grid.size, grid.size), float(c))


def buildGenerator(
    grid: TorusGrid,
    rate: np.ndarray,
    eps: DispersionLaw,
    kappa=None,
    field=None,
    kappa_cap: Optional[float] = 0.2,
    field_cap: Optional[float] = 0.2,
) -> KineticGenerator:
    """
    Assemble M^{kappa,F} = i kappa.grad(eps) - F.grad + G + L on the grid
    """
    if rate.shape != (grid.size, grid.size):
        raise ConfigurationError(
            f"Rate matrix shape {rate.shape} does not match grid size {grid.size}",
            details={"grid_size": grid.size},
        )
    if eps.d != grid.d:
        raise ConfigurationError(
            f"Dispersion dimension {eps.d} does not match grid dimension {grid.d}"
        )

    kappa = np.zeros(grid.d) if kappa is None else np.asarray(kappa, dtype=complex).reshape(-1)
    field = np.zeros(grid.d) if field is None else np.asarray(field, dtype=float).reshape(-1)
    if kappa.shape != (grid.d,) or field.shape != (grid.d,):
        raise ConfigurationError(f"kappa and field need {grid.d} components")
    if kappa_cap is not None and np.linalg.norm(kappa) > kappa_cap + 1e-15:
        raise ConfigurationError(
            f"|kappa| = {np.linalg.norm(kappa):.3g} exceeds the cap {kappa_cap}"
        )
    if field_cap is not None and np.linalg.norm(field) > field_cap + 1e-15:
        raise ConfigurationError(
            f"|F| = {np.linalg.norm(field):.3g} exceeds the cap {field_cap}"
        )

    energies = eps.evaluate(grid.points)
    velocity = eps.gradient(grid.points).real
    return KineticGenerator(grid, rate, energies, velocity, kappa, field)
