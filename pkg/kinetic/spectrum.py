"""
Kinetic Spectrum
Stationary state, spectral gap, drift, semigroup evolution and relaxation rate
"""

from typing import Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, expm, solve

from classes.KineticGenerator import KineticGenerator
from constants.defaults import TOLERANCES
from log.logging import logger
from utils.errors import AssumptionViolation, ConfigurationError, NumericalError


def _otherEigenvalues(gen: KineticGenerator, predictor: complex) -> np.ndarray:
    values = gen.eigenvalues
    branch = int(np.argmin(np.abs(values - predictor)))
    return np.delete(values, branch)


def stationaryState(gen: KineticGenerator) -> np.ndarray:
    """
    Null vector of M^{0,F} normalised by w sum zeta = 1.

    Row 0 of M is replaced by the normalisation functional; the rows of M
    are dependent because 1^T M = 0.
    """
    if not gen.isReal:
        raise ConfigurationError("Stationary state needs kappa = 0")

    grid = gen.grid
    bordered = np.array(gen.matrix, dtype=float, copy=True)
    bordered[0, :] = grid.weight
    rhs = np.zeros(grid.size)
    rhs[0] = 1.0
    try:
        zeta = solve(bordered, rhs)
    except LinAlgError as e:
        logger.error(f"Bordered stationary solve failed: {e}")
        raise NumericalError("Stationary state solve is singular") from e

    others = _otherEigenvalues(gen, 0.0)
    gap_estimate = float(-np.max(others.real))
    if gap_estimate <= TOLERANCES.gap_floor:
        logger.error(f"Degenerate null space, gap estimate {gap_estimate:.3g}")
        raise NumericalError(
            "Zero is not a simple eigenvalue of the generator",
            details={"gap_estimate": gap_estimate},
        )
    if np.min(zeta) < TOLERANCES.stationary_floor:
        raise NumericalError(
            "Stationary state has negative entries",
            details={"min_zeta": float(np.min(zeta))},
        )
    return zeta


def spectralGap(gen: KineticGenerator, predictor: complex = 0.0) -> float:
    """g = -max Re of the spectrum without the branch eigenvalue nearest `predictor`"""
    others = _otherEigenvalues(gen, predictor)
    gap = float(-np.max(others.real))
    if gap <= 0:
        logger.error(f"Non-positive spectral gap {gap:.6g}")
        raise AssumptionViolation(
            "Spectral gap is not positive", details={"gap": gap, "N": gen.grid.N}
        )
    return gap


def drift(gen: KineticGenerator) -> np.ndarray:
    """v^j = sum_k w d_j eps(k) zeta(k)"""
    zeta = stationaryState(gen)
    return gen.grid.weight * (gen.velocity.T @ zeta)


def evolve(
    gen: KineticGenerator, f0: np.ndarray, times: Union[float, np.ndarray]
) -> Tuple[np.ndarray, str]:
    """
    e^{tM} f0 for one time or an array of times; returns (values, method).

    The eigenbasis is used when M V = V diag(mu) holds to 1e-8 relative and
    V is well conditioned, otherwise scipy's scaling-and-squaring expm.
    """
    scalar = np.ndim(times) == 0
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ConfigurationError("Evolution times must be non-negative")

    M = gen.matrix
    values, vectors = gen.eigenDecomposition
    residual = np.linalg.norm(M @ vectors - vectors * values) / max(np.linalg.norm(M), 1.0)
    condition = np.linalg.cond(vectors)

    if residual <= TOLERANCES.eigen_residual and condition < 1e8:
        method = "eigen"
        coefficients = solve(vectors, f0.astype(complex))
        result = (vectors @ (np.exp(np.outer(values, times)) * coefficients[:, None])).T
    else:
        method = "expm"
        logger.warning(
            f"Eigenbasis unusable (residual {residual:.2e}, cond {condition:.2e}); using expm"
        )
        result = np.array([expm(t * M) @ f0 for t in times])

    if gen.isReal and np.isrealobj(f0):
        result = result.real
    return (result[0] if scalar else result), method


def relaxationRate(
    gen: KineticGenerator,
    f0: np.ndarray,
    times: np.ndarray,
    weighted: bool = True,
) -> Tuple[float, float]:
    """
    Fit ||e^{tM} f0 - zeta <1, f0>|| ~ C e^{-g t} over `times`.

    With `weighted` the norm carries the weight 1/zeta, in which M^{0,0} is
    self-adjoint.
    """
    zeta = stationaryState(gen)
    mass = gen.grid.weight * np.sum(f0)
    states, _ = evolve(gen, f0, times)
    deviations = states - zeta[None, :] * mass
    if weighted:
        norms = np.sqrt(gen.grid.weight * np.sum(np.abs(deviations) ** 2 / zeta[None, :], axis=1))
    else:
        norms = np.sqrt(gen.grid.weight * np.sum(np.abs(deviations) ** 2, axis=1))

    keep = norms > TOLERANCES.noise_floor * max(norms[0], 1e-300)
    if np.count_nonzero(keep) < 3:
        raise NumericalError("Relaxation fit has fewer than three usable samples")
    slope, intercept = np.polyfit(np.asarray(times)[keep], np.log(norms[keep]), 1)
    return float(np.exp(intercept)), float(-slope)
