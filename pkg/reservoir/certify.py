"""
Reservoir Certificates
Exponential decay fit of the correlation function and independent oracles for psi and psi_hat(0)
"""

from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad

from classes.SpectralDensity import SpectralDensity
from constants.defaults import ORACLE, TOLERANCES, OracleSettings
from log.logging import logger
from utils.errors import AssumptionViolation, ConfigurationError, NumericalError
from utils.spectral import richardson

# fit windows start past the short-time transient
DECAY_FIT_START = 1.0
DECAY_SCAN_STEP = 0.05
DECAY_STABILITY = 0.10


def decayWindow(psd: SpectralDensity, t_max: float) -> float:
    """
    End of the fit window: the last scan point before |psi_hat| first drops
    below the noise floor, capped by t_max and by the time the radial rule
    still resolves.
    """
    limit = min(t_max, psd.resolvedTime)
    if limit <= DECAY_FIT_START + 2 * DECAY_SCAN_STEP:
        raise ConfigurationError(
            "Radial quadrature does not resolve the decay window",
            details={"t_max": t_max, "resolved_time": psd.resolvedTime},
        )
    scan = np.arange(DECAY_FIT_START, limit + 0.5 * DECAY_SCAN_STEP, DECAY_SCAN_STEP)
    floor = TOLERANCES.noise_floor * abs(complex(psd.correlation(0.0)))
    below = np.flatnonzero(np.abs(psd.correlation(scan)) < floor)
    if below.size == 0:
        return float(limit)
    if below[0] < 2:
        logger.error("Correlation function vanishes on the fit window")
        raise AssumptionViolation(
            "Too few correlation samples above the noise floor",
            details={"t_floor": float(scan[below[0]])},
        )
    return float(scan[below[0] - 1])


def _fitRate(psd: SpectralDensity, t_stop: float, n_samples: int) -> float:
    at_zero = abs(complex(psd.correlation(0.0)))
    times = np.linspace(DECAY_FIT_START, t_stop, n_samples)
    magnitudes = np.abs(psd.correlation(times))
    keep = magnitudes >= TOLERANCES.noise_floor * at_zero
    if np.count_nonzero(keep) < n_samples:
        logger.warning(
            f"Dropped {n_samples - np.count_nonzero(keep)} correlation samples below the noise floor"
        )
    if np.count_nonzero(keep) < 3:
        logger.error("Correlation function vanishes on the fit window")
        raise AssumptionViolation(
            "Too few correlation samples above the noise floor",
            details={"kept": int(np.count_nonzero(keep))},
        )
    slope, _ = np.polyfit(times[keep], np.log(magnitudes[keep]), 1)
    return float(-slope)


def decayFit(psd: SpectralDensity, t_max: float, n_samples: int) -> Tuple[float, float]:
    """
    Least squares fit of log|psi_hat(t)| ~ log C - g t over [1, t_stop].

    t_stop is `decayWindow(psd, t_max)`, so samples under the noise floor or
    past the resolved time never enter the fit. The rate is refitted with
    2 t_max and must move by less than 10%. C is returned as an envelope: the
    largest |psi_hat(t)| e^(g t) seen on [0, t_stop].
    """
    if t_max <= DECAY_FIT_START or n_samples < 8:
        raise ConfigurationError(
            "Decay fit needs t_max > 1 and at least 8 samples",
            details={"t_max": t_max, "n_samples": n_samples},
        )

    t_stop = decayWindow(psd, t_max)
    g_res = _fitRate(psd, t_stop, n_samples)
    if not g_res > 0:
        logger.error(f"Non-positive reservoir decay rate {g_res:.6g}")
        raise AssumptionViolation(
            "Reservoir correlation does not decay exponentially",
            details={"g_res": g_res, "t_max": t_max},
        )

    t_stop_doubled = decayWindow(psd, 2.0 * t_max)
    if t_stop_doubled != t_stop:
        g_doubled = _fitRate(psd, t_stop_doubled, n_samples)
        drift = abs(g_doubled - g_res) / g_res
        logger.debug(f"Decay rate {g_res:.6g} at t_max={t_max:g}, {g_doubled:.6g} at {2.0 * t_max:g}")
        if drift >= DECAY_STABILITY:
            logger.error(f"Fitted decay rate moved by {drift:.1%} when t_max doubled")
            raise AssumptionViolation(
                "Reservoir decay rate depends on the fit window",
                details={"g_res": g_res, "g_doubled": g_doubled, "t_max": t_max},
            )

    envelope_times = np.linspace(0.0, t_stop, 4 * n_samples)
    envelope = np.abs(psd.correlation(envelope_times)) * np.exp(g_res * envelope_times)
    C = float(np.max(envelope))
    logger.success(f"Reservoir decay certificate C={C:.6g}, g_res={g_res:.6g} on [1, {t_stop:.3g}]")
    return C, g_res


def correlationAtZeroOracle(psd: SpectralDensity) -> float:
    """psi_hat(0) = S int r^(d-1) |phi(r)|^2 coth(beta r / 2) dr by adaptive quadrature"""
    params = psd.params

    # QUADPACK never evaluates the endpoint r = 0
    def integrand(r: float) -> float:
        return float(params.radialDensity(r)) / np.tanh(psd.beta * r / 2.0)

    value, error = quad(integrand, 0.0, params.cutoff, limit=200, epsabs=1e-13, epsrel=1e-12)
    if error > 1e-9 * max(abs(value), 1.0):
        raise NumericalError(
            "Adaptive quadrature for psi_hat(0) did not converge",
            details={"value": value, "error": error},
        )
    return psd.surface * value


def psdOracle(
    psd: SpectralDensity, energies, settings: Optional[OracleSettings] = None
) -> np.ndarray:
    """
    psi(E) = (1/2 pi) int psi_hat(t) e^(itE) dt with Gaussian damping e^(-eps t^2)
    and three-level Richardson extrapolation in eps.
    """
    settings = settings or ORACLE
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    times = np.arange(0.0, settings.t_max + 0.5 * settings.dt, settings.dt)
    correlation = psd.correlation(times)
    # trapezoid on the full line, folded with psi_hat(-t) = conj psi_hat(t)
    weights = np.full(times.shape, settings.dt)
    weights[0] *= 0.5
    phases = np.exp(1j * np.outer(energies, times))

    def damped(eps: float) -> np.ndarray:
        integrand = correlation * np.exp(-eps * times**2) * weights
        return 2.0 * np.real(phases @ integrand) / (2.0 * np.pi)

    eps, eps2, eps4 = settings.dampings
    first = richardson(damped(eps), damped(eps2), order=1)
    second = richardson(damped(eps2), damped(eps4), order=1)
    return richardson(first, second, order=2)


def detailedBalanceResidual(energies, psi, psi_neg, beta: float) -> np.ndarray:
    """|psi(-E) - e^(beta E) psi(E)| relative to the larger side, zero where both vanish"""
    expected = np.exp(beta * np.asarray(energies, dtype=float)) * psi
    scale = np.maximum(np.abs(psi_neg), np.abs(expected))
    difference = np.abs(psi_neg - expected)
    return np.where(scale > 0, difference / np.where(scale > 0, scale, 1.0), 0.0)
