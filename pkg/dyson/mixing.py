"""
Reduced Evolution
Ladder-resummed fiber dynamics from the memory equation and the mixing rate fit
"""

from math import ceil
from typing import Any, Dict, Tuple

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from classes.DispersionLaw import DispersionLaw
from classes.SpectralDensity import SpectralDensity
from classes.TorusGrid import TorusGrid
from dyson.propagators import asVector, freeLiouvillianFiber
from dyson.resolvent import poleTrack
from dyson.vertex import ladderVertexStack
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError
from utils.spectral import gaussLegendre


HAT_NODES = 8
# fit window in units of 1 / (lambda^2 gap)
MIXING_WINDOW = (0.5, 4.0)


def _hatMoments(p, lam, field, psd, eps, grid, h: float, panels: int):
    """
    Moments of V against the two hat functions on each panel [j h, (j + 1) h].

    first[j] pairs with the panel's left end, second[j] with its right end.
    """
    nodes, weights = gaussLegendre(0.0, 1.0, HAT_NODES)
    times = (np.arange(panels)[:, None] + nodes[None, :]) * h
    samples = ladderVertexStack(p, times.ravel(), lam, field, psd, eps, grid)
    samples = samples.reshape(panels, HAT_NODES, grid.size, grid.size)
    first = h * np.einsum("i,jikl->jkl", weights * (1.0 - nodes), samples)
    second = h * np.einsum("i,jikl->jkl", weights * nodes, samples)
    return first, second


def reducedEvolution(
    p,
    lam: float,
    field,
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
    t_end: float,
    time_step: float = 0.2,
    T_cut: float = 40.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Z' = (L_S)_p Z + int_0^t V_p(s) Z(t - s) ds with Z(0) = 1.

    Product integration of V against piecewise linear Z, trapezoidal
    stepping, memory cut at T_cut. Returns (times, Z) with Z of shape
    (steps + 1, n, n).
    """
    if time_step <= 0 or t_end <= 0:
        raise ConfigurationError("Time step and horizon must be positive")
    p = asVector(p, grid.d, "p")
    h = time_step
    steps = int(ceil(t_end / h))
    memory = int(ceil(T_cut / h))
    n = grid.size

    logger.note(f"Reduced evolution: {steps} steps, memory of {memory} panels")
    first, second = _hatMoments(p, lam, field, psd, eps, grid, h, memory)
    # kernel[m] multiplies Z_{N - m} in the memory integral at t_N
    kernel = np.zeros((memory + 1, n, n), dtype=complex)
    kernel[0] = first[0]
    kernel[1:memory] = first[1:] + second[:-1]
    kernel[memory] = second[-1]
    history_kernel = np.concatenate(list(kernel[1:]), axis=1)

    liouvillian = freeLiouvillianFiber(p, lam, field, eps, grid).matrix
    try:
        factors = lu_factor(np.eye(n) - 0.5 * h * (liouvillian + kernel[0]))
    except (LinAlgError, ValueError) as e:
        raise NumericalError("Implicit step matrix is singular") from e

    Z = np.zeros((steps + 1, n, n), dtype=complex)
    Z[0] = np.eye(n)
    rate = liouvillian @ Z[0]
    for step in range(steps):
        depth = min(step, memory)
        history = np.zeros((n, n), dtype=complex)
        if depth:
            stacked = Z[step + 1 - depth : step + 1][::-1].reshape(depth * n, n)
            history = history_kernel[:, : depth * n] @ stacked
        if step < memory:
            history = history + second[step] @ Z[0]
        Z[step + 1] = lu_solve(factors, Z[step] + 0.5 * h * (rate + history))
        rate = (liouvillian + kernel[0]) @ Z[step + 1] + history
    times = h * np.arange(steps + 1)
    return times, Z


def mixingCheck(
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
    lam: float,
    kappa=0.0,
    field=None,
    T_cut: float = 40.0,
    time_step: float = 0.2,
    quad_tol: float = 1e-10,
) -> Dict[str, Any]:
    """
    Fit ||Z_t - e^{u t} P|| ~ C e^{-g lambda^2 t} over lambda^2 gap t in [0.5, 4].

    u and P come from the pole of the same ladder pseudo-resolvent.
    """
    kappa = asVector(kappa, grid.d, "kappa")
    pole = poleTrack(psd, eps, grid, kappa, lam, field, T_cut, quad_tol)
    scale = lam**2 * pole.gap
    t_end = MIXING_WINDOW[1] / scale
    times, Z = reducedEvolution(
        lam**2 * kappa, lam, field, psd, eps, grid, t_end, time_step, T_cut
    )

    window = (times * scale >= MIXING_WINDOW[0]) & (times * scale <= MIXING_WINDOW[1])
    if np.count_nonzero(window) < 3:
        raise ConfigurationError(
            "Time step too coarse for the mixing window", details={"time_step": time_step}
        )
    fit_times = times[window]
    distances = np.array(
        [
            np.linalg.norm(Z[i] - np.exp(pole.u * t) * pole.residue, 2)
            for i, t in zip(np.flatnonzero(window), fit_times)
        ]
    )
    slope, _ = np.polyfit(fit_times, np.log(distances), 1)
    g_fit = float(-slope / lam**2)
    if not g_fit > 0:
        logger.error(f"Mixing fit gave a non-positive rate {g_fit:.4g}")
        raise NumericalError(
            "Reduced dynamics does not relax to the pole projection",
            details={"g_fit": g_fit, "lambda": lam},
        )
    logger.success(f"Mixing rate at lambda={lam:g}: g = {g_fit:.4f} (kinetic gap {pole.gap:.4f})")
    return {
        "g_fit": g_fit,
        "gap": pole.gap,
        "u": pole.u,
        "times": fit_times,
        "distances": distances,
    }
