"""
Lattice Propagation
Combes-Thomas certificate, Bloch oscillation check and the Bessel oracle for the free chain
"""

from typing import Dict, Tuple

import numpy as np
from scipy.special import jv

from classes.FiniteHamiltonian import FiniteHamiltonian
from constants.defaults import BLOCH_WIDTH, TOLERANCES
from log.logging import logger


def besselKernel(x: int, xprime: int, t: float) -> complex:
    """
    Exact e^{-itT}(x, x') on Z for epsilon(k) = 2 - 2 cos k.

    Jacobi-Anger gives e^{-2it} i^n J_n(2t) with n = |x - x'|.
    """
    n = abs(int(x) - int(xprime))
    return complex(np.exp(-2j * t) * (1j**n) * jv(n, 2.0 * t))


def _certificateConstant(h: FiniteHamiltonian, t: float, nu: float) -> float:
    kernel = np.abs(h.propagator(t))
    growth = h.dispersion.imaginaryPartSup(nu)
    distances = np.abs(h.sites[:, None, :] - h.sites[None, :, :]).sum(axis=-1)
    # entries below the floor are rounding noise
    significant = kernel > TOLERANCES.kernel_floor * np.max(kernel)
    ratios = kernel[significant] * np.exp(nu * distances[significant] - t * growth)
    return float(np.max(ratios))


def combesThomasFit(h: FiniteHamiltonian, t: float, nu: float) -> Tuple[float, float, bool]:
    """
    Smallest C with |e^{-itH}(x,x')| <= C e^{-nu |x-x'|_1} e^{t sup|Im eps|}.

    Returns (C, C at doubled box, ok) where ok requires C finite and stable
    within 5% under L -> 2L.
    """
    C = _certificateConstant(h, t, nu)
    C_doubled = _certificateConstant(h.doubled(), t, nu)
    stable = abs(C_doubled - C) <= TOLERANCES.combes_thomas_stability * max(C, C_doubled)
    ok = bool(np.isfinite(C) and np.isfinite(C_doubled) and stable)
    if ok:
        logger.success(f"Combes-Thomas certificate t={t:g}, nu={nu:g}: C={C:.6g}")
    else:
        logger.warning(f"Combes-Thomas certificate unstable t={t:g}: C={C:.6g}, C(2L)={C_doubled:.6g}")
    return C, C_doubled, ok


def wavepacket(h: FiniteHamiltonian, width: float = BLOCH_WIDTH) -> np.ndarray:
    """Normalised zero-momentum Gaussian centred in the box"""
    offsets = h.sites - h.center
    amplitude = np.exp(-np.sum(offsets**2, axis=1) / (2.0 * width**2))
    return amplitude / np.linalg.norm(amplitude)


def blochTrace(h: FiniteHamiltonian, times: np.ndarray, width: float = BLOCH_WIDTH) -> np.ndarray:
    """<X>(t) - center for the Gaussian wavepacket, shape (len(times), d)"""
    states = h.evolve(wavepacket(h, width), times)
    probabilities = np.abs(states) ** 2
    return probabilities.T @ (h.sites - h.center)


def blochPeriod(times: np.ndarray, trace: np.ndarray) -> float:
    """Mean spacing of upward crossings of the mean position"""
    centred = trace - np.mean(trace)
    upward = np.flatnonzero((centred[:-1] < 0) & (centred[1:] >= 0))
    if upward.size < 2:
        return float("nan")
    # linear interpolation of each crossing time
    t0, t1 = times[upward], times[upward + 1]
    c0, c1 = centred[upward], centred[upward + 1]
    crossings = t0 - c0 * (t1 - t0) / (c1 - c0)
    return float(np.mean(np.diff(crossings)))


def blochSummary(h: FiniteHamiltonian, times: np.ndarray) -> Dict[str, float]:
    trace = blochTrace(h, times)[:, 0]
    force = h.lam**2 * float(np.linalg.norm(h.field))
    return {
        "period": blochPeriod(times, trace),
        "expected_period": 2.0 * np.pi / force if force > 0 else float("inf"),
        "amplitude": float(np.max(np.abs(trace))),
    }
