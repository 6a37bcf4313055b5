"""
Fiber Propagators
Free fiber Liouvillian and propagator by characteristics, and literal super-operators on the periodic lattice
"""

from typing import Optional

import numpy as np
from scipy.linalg import expm

from classes.DispersionLaw import DispersionLaw
from classes.FiberOperator import FiberOperator, PeriodicFiberBasis
from classes.TorusGrid import TorusGrid
from utils.errors import ConfigurationError
from utils.spectral import shiftFunctions


def asVector(value, d: int, name: str) -> np.ndarray:
    vector = np.zeros(d) if value is None else np.asarray(value, dtype=float).reshape(-1)
    if vector.shape != (d,):
        raise ConfigurationError(f"{name} needs {d} components")
    return vector


def phaseFactors(eps: DispersionLaw, q: np.ndarray, f: np.ndarray, t) -> np.ndarray:
    """b_t(q) = exp(-i int_0^t eps(q + f s) ds), shape t.shape + q.shape[:-1]"""
    return np.exp(-1j * eps.integratedAlong(q, f, t))


def fiberPhases(eps: DispersionLaw, grid: TorusGrid, p: np.ndarray, f: np.ndarray, t):
    """(b(k_bar - p/2), b(k_bar + p/2)) on the grid nodes"""
    lower = phaseFactors(eps, grid.points - 0.5 * p, f, t)
    upper = phaseFactors(eps, grid.points + 0.5 * p, f, t)
    return lower, upper


def freeLiouvillianFiber(
    p, lam: float, field, eps: DispersionLaw, grid: TorusGrid
) -> FiberOperator:
    """(L_S)_p = i Omega_p - lambda^2 F . grad with Omega_p(k) = eps(k + p/2) - eps(k - p/2)"""
    p = asVector(p, grid.d, "p")
    f = lam**2 * asVector(field, grid.d, "field")
    omega = eps.evaluate(grid.points + 0.5 * p) - eps.evaluate(grid.points - 0.5 * p)
    matrix = np.diag(1j * omega)
    for axis, D in enumerate(grid.diffMatrices):
        if f[axis] != 0.0:
            matrix = matrix - f[axis] * D
    return FiberOperator(p, matrix, {"lambda": lam, "field": asVector(field, grid.d, "field")})


def freeFiberPropagator(
    p, t: float, lam: float, field, eps: DispersionLaw, grid: TorusGrid
) -> FiberOperator:
    """
    e^{t (L_S)_p} by characteristics.

    The phase exp(i int_0^t Omega_p(k - f (t - s)) ds) is applied first,
    then the trigonometric shift g(k) -> g(k - f t) with f = lambda^2 F.
    """
    if t < 0:
        raise ConfigurationError(f"Propagation time must be non-negative: {t}")
    p = asVector(p, grid.d, "p")
    f = lam**2 * asVector(field, grid.d, "field")
    lower, upper = fiberPhases(eps, grid, p, f, t)
    phases = np.diag(lower * np.conj(upper))
    matrix = shiftFunctions(phases, grid.N, grid.d, f * t)
    return FiberOperator(p, matrix, {"t": t, "lambda": lam})


def periodicHamiltonian(eps: DispersionLaw, basis: PeriodicFiberBasis) -> np.ndarray:
    """Hopping matrix (H psi)(y) = sum_o eps_hat(o) psi(y + o) with periodic wrap"""
    grid = basis.grid
    H = np.zeros((basis.size, basis.size))
    for offset, value in eps.coeffs.items():
        targets = grid.flatIndex(basis.sites + np.asarray(offset))
        H[np.arange(basis.size), targets] += value
    return H


def freeLiouvillianSuper(H: np.ndarray) -> np.ndarray:
    """rho -> -i [H, rho] on row-major vectorised density matrices"""
    identity = np.eye(H.shape[0])
    return np.kron(-1j * H, identity) + np.kron(identity, 1j * H.T)


def evolutionSuper(H: np.ndarray, t: float) -> np.ndarray:
    """rho -> E rho E^H with E = exp(-i H t)"""
    E = expm(-1j * t * H)
    return np.kron(E, np.conj(E))


def leftMultiplication(A: np.ndarray) -> np.ndarray:
    return np.kron(A, np.eye(A.shape[0]))


def rightMultiplication(A: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(A.shape[0]), A.T)


def superOperatorFiber(
    super_operator: np.ndarray, basis: PeriodicFiberBasis, m=0, p: Optional[np.ndarray] = None
) -> FiberOperator:
    """Exact fiber block of a literal super-operator; p defaults to the lattice fiber of m"""
    block, leakage = basis.fiberBlock(super_operator, m)
    momentum = basis.fiberMomentum(m) if p is None else p
    return FiberOperator(momentum, block, {"leakage": leakage, "m": m})
