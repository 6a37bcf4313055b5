"""
Spectral Helpers
Fourier collocation on periodic grids, Richardson extrapolation and Gauss-Legendre rules
"""

from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import roots_legendre

from utils.errors import ConfigurationError


def fourierNodes(N: int) -> np.ndarray:
    """Uniform nodes -pi + 2 pi j / N"""
    return -np.pi + 2.0 * np.pi * np.arange(N) / N


def fourierWavenumbers(N: int) -> np.ndarray:
    """Symmetric integer wavenumbers with the Nyquist mode set to zero"""
    if N % 2:
        raise ConfigurationError(f"Grid size must be even: {N}")
    return np.r_[0 : N // 2, 0, -N // 2 + 1 : 0].astype(float)


def diffMatrix(N: int) -> np.ndarray:
    """
    First derivative collocation matrix on N periodic nodes.

    Circulant with an odd first column, so it is exactly antisymmetric
    and annihilates constants.
    """
    k = fourierWavenumbers(N)
    kdelta = np.zeros(N)
    kdelta[0] = 1.0
    col = np.real(np.fft.ifft(1j * k * np.fft.fft(kdelta)))
    # exact oddness col[N - m] = -col[m]
    col = 0.5 * (col - np.roll(col[::-1], 1))
    col[0] = 0.0
    return toeplitz(col, -col)


def axisOperator(op: np.ndarray, d: int, axis: int) -> np.ndarray:
    """Lift a one-axis operator to the flattened ("ij") d-dimensional grid"""
    N = op.shape[0]
    result = np.ones((1, 1))
    for j in range(d):
        result = np.kron(result, op if j == axis else np.eye(N))
    return result


def _shiftPhases(N: int, a: float) -> np.ndarray:
    k = np.r_[0 : N // 2, 0, -N // 2 + 1 : 0].astype(float)
    phases = np.exp(-1j * k * a)
    phases[N // 2] = np.cos(N * a / 2.0)
    return phases


def shiftFunctions(values: np.ndarray, N: int, d: int, shift: Sequence[float]) -> np.ndarray:
    """
    Trigonometric interpolation of f(k - shift) for grid functions.

    `values` has the flattened grid on its first axis; trailing axes are
    carried along (columns of an operator for instance).
    """
    shift = np.asarray(shift, dtype=float)
    if np.allclose(shift, 0.0):
        return np.array(values, copy=True)
    trailing = values.shape[1:]
    grid_values = values.reshape((N,) * d + trailing)
    coeffs = np.fft.fftn(grid_values, axes=tuple(range(d)))
    for axis in range(d):
        shape = [1] * coeffs.ndim
        shape[axis] = N
        coeffs = coeffs * _shiftPhases(N, shift[axis]).reshape(shape)
    shifted = np.fft.ifftn(coeffs, axes=tuple(range(d))).reshape(values.shape)
    if np.isrealobj(values):
        return shifted.real
    return shifted


def richardson(coarse, fine, order: int = 2):
    """Eliminate the leading h**order term from estimates at h and h/2"""
    factor = 2.0**order
    return (factor * np.asarray(fine) - np.asarray(coarse)) / (factor - 1.0)


def gaussLegendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def compositeGaussLegendre(
    a: float, b: float, panels: int, order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule of the given order on equal panels of [a, b]"""
    edges = np.linspace(a, b, panels + 1)
    nodes, weights = roots_legendre(order)
    half = 0.5 * np.diff(edges)
    all_nodes = edges[:-1, None] + half[:, None] * (nodes[None, :] + 1.0)
    all_weights = half[:, None] * weights[None, :]
    return all_nodes.ravel(), all_weights.ravel()
