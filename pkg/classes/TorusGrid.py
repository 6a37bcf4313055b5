"""
Torus Grid
Uniform momentum grid on [-pi, pi)^d with trapezoid weights
"""

from functools import cached_property
from typing import List

import numpy as np

from utils.errors import ConfigurationError
from utils.spectral import axisOperator, diffMatrix, fourierNodes


class TorusGrid:
    """N points per axis, flattened in "ij" order (first axis slowest)"""

    def __init__(self, d: int, N: int):
        if d < 1:
            raise ConfigurationError(f"Grid dimension must be positive: {d}")
        if N < 4 or N % 2:
            raise ConfigurationError(f"Points per axis must be even and >= 4: {N}")
        self.d = d
        self.N = N
        self.nodes = fourierNodes(N)
        self.weight = (2.0 * np.pi / N) ** d
        self.size = N**d

    @cached_property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.nodes] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer node coordinates 0..N-1 per axis"""
        mesh = np.meshgrid(*([np.arange(self.N)] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    def flatIndex(self, indices: np.ndarray) -> np.ndarray:
        strides = self.N ** np.arange(self.d - 1, -1, -1)
        return (np.asarray(indices) % self.N) @ strides

    @cached_property
    def reflection(self) -> np.ndarray:
        """Permutation taking k to -k"""
        return self.flatIndex(-self.indices)

    @cached_property
    def diffMatrices(self) -> List[np.ndarray]:
        D = diffMatrix(self.N)
        return [axisOperator(D, self.d, axis) for axis in range(self.d)]

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Trapezoid rule over the first axis"""
        return self.weight * np.sum(values, axis=0)

    def quadratureDefect(self, max_index: int) -> float:
        """Largest trapezoid error over Fourier modes with |index| <= max_index per axis"""
        if max_index >= self.N:
            raise ConfigurationError(f"Trapezoid rule is exact only below N={self.N}")
        worst = 0.0
        modes = np.arange(-max_index, max_index + 1)
        for mode in np.stack(np.meshgrid(*([modes] * self.d), indexing="ij"), axis=-1).reshape(-1, self.d):
            values = np.exp(1j * self.points @ mode)
            exact = (2.0 * np.pi) ** self.d if not np.any(mode) else 0.0
            worst = max(worst, abs(self.integrate(values) - exact))
        return worst
