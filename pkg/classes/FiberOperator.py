"""
Fiber Operators
Periodic lattice momentum basis, fiber blocks of super-operators and pseudo-resolvent states
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Tuple

import numpy as np

from classes.TorusGrid import TorusGrid
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError


class PeriodicFiberBasis:
    """
    Sites (Z/L)^d with plane waves on the TorusGrid(d, L) momenta.

    Density matrices are vectorised row-major, so A rho B acts as
    kron(A, B^T) and the momentum representation is B^H S B with
    B = kron(W, conj W).
    """

    def __init__(self, d: int, L: int):
        self.grid = TorusGrid(d, L)
        self.d = d
        self.L = L
        self.size = self.grid.size

    @cached_property
    def sites(self) -> np.ndarray:
        return self.grid.indices

    @cached_property
    def planeWaves(self) -> np.ndarray:
        """W[y, j] = L^(-d/2) exp(i k_j . y)"""
        return np.exp(1j * self.sites @ self.grid.points.T) / np.sqrt(self.size)

    @cached_property
    def superBasis(self) -> np.ndarray:
        W = self.planeWaves
        return np.kron(W, np.conj(W))

    def fiberMomentum(self, m) -> np.ndarray:
        """p = 2 pi 2 m / L, the fibers that live exactly on the grid"""
        m = np.broadcast_to(np.asarray(m, dtype=int), (self.d,))
        return 2.0 * np.pi * 2.0 * m / self.L

    def fiberPairs(self, m) -> Tuple[np.ndarray, np.ndarray]:
        """Momentum indices (k_bar - p/2, k_bar + p/2) for every k_bar"""
        m = np.broadcast_to(np.asarray(m, dtype=int), (self.d,))
        lower = self.grid.flatIndex(self.grid.indices - m)
        upper = self.grid.flatIndex(self.grid.indices + m)
        return lower, upper

    def fiberIndex(self, m) -> np.ndarray:
        lower, upper = self.fiberPairs(m)
        return lower * self.size + upper

    def siteProjector(self, x) -> np.ndarray:
        projector = np.zeros((self.size, self.size))
        index = int(self.grid.flatIndex(np.asarray(x).reshape(1, -1))[0])
        projector[index, index] = 1.0
        return projector

    def momentumRepresentation(self, super_operator: np.ndarray) -> np.ndarray:
        B = self.superBasis
        return B.conj().T @ super_operator @ B

    def fiberBlock(self, super_operator: np.ndarray, m, leakage_tol: float = 1e-12):
        """
        Block of a translation-invariant super-operator at fiber m.

        Returns (block, leakage); leakage is the largest entry coupling
        fiber m to any other fiber, relative to the largest entry of the operator.
        """
        S = self.momentumRepresentation(super_operator)
        index = self.fiberIndex(m)
        block = S[np.ix_(index, index)]
        column = S[:, index].copy()
        column[index, :] = 0.0
        scale = max(float(np.max(np.abs(S))), 1e-300)
        leakage = float(np.max(np.abs(column))) / scale
        if leakage > leakage_tol:
            logger.error(f"Fiber {m} leaks {leakage:.2e} into other fibers")
            raise NumericalError(
                "Super-operator is not block diagonal in the fiber decomposition",
                details={"leakage": leakage, "fiber": str(m)},
            )
        return block, leakage


@dataclass
class FiberOperator:
    p: np.ndarray
    matrix: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("Fiber operator has non-finite entries", details=dict(self.meta))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


@dataclass
class PseudoResolventState:
    z: complex
    S: FiberOperator
    truncation: int = 1

    def __post_init__(self):
        if self.truncation not in (1, 2):
            raise ConfigurationError(f"Unknown truncation order: {self.truncation}")

    def resolvent(self) -> np.ndarray:
        """(z - S(z))^(-1)"""
        n = self.S.matrix.shape[0]
        try:
            return np.linalg.inv(self.z * np.eye(n) - self.S.matrix)
        except np.linalg.LinAlgError as e:
            raise NumericalError(
                "z - S(z) is singular", details={"z": complex(self.z)}
            ) from e
