"""
Kinetic Generator
Linear Boltzmann generator i kappa.grad(eps) - F.grad + gain + loss on a torus grid
"""

from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eig

from classes.TorusGrid import TorusGrid
from log.logging import logger
from utils.errors import NumericalError


class KineticGenerator:
    """Assembled generator with gain, loss, transport and drift kept separate"""

    def __init__(
        self,
        grid: TorusGrid,
        rate: np.ndarray,
        energies: np.ndarray,
        velocity: np.ndarray,
        kappa: np.ndarray,
        field: np.ndarray,
    ):
        self.grid = grid
        self.rate = rate
        self.energies = energies
        self.velocity = velocity
        self.kappa = np.asarray(kappa, dtype=complex)
        self.field = np.asarray(field, dtype=float)
        # (G f)(k) = sum_k' w R[k', k] f(k')
        self.gain = grid.weight * rate.T
        # (L f)(k) = -(sum_k' w R[k, k']) f(k)
        self.loss = -grid.weight * rate.sum(axis=1)
        self.transport = self._transport(self.field)
        self.drift_term = 1j * (velocity @ self.kappa)

    def _transport(self, field: np.ndarray) -> np.ndarray:
        transport = np.zeros((self.grid.size, self.grid.size))
        for axis, D in enumerate(self.grid.diffMatrices):
            if field[axis] != 0.0:
                transport -= field[axis] * D
        return transport

    @cached_property
    def matrix(self) -> np.ndarray:
        M = self.gain + self.transport
        M[np.diag_indices_from(M)] += self.loss
        if np.any(self.kappa != 0):
            M = M.astype(complex)
            M[np.diag_indices_from(M)] += self.drift_term
        return M

    @property
    def isEquilibrium(self) -> bool:
        return not np.any(self.field != 0.0)

    @property
    def isReal(self) -> bool:
        return not np.any(self.kappa != 0)

    def withKappa(self, kappa) -> "KineticGenerator":
        return KineticGenerator(
            self.grid, self.rate, self.energies, self.velocity, kappa, self.field
        )

    def withField(self, field) -> "KineticGenerator":
        return KineticGenerator(
            self.grid, self.rate, self.energies, self.velocity, self.kappa, field
        )

    def conservationDefect(self, f: np.ndarray) -> float:
        """|<1, M f>| in the quadrature pairing"""
        return float(abs(self.grid.weight * np.sum(self.matrix @ f)))

    @cached_property
    def eigenDecomposition(self) -> Tuple[np.ndarray, np.ndarray]:
        logger.note(f"Dense eigendecomposition of a {self.grid.size}-point generator")
        try:
            values, vectors = eig(self.matrix)
        except LinAlgError as e:
            logger.error(f"Eigendecomposition failed: {e}")
            raise NumericalError(
                "Generator eigendecomposition failed", details={"N": self.grid.N}
            ) from e
        return values, vectors

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigenDecomposition[0]


@dataclass
class EigenBranch:
    """Isolated eigenvalue tracked along a kappa path with its eigenvectors"""

    kappas: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    axis: int = 0
    separations: Optional[np.ndarray] = dataclass_field(default=None)

    def at(self, kappa: float) -> complex:
        index = int(np.argmin(np.abs(self.kappas - kappa)))
        return complex(self.eigenvalues[index])
