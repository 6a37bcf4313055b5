"""
Finite Hamiltonian
Lattice particle T - lambda^2 F.X in a Dirichlet box and its exact propagator
"""

from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh

from classes.DispersionLaw import DispersionLaw
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError


class FiniteHamiltonian:
    """Dense Hermitian matrix on l^2 of the box {0..L-1}^d, hopping cut at the boundary"""

    def __init__(
        self,
        dispersion: DispersionLaw,
        L: int,
        lam: float,
        field: np.ndarray,
    ):
        field = np.asarray(field, dtype=float).reshape(-1)
        if L < 2:
            raise ConfigurationError(f"Box side must be at least 2: {L}")
        if field.shape != (dispersion.d,):
            raise ConfigurationError(
                f"Field needs {dispersion.d} components, got {field.shape[0]}"
            )

        self.dispersion = dispersion
        self.d = dispersion.d
        self.L = L
        self.lam = lam
        self.field = field
        axes = [np.arange(L)] * self.d
        self.sites = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        self.center = np.full(self.d, (L - 1) / 2.0)
        self.matrix = self._assemble()
        self._spectrum: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def _assemble(self) -> np.ndarray:
        n = self.sites.shape[0]
        strides = self.L ** np.arange(self.d - 1, -1, -1)
        H = np.zeros((n, n))
        for offset, value in self.dispersion.coeffs.items():
            target = self.sites + np.asarray(offset)
            inside = np.all((target >= 0) & (target < self.L), axis=1)
            rows = np.flatnonzero(inside)
            cols = target[inside] @ strides
            H[rows, cols] += value
        potential = -(self.lam**2) * (self.sites - self.center) @ self.field
        H[np.diag_indices(n)] += potential
        if not np.allclose(H, H.T, atol=1e-14, rtol=0.0):
            raise NumericalError("Assembled Hamiltonian is not Hermitian")
        return H

    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._spectrum is None:
            logger.note(f"Diagonalising {self.matrix.shape[0]}-site Hamiltonian")
            try:
                self._spectrum = eigh(self.matrix)
            except LinAlgError as e:
                logger.error(f"Eigendecomposition failed: {e}")
                raise NumericalError(
                    "Hermitian eigendecomposition failed", details={"L": self.L}
                ) from e
        return self._spectrum

    def propagator(self, t: float) -> np.ndarray:
        """Kernel of exp(-i t H)"""
        energies, vectors = self.spectrum()
        return (vectors * np.exp(-1j * t * energies)) @ vectors.conj().T

    def evolve(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """States exp(-i t H) psi0 as columns, one per time"""
        energies, vectors = self.spectrum()
        coefficients = vectors.conj().T @ psi0
        phases = np.exp(-1j * np.outer(energies, np.asarray(times, dtype=float)))
        return vectors @ (phases * coefficients[:, None])

    def unitarityError(self, t: float) -> float:
        U = self.propagator(t)
        return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))

    def groupError(self, t: float, s: float) -> float:
        """max |e^{-i(t+s)H} - e^{-itH} e^{-isH}|"""
        return float(
            np.max(np.abs(self.propagator(t + s) - self.propagator(t) @ self.propagator(s)))
        )

    def siteIndex(self, site) -> int:
        strides = self.L ** np.arange(self.d - 1, -1, -1)
        return int(np.asarray(site) @ strides)

    def doubled(self) -> "FiniteHamiltonian":
        return FiniteHamiltonian(self.dispersion, 2 * self.L, self.lam, self.field)
