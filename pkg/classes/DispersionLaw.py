"""
Dispersion Law
Kinetic energy symbol of the lattice particle as a finite even Fourier series
"""

from typing import Dict, Tuple

import numpy as np

from constants.defaults import DispersionKind
from utils.errors import ConfigurationError, DomainError


Offset = Tuple[int, ...]


class DispersionLaw:
    """epsilon(k) = sum_x eps_hat(x) cos(k . x) with eps_hat(x) = eps_hat(-x)"""

    def __init__(self, coeffs: Dict[Offset, float], d: int, strip_width: float = 2.0):
        if d < 1:
            raise ConfigurationError(f"Lattice dimension must be positive: {d}")
        if strip_width <= 0:
            raise ConfigurationError(f"Strip width must be positive: {strip_width}")
        for offset, value in coeffs.items():
            if len(offset) != d:
                raise ConfigurationError(f"Offset {offset} does not have {d} components")
            mirror = tuple(-x for x in offset)
            if mirror not in coeffs or coeffs[mirror] != value:
                raise ConfigurationError(
                    f"Dispersion coefficients must be even, offset {offset} has no mirror",
                    details={"offset": offset},
                )

        self.d = d
        self.strip_width = strip_width
        self.coeffs = {tuple(int(x) for x in k): float(v) for k, v in coeffs.items()}
        self.offsets = np.array(list(self.coeffs.keys()), dtype=float).reshape(-1, d)
        self.values = np.array(list(self.coeffs.values()), dtype=float)
        self._checkNonDegenerate()

    @classmethod
    def laplacian(cls, d: int, strip_width: float = 2.0) -> "DispersionLaw":
        """epsilon(k) = sum_j 2 (1 - cos k_j)"""
        coeffs: Dict[Offset, float] = {(0,) * d: 2.0 * d}
        for j in range(d):
            unit = [0] * d
            unit[j] = 1
            coeffs[tuple(unit)] = -1.0
            unit[j] = -1
            coeffs[tuple(unit)] = -1.0
        return cls(coeffs, d, strip_width)

    @classmethod
    def fromString(cls, text: str, d: int, strip_width: float = 2.0) -> "DispersionLaw":
        """Parse `x1,..,xd:value;...` coefficient lists"""
        coeffs: Dict[Offset, float] = {}
        for item in text.split(";"):
            item = item.strip()
            if not item:
                continue
            try:
                offset_text, value_text = item.split(":")
                offset = tuple(int(x) for x in offset_text.split(","))
                coeffs[offset] = float(value_text)
            except ValueError:
                raise ConfigurationError(f"Malformed dispersion coefficient: {item}")
        if not coeffs:
            raise ConfigurationError("Custom dispersion needs at least one coefficient")
        return cls(coeffs, d, strip_width)

    @classmethod
    def create(
        cls, kind: DispersionKind, d: int, text: str = "", strip_width: float = 2.0
    ) -> "DispersionLaw":
        if kind is DispersionKind.LAPLACIAN:
            return cls.laplacian(d, strip_width)
        if kind is DispersionKind.CUSTOM:
            return cls.fromString(text, d, strip_width)
        raise ConfigurationError(f"Unknown dispersion kind: {kind}")

    def _checkNonDegenerate(self) -> None:
        # v . grad eps identically zero for some v <=> singular velocity Gram matrix
        nodes = -np.pi + 2.0 * np.pi * (np.arange(16) + 0.37) / 16
        mesh = np.stack(np.meshgrid(*([nodes] * self.d), indexing="ij"), axis=-1)
        grad = self.gradient(mesh.reshape(-1, self.d)).real
        gram = grad.T @ grad / grad.shape[0]
        smallest = float(np.min(np.linalg.eigvalsh(gram)))
        if smallest <= 1e-12 * max(1.0, float(np.max(np.abs(self.values)))):
            raise ConfigurationError(
                "Dispersion gradient is orthogonal to a fixed direction",
                details={"min_gram_eigenvalue": smallest},
            )

    def evaluate(self, k):
        """epsilon at real or complex momenta; k has the axis index last"""
        k = np.asarray(k)
        phases = k @ self.offsets.T
        result = np.cos(phases) @ self.values
        if np.isrealobj(k):
            return result.real
        return result

    def gradient(self, k):
        k = np.asarray(k)
        phases = k @ self.offsets.T
        return -(np.sin(phases) * self.values) @ self.offsets

    def velocitySymbol(self, points: np.ndarray, axis: int) -> np.ndarray:
        """Component `axis` of grad epsilon sampled on momentum points"""
        if not 0 <= axis < self.d:
            raise ConfigurationError(f"Invalid axis {axis} for d={self.d}")
        return self.gradient(points)[..., axis].real

    def integratedAlong(self, q: np.ndarray, f: np.ndarray, t) -> np.ndarray:
        """
        int_0^t epsilon(q + f s) ds in closed form, vectorised over t.

        Returns shape t.shape + q.shape[:-1].
        """
        t = np.asarray(t, dtype=float)
        q = np.asarray(q, dtype=float)
        f = np.asarray(f, dtype=float)
        qx = q @ self.offsets.T
        fx = self.offsets @ f
        tt = t.reshape(t.shape + (1,) * (qx.ndim))
        theta = tt * fx
        terms = np.cos(qx + 0.5 * theta) * np.sinc(theta / (2.0 * np.pi))
        return tt[..., 0] * (terms @ self.values)

    def imaginaryPartSup(self, nu: float, samples: int = 64) -> float:
        """sup |Im epsilon(k + i b)| over real k and |b_j| <= nu, sampled"""
        if nu <= 0 or nu > self.strip_width:
            raise DomainError(
                f"nu={nu} outside the analyticity strip (0, {self.strip_width}]",
                details={"nu": nu, "strip_width": self.strip_width},
            )
        nodes = -np.pi + 2.0 * np.pi * np.arange(samples) / samples
        shifts = np.linspace(-nu, nu, 5)
        k_mesh = np.stack(np.meshgrid(*([nodes] * self.d), indexing="ij"), axis=-1).reshape(-1, self.d)
        b_mesh = np.stack(np.meshgrid(*([shifts] * self.d), indexing="ij"), axis=-1).reshape(-1, self.d)
        # Im cos(a + i c) = -sin(a) sinh(c)
        kx = k_mesh @ self.offsets.T
        bx = b_mesh @ self.offsets.T
        imag = -(np.sin(kx)[:, None, :] * np.sinh(bx)[None, :, :]) @ self.values
        return float(np.max(np.abs(imag)))
