"""
Pseudo-Resolvent
Transfer operator M(z), S(z) = L_S + M(z), pole tracking with residues and the ladder limit check
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from classes.DispersionLaw import DispersionLaw
from classes.FiberOperator import FiberOperator, PseudoResolventState
from classes.KineticGenerator import KineticGenerator
from classes.SpectralDensity import SpectralDensity
from classes.TorusGrid import TorusGrid
from constants.defaults import POLE, PoleIteration
from dyson.propagators import asVector, freeLiouvillianFiber
from dyson.vertex import VertexTable
from kinetic.assembly import buildGenerator, rateMatrix
from kinetic.spectrum import spectralGap
from kinetic.transport import branchValue, nearestEigenpair
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError


def kineticReference(
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
    field=None,
    field_cap: Optional[float] = 0.2,
) -> KineticGenerator:
    """
    Kinetic generator on the fiber grid, matched to the lattice normalisation.

    The lattice vertex carries 2 pi / n where the kinetic quadrature carries
    (2 pi / N)^d, so the rate is scaled by (2 pi)^(1 - d).
    """
    rate = rateMatrix(grid, psd, eps) * (2.0 * np.pi) ** (1 - grid.d)
    return buildGenerator(grid, rate, eps, field=field, field_cap=field_cap)


def ladderTransfer(table: VertexTable, z: complex) -> FiberOperator:
    """M(z)_p at ladder truncation"""
    return table.transfer(z)


def pseudoResolvent(table: VertexTable, z: complex, truncation: int = 1) -> PseudoResolventState:
    """S(z) = (L_S + M(z))_p"""
    if truncation == 2:
        raise ConfigurationError(
            "R_ex(z) is not assembled; its size is certified through vertexN2Norm",
            details={"truncation": truncation},
        )
    if truncation != 1:
        raise ConfigurationError(f"Unknown truncation order: {truncation}")
    M = table.transfer(z)
    S = FiberOperator(table.p, table.liouvillian.matrix + M.matrix, dict(M.meta))
    return PseudoResolventState(z, S, truncation)


@dataclass
class PoleResult:
    u: complex
    residue: np.ndarray
    defect: float
    rank_one_residue: np.ndarray
    rank_one_difference: float
    iterations: int
    kinetic_u: complex
    gap: float


def _iteratePole(table: VertexTable, start: complex, settings: PoleIteration):
    z = complex(start)
    for iteration in range(1, settings.max_iter + 1):
        S = pseudoResolvent(table, z).S.matrix
        try:
            value, _, _, _ = nearestEigenpair(S, z)
        except NumericalError as e:
            e.details["last_iterate"] = z
            raise
        updated = (1.0 - settings.alpha) * z + settings.alpha * complex(value)
        logger.debug(f"Pole iteration {iteration}: z = {updated:.12g}")
        if abs(updated - z) <= settings.tol:
            return updated, iteration
        z = updated
    logger.error(f"Pole iteration did not converge in {settings.max_iter} steps")
    raise NumericalError(
        "Pole fixed point iteration did not converge",
        details={"last_iterate": z, "max_iter": settings.max_iter},
    )


def contourResidue(table: VertexTable, center: complex, radius: float, nodes: int) -> np.ndarray:
    """(1 / 2 pi i) contour integral of (z - S(z))^(-1) on |z - center| = radius, trapezoid rule"""
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    residue = np.zeros_like(table.liouvillian.matrix, dtype=complex)
    for angle in angles:
        offset = radius * np.exp(1j * angle)
        residue += offset * pseudoResolvent(table, center + offset).resolvent()
    return residue / nodes


def poleTrack(
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
    kappa,
    lam: float,
    field=None,
    T_cut: float = 40.0,
    quad_tol: float = 1e-10,
    kappa_cap: float = 0.2,
    settings: PoleIteration = POLE,
    reference: Optional[KineticGenerator] = None,
) -> PoleResult:
    """
    Fixed point z = eig(S(z)) continued from lambda^2 times the kinetic branch.

    The residue is taken by contour quadrature on a circle of radius
    lambda^2 g / 2 (g the kinetic gap) and compared with the rank-one
    form zeta zeta~^H / (zeta~^H (1 - M'(u)) zeta).
    """
    kappa = asVector(kappa, grid.d, "kappa")
    field = asVector(field, grid.d, "field")
    if np.linalg.norm(kappa) > kappa_cap + 1e-15:
        raise ConfigurationError(f"|kappa| exceeds the cap {kappa_cap}")
    if reference is None:
        reference = kineticReference(psd, eps, grid, field)
    kinetic_u = branchValue(reference, kappa)
    gap = spectralGap(reference)

    table = VertexTable(lam**2 * kappa, lam, field, psd, eps, grid, T_cut, quad_tol)
    u, iterations = _iteratePole(table, lam**2 * kinetic_u, settings)

    radius = 0.5 * lam**2 * gap
    residue = contourResidue(table, u, radius, settings.contour_nodes)
    singular = np.linalg.svd(residue, compute_uv=False)
    defect = float(singular[1] / singular[0])

    S = pseudoResolvent(table, u).S.matrix
    _, left, right, _ = nearestEigenpair(S, u)
    n = S.shape[0]
    normaliser = np.conj(left) @ (np.eye(n) - table.derivative(u)) @ right
    rank_one = np.outer(right, np.conj(left)) / normaliser
    difference = float(np.linalg.norm(residue - rank_one, 2) / np.linalg.norm(residue, 2))

    logger.success(
        f"Pole at lambda={lam:g}, kappa={kappa}: u = {u:.10g} after {iterations} steps, defect {defect:.2e}"
    )
    return PoleResult(u, residue, defect, rank_one, difference, iterations, kinetic_u, gap)


def ladderLimitCheck(
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
    kappa,
    lambdas: Sequence[float],
    T_cut: float = 40.0,
    quad_tol: float = 1e-10,
) -> Dict[str, Any]:
    """
    || lambda^-2 (L_S + M(0))_{lambda^2 kappa} - M^{kappa,0} ||_2 per lambda and its log-log slope.

    The anti-Hermitian part of the difference is reported on its own.
    """
    if len(lambdas) < 2:
        raise ConfigurationError("The ladder limit fit needs at least two lambdas")
    kappa = asVector(kappa, grid.d, "kappa")
    kinetic = kineticReference(psd, eps, grid).withKappa(kappa).matrix

    rows = []
    for lam in lambdas:
        table = VertexTable(lam**2 * kappa, lam, None, psd, eps, grid, T_cut, quad_tol)
        liouvillian = freeLiouvillianFiber(lam**2 * kappa, lam, None, eps, grid).matrix
        scaled = (liouvillian + table.transfer(0.0).matrix) / lam**2
        difference = scaled - kinetic
        anti_hermitian = 0.5 * (difference - difference.conj().T)
        rows.append(
            {
                "lambda": float(lam),
                "kappa": float(np.linalg.norm(kappa)),
                "opnorm_diff": float(np.linalg.norm(difference, 2)),
                "antiherm_diff": float(np.linalg.norm(anti_hermitian, 2)),
            }
        )
        logger.info(f"Ladder limit at lambda={lam:g}: {rows[-1]['opnorm_diff']:.4e}")

    slope = float(
        np.polyfit(
            np.log([row["lambda"] for row in rows]),
            np.log([row["opnorm_diff"] for row in rows]),
            1,
        )[0]
    )
    logger.info(f"Ladder limit log-log slope {slope:.3f}")
    return {"rows": rows, "slope": slope}
