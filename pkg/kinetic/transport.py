"""
Kinetic Transport
Green-Kubo diffusion (two routes), eigenvalue branch derivatives and the Einstein residual
"""

from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eig, solve

from classes.KineticGenerator import EigenBranch, KineticGenerator
from constants.defaults import PANEL_ORDER, TOLERANCES
from kinetic.spectrum import drift, spectralGap, stationaryState
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError
from utils.spectral import compositeGaussLegendre, richardson


def diffusionGk(gen: KineticGenerator) -> np.ndarray:
    """
    D^{ij} = sum_k w d_i eps g^j with (-M) g^j = d_j eps zeta on mean-zero functions.

    The rank-one border zeta w^T makes -M invertible without changing the
    solution on the mean-zero subspace.
    """
    if not gen.isReal or not gen.isEquilibrium:
        raise ConfigurationError("Green-Kubo diffusion needs kappa = 0 and F = 0")

    grid = gen.grid
    zeta = stationaryState(gen)
    rhs = gen.velocity * zeta[:, None]
    bordered = -gen.matrix + np.outer(zeta, np.full(grid.size, grid.weight))
    try:
        g = solve(bordered, rhs)
    except LinAlgError as e:
        logger.error(f"Green-Kubo solve failed: {e}")
        raise NumericalError("Green-Kubo linear solve is singular") from e
    return grid.weight * gen.velocity.T @ g


def velocityAutocorrelation(gen: KineticGenerator, times: np.ndarray) -> np.ndarray:
    """C^{ij}(t) = <d_i eps, e^{tM} (d_j eps zeta)>, shape (len(times), d, d)"""
    grid = gen.grid
    zeta = stationaryState(gen)
    values, vectors = gen.eigenDecomposition
    sources = solve(vectors, (gen.velocity * zeta[:, None]).astype(complex))
    projections = grid.weight * gen.velocity.T @ vectors
    decay = np.exp(np.outer(times, values))
    correlation = np.einsum("in,tn,nj->tij", projections, decay, sources)
    return correlation.real


def diffusionTimeDomain(
    gen: KineticGenerator, horizon: Optional[float] = None, panels: int = 64
) -> np.ndarray:
    """(1/2) int_{-T}^{T} C(|t|) dt by composite Gauss-Legendre, T = 20 / gap by default"""
    if not gen.isReal or not gen.isEquilibrium:
        raise ConfigurationError("Time-domain diffusion needs kappa = 0 and F = 0")
    if horizon is None:
        horizon = 20.0 / spectralGap(gen)
    nodes, weights = compositeGaussLegendre(0.0, horizon, panels, PANEL_ORDER)
    correlation = velocityAutocorrelation(gen, nodes)
    return np.tensordot(weights, correlation, axes=1)


def _unitVector(d: int, axis: int) -> np.ndarray:
    unit = np.zeros(d)
    unit[axis] = 1.0
    return unit


def nearestEigenpair(M: np.ndarray, predictor: complex):
    """(value, left, right, distance to runner-up) of the eigenvalue nearest `predictor`"""
    try:
        values, left, right = eig(M, left=True, right=True)
    except LinAlgError as e:
        raise NumericalError("Eigendecomposition failed while tracking the branch") from e
    distances = np.abs(values - predictor)
    order = np.argsort(distances)
    nearest, runner_up = order[0], order[1]
    # the tracked eigenvalue must be much closer than any other
    if distances[nearest] > 0.25 * distances[runner_up]:
        logger.error("Branch crossing detected")
        raise NumericalError(
            "Branch eigenvalue is not isolated near the predictor",
            details={
                "predictor": complex(predictor),
                "nearest": complex(values[nearest]),
                "runner_up": complex(values[runner_up]),
            },
        )
    return values[nearest], left[:, nearest], right[:, nearest], distances[runner_up]


def eigenBranch(
    gen: KineticGenerator,
    kappas: Sequence[float],
    axis: int = 0,
    kappa_cap: float = 0.2,
) -> EigenBranch:
    """
    Track the eigenvalue through 0 at kappa = 0 along kappa e_axis.

    The path is walked outward from 0 in both directions with linear
    prediction; eigenvectors are normalised by w sum zeta = 1 and
    <zeta_tilde, zeta> = 1.
    """
    kappas = np.asarray(kappas, dtype=float)
    if np.max(np.abs(kappas)) > kappa_cap + 1e-15:
        raise ConfigurationError(f"kappa path exceeds the cap {kappa_cap}")
    if not np.any(kappas == 0.0):
        raise ConfigurationError("kappa path must contain 0")

    grid = gen.grid
    unit = _unitVector(grid.d, axis)
    n = kappas.size
    eigenvalues = np.zeros(n, dtype=complex)
    right = np.zeros((n, grid.size), dtype=complex)
    left = np.zeros((n, grid.size), dtype=complex)
    separations = np.zeros(n)

    order = np.argsort(kappas)
    start = int(np.flatnonzero(kappas[order] == 0.0)[0])
    for direction in (1, -1):
        history = []
        position = start
        while 0 <= position < n:
            index = order[position]
            if len(history) >= 2:
                (k1, u1), (k2, u2) = history[-2], history[-1]
                predictor = u2 + (u2 - u1) * (kappas[index] - k2) / (k2 - k1)
            elif history:
                predictor = history[-1][1]
            else:
                predictor = 0.0
            M = gen.withKappa(kappas[index] * unit).matrix
            value, vl, vr, separation = nearestEigenpair(M, predictor)
            vr = vr / (grid.weight * np.sum(vr))
            vl = vl / np.conj(np.vdot(vl, vr))
            eigenvalues[index], right[index], left[index] = value, vr, vl
            separations[index] = separation
            history.append((kappas[index], value))
            position += direction

    return EigenBranch(kappas, eigenvalues, right, left, axis, separations)


def branchValue(gen: KineticGenerator, kappa: np.ndarray) -> complex:
    """Eigenvalue at kappa continued from 0 through the midpoint"""
    M_half = gen.withKappa(0.5 * kappa).matrix
    half, _, _, _ = nearestEigenpair(M_half, 0.0)
    M = gen.withKappa(kappa).matrix
    value, _, _, _ = nearestEigenpair(M, 2.0 * half)
    return complex(value)


def branchDerivatives(gen: KineticGenerator, h: float = 1e-2) -> Dict[str, Any]:
    """
    v = Im du/dkappa and D = -(1/2) Hess Re u at kappa = 0.

    Central differences at h and h/2 combined by Richardson.
    """
    if h > 1e-2:
        raise ConfigurationError(f"Branch step must not exceed 1e-2: {h}")
    d = gen.grid.d
    u0 = branchValue(gen, np.zeros(d))

    def estimates(step: float):
        first = np.zeros(d, dtype=complex)
        second = np.zeros((d, d), dtype=complex)
        for i in range(d):
            ei = step * _unitVector(d, i)
            plus, minus = branchValue(gen, ei), branchValue(gen, -ei)
            first[i] = (plus - minus) / (2.0 * step)
            second[i, i] = (plus - 2.0 * u0 + minus) / step**2
            for j in range(i + 1, d):
                ej = step * _unitVector(d, j)
                mixed = (
                    branchValue(gen, ei + ej)
                    - branchValue(gen, ei - ej)
                    - branchValue(gen, -ei + ej)
                    + branchValue(gen, -ei - ej)
                ) / (4.0 * step**2)
                second[i, j] = second[j, i] = mixed
        return first, second

    first_h, second_h = estimates(h)
    first_h2, second_h2 = estimates(h / 2.0)
    first = richardson(first_h, first_h2, order=2)
    second = richardson(second_h, second_h2, order=2)
    return {
        "u0": u0,
        "v": first.imag,
        "D": -0.5 * second.real,
        "hessian_imag": second.imag,
        "field": gen.field.copy(),
    }


def _driftDerivative(gen: KineticGenerator, axis: int, step: float) -> np.ndarray:
    unit = step * _unitVector(gen.grid.d, axis)
    plus = drift(gen.withField(gen.field + unit))
    minus = drift(gen.withField(gen.field - unit))
    return (plus - minus) / (2.0 * step)


def einsteinResidual(gen: KineticGenerator, beta: float, h: float = 1e-3) -> Dict[str, Any]:
    """
    max_ij |dv^j/dF^i - beta D^{ij}| relative to beta D.

    Diagonal entries are normalised by their own beta D^{ii}, off-diagonal
    entries by max |beta D|. Derivatives use central differences at h, h/2
    and h/4; the two Richardson values must agree (Cauchy) to 1e-6.
    """
    if not gen.isReal or not gen.isEquilibrium:
        raise ConfigurationError("Einstein residual is taken at kappa = 0 and F = 0")

    d = gen.grid.d
    mobility = np.zeros((d, d))
    for i in range(d):
        levels = [_driftDerivative(gen, i, h / 2**level) for level in range(3)]
        coarse = richardson(levels[0], levels[1], order=2)
        fine = richardson(levels[1], levels[2], order=2)
        spread = float(np.max(np.abs(fine - coarse)))
        if spread > TOLERANCES.richardson_cauchy * max(float(np.max(np.abs(fine))), 1e-300):
            logger.error(f"Richardson sequence for dv/dF along axis {i} is not Cauchy")
            raise NumericalError(
                "Field derivative extrapolation did not converge",
                details={"axis": i, "spread": spread, "h": h},
            )
        mobility[i, :] = fine

    betaD = beta * diffusionGk(gen)
    scale = float(np.max(np.abs(betaD)))
    residuals = np.abs(mobility - betaD) / scale
    for i in range(d):
        residuals[i, i] = abs(mobility[i, i] - betaD[i, i]) / abs(betaD[i, i])
    residual = float(np.max(residuals))
    logger.info(f"Einstein residual at beta={beta:g}: {residual:.3e}")
    return {"dvdF": mobility, "betaD": betaD, "residual": residual}
