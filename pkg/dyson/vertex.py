"""
Ladder Vertex
Single-pair irreducible vertex in fiber form, its Laplace table and the Monte Carlo fourth-order vertex norm
"""

from functools import cached_property
from itertools import product
from math import ceil
from typing import List, Tuple

import numpy as np

from classes.DispersionLaw import DispersionLaw
from classes.FiberOperator import FiberOperator, PeriodicFiberBasis
from classes.SpectralDensity import SpectralDensity
from classes.TorusGrid import TorusGrid
from constants.defaults import PANEL_ORDER, TOLERANCES, Side
from diagrams.weights import hRealTime, hValue
from dyson.propagators import (
    asVector,
    evolutionSuper,
    fiberPhases,
    freeLiouvillianFiber,
    leftMultiplication,
    periodicHamiltonian,
    phaseFactors,
    rightMultiplication,
    superOperatorFiber,
)
from log.logging import logger
from utils.errors import ConfigurationError, DomainError, NumericalError
from utils.spectral import compositeGaussLegendre, shiftFunctions


# tail of the Laplace integral beyond T_cut must stay below this
TAIL_TOLERANCE = 1e-10
MAX_REFINEMENTS = 6
# ratio of the two-sided geometric proposal for the extra site offset
OFFSET_RATIO = 0.5
IRREDUCIBLE_PAIRINGS_N2 = (((0, 2), (1, 3)), ((0, 3), (1, 2)))


def ladderVertexStack(
    p,
    times,
    lam: float,
    field,
    psd: SpectralDensity,
    eps: DispersionLaw,
    grid: TorusGrid,
) -> np.ndarray:
    """
    V_p(t) for an array of times, shape (len(times), n, n).

    With b(q) the free phase, c the site-diagonal return amplitude and
    n the number of grid nodes:
    V = lambda^2 S_{ft} [ -psi(-t) c diag(conj b+) - psi(t) conj(c) diag(b-)
                         + psi(-t)/n b- conj(b+)^T + psi(t)/n conj(b+) b-^T ]
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    p = asVector(p, grid.d, "p")
    f = lam**2 * asVector(field, grid.d, "field")
    n = grid.size

    lower, upper = fiberPhases(eps, grid, p, f, times)
    c = np.mean(phaseFactors(eps, grid.points, f, times), axis=-1)
    forward = psd.correlation(times)
    backward = psd.correlation(-times)

    V = (backward / n)[:, None, None] * lower[:, :, None] * np.conj(upper)[:, None, :]
    V += (forward / n)[:, None, None] * np.conj(upper)[:, :, None] * lower[:, None, :]
    diagonal = -(backward * c)[:, None] * np.conj(upper) - (forward * np.conj(c))[:, None] * lower
    V[:, np.arange(n), np.arange(n)] += diagonal

    if np.any(f != 0.0):
        for i, t in enumerate(times):
            V[i] = shiftFunctions(V[i], grid.N, grid.d, f * t)
    return lam**2 * V


def ladderVertex(p, t: float, lam: float, field, psd, eps, grid) -> FiberOperator:
    if t <= 0:
        raise ConfigurationError(f"Vertex time must be positive: {t}")
    matrix = ladderVertexStack(p, [t], lam, field, psd, eps, grid)[0]
    return FiberOperator(asVector(p, grid.d, "p"), matrix, {"t": t, "lambda": lam})


def literalLadderVertex(
    basis: PeriodicFiberBasis, t: float, lam: float, psd: SpectralDensity, eps: DispersionLaw, m=0
) -> FiberOperator:
    """
    sum_x sum_{sides} lambda^2 h(0, t, s1, s2) Pi_x(s2) U_t Pi_x(s1), built as a
    super-operator on the periodic lattice at zero field and cut to fiber m
    """
    if t <= 0:
        raise ConfigurationError(f"Vertex time must be positive: {t}")
    U = evolutionSuper(periodicHamiltonian(eps, basis), t)
    factors = {
        (first, second): lam**2 * hValue(0.0, t, first, second, psd)
        for first, second in product(Side, Side)
    }
    total = np.zeros_like(U)
    for x in basis.sites:
        projector = basis.siteProjector(x)
        actions = {
            Side.LEFT: leftMultiplication(projector),
            Side.RIGHT: rightMultiplication(projector),
        }
        for (first, second), factor in factors.items():
            total += factor * (actions[second] @ U @ actions[first])
    return superOperatorFiber(total, basis, m)


class VertexTable:
    """
    Samples of V_p(t) on an adaptive composite Gauss-Legendre rule over [0, T_cut].

    Panels start at width one and are halved until the integral of V
    changes by at most quad_tol; every M(z) reuses the same samples.
    """

    def __init__(
        self,
        p,
        lam: float,
        field,
        psd: SpectralDensity,
        eps: DispersionLaw,
        grid: TorusGrid,
        T_cut: float = 40.0,
        quad_tol: float = 1e-10,
    ):
        if T_cut <= 0:
            raise ConfigurationError(f"Vertex cut-off must be positive: {T_cut}")
        self.p = asVector(p, grid.d, "p")
        self.field = asVector(field, grid.d, "field")
        self.lam = lam
        self.psd = psd
        self.eps = eps
        self.grid = grid
        self.T_cut = T_cut
        self.quad_tol = quad_tol
        self.tail_constant, self.decay_rate = psd.certify()

        logger.note(f"Tabulating the ladder vertex on [0, {T_cut:g}] for lambda={lam:g}")
        panels = max(1, int(ceil(T_cut)))
        nodes, weights, samples = self._sample(panels)
        integral = np.tensordot(weights, samples, axes=1)
        for level in range(MAX_REFINEMENTS):
            panels *= 2
            fine_nodes, fine_weights, fine_samples = self._sample(panels)
            fine_integral = np.tensordot(fine_weights, fine_samples, axes=1)
            change = float(np.max(np.abs(fine_integral - integral)))
            logger.debug(f"Vertex quadrature with {panels} panels changed by {change:.3e}")
            nodes, weights, samples, integral = fine_nodes, fine_weights, fine_samples, fine_integral
            if change <= quad_tol:
                break
        else:
            logger.error("Vertex time quadrature did not converge")
            raise NumericalError(
                "Ladder vertex quadrature did not reach the tolerance",
                details={"change": change, "quad_tol": quad_tol, "panels": panels},
            )
        self.nodes = nodes
        self.weights = weights
        self.samples = samples
        self.quad_error = change

    def _sample(self, panels: int):
        nodes, weights = compositeGaussLegendre(0.0, self.T_cut, panels, PANEL_ORDER)
        samples = ladderVertexStack(
            self.p, nodes, self.lam, self.field, self.psd, self.eps, self.grid
        )
        return nodes, weights, samples

    @cached_property
    def liouvillian(self) -> FiberOperator:
        return freeLiouvillianFiber(self.p, self.lam, self.field, self.eps, self.grid)

    def tailBound(self, z: complex) -> float:
        return float(
            self.tail_constant
            * self.lam**2
            * np.exp(-(self.decay_rate + np.real(z)) * self.T_cut)
        )

    def checkArgument(self, z: complex) -> None:
        if np.real(z) <= -self.decay_rate / 4.0:
            raise DomainError(
                f"Re z = {np.real(z):.3g} is not above -g_res/4 = {-self.decay_rate / 4.0:.3g}",
                details={"z": complex(z), "g_res": self.decay_rate},
            )
        tail = self.tailBound(z)
        if tail >= TAIL_TOLERANCE:
            logger.error(f"Laplace tail bound {tail:.2e} not met at T_cut={self.T_cut:g}")
            raise ConfigurationError(
                "T_cut too small for the Laplace tail bound",
                details={"tail": tail, "T_cut": self.T_cut, "z": complex(z)},
            )

    def transfer(self, z: complex) -> FiberOperator:
        """M(z) = int_0^T_cut e^{-z t} V_p(t) dt"""
        self.checkArgument(z)
        kernel = self.weights * np.exp(-z * self.nodes)
        matrix = np.tensordot(kernel, self.samples, axes=1)
        return FiberOperator(
            self.p,
            matrix,
            {"z": complex(z), "lambda": self.lam, "quad_error": self.quad_error},
        )

    def derivative(self, z: complex) -> np.ndarray:
        """M'(z) = -int_0^T_cut t e^{-z t} V_p(t) dt"""
        self.checkArgument(z)
        kernel = -self.weights * self.nodes * np.exp(-z * self.nodes)
        return np.tensordot(kernel, self.samples, axes=1)


def offsetDistribution(L: int) -> Tuple[np.ndarray, np.ndarray]:
    """Two-sided geometric proposal on offsets -L/2 < r <= L/2"""
    offsets = np.arange(-L // 2 + 1, L // 2 + 1)
    probabilities = OFFSET_RATIO ** np.abs(offsets)
    return offsets, probabilities / probabilities.sum()


def _siteProjectors(basis: PeriodicFiberBasis, sites: np.ndarray) -> np.ndarray:
    """Momentum-space projectors onto sites, shape (B, n, n)"""
    W = basis.planeWaves
    rows = W[basis.grid.flatIndex(sites)]
    return np.conj(rows)[:, :, None] * rows[:, None, :]


def _batchBlock(
    basis: PeriodicFiberBasis,
    psd: SpectralDensity,
    eps: DispersionLaw,
    t: float,
    lam: float,
    m,
    rng: np.random.Generator,
    samples: int,
) -> np.ndarray:
    d, n = basis.d, basis.size
    energies = eps.evaluate(basis.grid.points)
    lower, upper = basis.fiberPairs(m)

    interior = np.sort(rng.random((samples, 2)) * t, axis=1)
    offsets, probabilities = offsetDistribution(basis.L)
    choice = rng.choice(offsets.size, size=(samples, d), p=probabilities)
    r = offsets[choice]
    proposal = np.prod(probabilities[choice], axis=1)
    importance = (0.5 * t**2) / proposal * n

    times = np.column_stack([np.zeros(samples), interior, np.full(samples, t)])
    gaps = np.diff(times, axis=1)
    difference = energies[:, None] - energies[None, :]
    evolutions = [np.exp(-1j * gaps[:, j, None, None] * difference) for j in range(3)]
    origin = _siteProjectors(basis, np.zeros((samples, d), dtype=int))
    shifted = _siteProjectors(basis, r)

    start = np.zeros((samples, n, n, n), dtype=complex)
    start[:, np.arange(n), lower, upper] = 1.0

    block = np.zeros((samples, n, n), dtype=complex)
    for pairs in IRREDUCIBLE_PAIRINGS_N2:
        partner_of_origin = pairs[0][1]
        projectors = [origin if i in (0, partner_of_origin) else shifted for i in range(4)]

        def descend(step: int, state: np.ndarray, sides: Tuple[Side, ...]):
            if step == 4:
                factor = np.ones(samples, dtype=complex)
                for r_index, s_index in pairs:
                    factor = factor * lam**2 * hRealTime(
                        times[:, r_index], times[:, s_index], sides[r_index], sides[s_index], psd
                    )
                # state[b, j, lower_i, upper_i] -> block[b, i, j]
                outputs = state[:, :, lower, upper]
                block[...] += factor[:, None, None] * np.swapaxes(outputs, 1, 2)
                return
            if step > 0:
                state = state * evolutions[step - 1][:, None, :, :]
            P = projectors[step][:, None, :, :]
            descend(step + 1, P @ state, sides + (Side.LEFT,))
            descend(step + 1, state @ P, sides + (Side.RIGHT,))

        descend(0, start, ())
    return np.mean(importance[:, None, None] * block, axis=0)


def vertexN2Norm(
    basis: PeriodicFiberBasis,
    psd: SpectralDensity,
    eps: DispersionLaw,
    t: float,
    lam: float,
    field=None,
    m=0,
    mc_samples: int = 4000,
    seed: int = 20240601,
    batch_size: int = 250,
) -> Tuple[float, float]:
    """
    Max column sum of the fourth-order irreducible vertex at fiber m, by Monte Carlo.

    The two interior times are uniform on 0 < t_a < t_b < t and the extra
    site offset follows a two-sided geometric proposal; all side
    combinations and both irreducible pairings are summed exactly. Batch b
    draws from Philox keyed by (seed, b).
    """
    if np.any(asVector(field, basis.d, "field") != 0.0):
        raise ConfigurationError("The fourth-order vertex is evaluated at zero field only")
    if t <= 0:
        raise ConfigurationError(f"Vertex time must be positive: {t}")
    if mc_samples < 2:
        raise ConfigurationError(f"Need at least two Monte Carlo samples: {mc_samples}")

    n_batches = max(2, int(ceil(mc_samples / batch_size)))
    per_batch = int(ceil(mc_samples / n_batches))
    logger.note(f"Fourth-order vertex at t={t:g}: {n_batches} batches of {per_batch} samples")

    means: List[np.ndarray] = []
    for batch in range(n_batches):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, batch], dtype=np.uint64)))
        means.append(_batchBlock(basis, psd, eps, t, lam, m, rng, per_batch))

    mean = np.mean(means, axis=0)
    estimate = float(np.max(np.sum(np.abs(mean), axis=0)))
    batch_norms = np.array([np.max(np.sum(np.abs(b), axis=0)) for b in means])
    stderr = float(np.std(batch_norms, ddof=1) / np.sqrt(n_batches))
    if stderr > TOLERANCES.mc_relative_error * estimate:
        logger.error(f"Monte Carlo error {stderr:.3g} too large for estimate {estimate:.3g}")
        raise NumericalError(
            "Too few Monte Carlo samples for the fourth-order vertex",
            details={"estimate": estimate, "stderr": stderr, "samples": mc_samples},
        )
    logger.success(f"Fourth-order vertex norm at t={t:g}: {estimate:.4e} +- {stderr:.1e}")
    return estimate, stderr
