"""
Combinatorial Bounds
Certified check of the pairing-sum bounds over time simplices, with and without pinned endpoints
"""

from math import factorial
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import gammainc

from diagrams.combinatorics import enumeratePairings
from log.logging import logger
from utils.errors import ConfigurationError, NumericalError
from utils.spectral import gaussLegendre


KernelFn = Callable[[np.ndarray], np.ndarray]

MAX_ORDER = 3
MAX_INTERVAL = 2.0
# highest order still integrated literally over the simplex
LITERAL_ORDER = 2
QUAD_TOL = 1e-11


def defaultKernel(t):
    return np.exp(-np.asarray(t, dtype=float))


def expTail(x: float, n: int) -> float:
    """e^x_n = sum_{j >= n} x^j / j!, with e^x_n = e^x for n <= 0"""
    if n <= 0:
        return float(np.exp(x))
    return float(np.exp(x) * gammainc(n, x))


def _quad(fn, a, b, label: str) -> float:
    result = quad(fn, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200, full_output=1)
    value, error = result[0], result[1]
    if len(result) > 3 or error > 1e-9 * max(1.0, abs(value)):
        logger.error(f"Quadrature for {label} did not converge (error {error:.2e})")
        raise NumericalError(
            f"Quadrature for {label} did not converge",
            details={"value": value, "error": error, "a": a, "b": b},
        )
    return value


def _kernelNorms(k_fn: KernelFn, length: float) -> Tuple[float, float]:
    """(||k||_1, ||k||_inf) on R_+; the sup norm is sampled"""
    l1 = _quad(lambda t: abs(float(k_fn(t))), 0.0, np.inf, "||k||_1")
    samples = np.linspace(0.0, max(50.0, 10.0 * length), 20001)
    sup = float(np.max(np.abs(k_fn(samples))))
    return l1, sup


def _simplexRule(count: int, a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nested Gauss-Legendre rule on a < t_1 < ... < t_count < b"""
    if count == 0:
        return np.zeros((1, 0)), np.ones(1)
    outer_nodes, outer_weights = gaussLegendre(a, b, order)
    points, weights = [], []
    for node, w in zip(outer_nodes, outer_weights):
        inner_points, inner_weights = _simplexRule(count - 1, node, b, order)
        points.append(np.column_stack([np.full(inner_points.shape[0], node), inner_points]))
        weights.append(w * inner_weights)
    return np.vstack(points), np.concatenate(weights)


def pairingSimplexIntegral(
    p: int,
    length: float,
    k_fn: Optional[KernelFn] = None,
    pinned: bool = False,
    order: int = 24,
) -> float:
    """
    sum over pairings of int over the ordered simplex of prod |k(t_s - t_r)|.

    With `pinned` the first and last times sit at the interval ends and only
    the 2p - 2 interior times are integrated.
    """
    if p < 0 or p > LITERAL_ORDER:
        raise ConfigurationError(f"Literal simplex integration supports p <= {LITERAL_ORDER}: {p}")
    if pinned and p == 0:
        raise ConfigurationError("A pinned path needs at least one pair")
    k_fn = k_fn or defaultKernel
    if p == 0:
        return 1.0

    if pinned:
        interior, weights = _simplexRule(2 * p - 2, 0.0, length, order)
        times = np.column_stack(
            [np.zeros(interior.shape[0]), interior, np.full(interior.shape[0], length)]
        )
    else:
        times, weights = _simplexRule(2 * p, 0.0, length, order)

    integrand = np.zeros(times.shape[0])
    for pairing in enumeratePairings(p):
        term = np.ones(times.shape[0])
        for r, s in pairing.pairs:
            term = term * np.abs(k_fn(times[:, s] - times[:, r]))
        integrand += term
    return float(weights @ integrand)


def _closedFormTerm(p: int, F: float, k_end: float, K_end: float, pinned: bool) -> float:
    """Order-p contribution in terms of F = int_0^L K and K(s) = int_0^s |k|"""
    if not pinned:
        return F**p / factorial(p)
    value = k_end * F ** (p - 1) / factorial(p - 1)
    if p >= 2:
        value += K_end**2 * F ** (p - 2) / factorial(p - 2)
    return value


def boundCheckCombi(
    n: int,
    length: float,
    k_fn: Optional[KernelFn] = None,
    pinned: bool = False,
) -> Tuple[float, float, bool]:
    """
    Compare the pairing sum over the interval [0, length] with its exponential bound.

    Unpinned: lhs = sum_{p >= n} F^p / p! = e^F_n against e^{|I| ||k||_1}_n.
    Pinned: lhs = |k(|I|)| e^F_{n-1} + K(|I|)^2 e^F_{n-2} against
    ||k||_inf e^{|I| ||k||_1}_{n-1} + ||k||_1^2 e^{|I| ||k||_1}_{n-2}.
    Orders up to two are cross-checked against literal simplex quadrature.
    """
    if n < (1 if pinned else 0) or n > MAX_ORDER:
        raise ConfigurationError(
            f"Bound order must lie in [{1 if pinned else 0}, {MAX_ORDER}]: {n}"
        )
    if length <= 0 or length > MAX_INTERVAL:
        raise ConfigurationError(f"Interval length must lie in (0, {MAX_INTERVAL}]: {length}")
    k_fn = k_fn or defaultKernel

    def cumulative(s: float) -> float:
        return _quad(lambda t: abs(float(k_fn(t))), 0.0, s, "K(s)")

    F = _quad(cumulative, 0.0, length, "F")
    K_end = cumulative(length)
    k_end = abs(float(k_fn(length)))
    l1, sup = _kernelNorms(k_fn, length)

    for p in range(max(n, 1), LITERAL_ORDER + 1):
        literal = pairingSimplexIntegral(p, length, k_fn, pinned)
        closed = _closedFormTerm(p, F, k_end, K_end, pinned)
        if abs(literal - closed) > 1e-8 * max(abs(closed), 1e-300):
            logger.error(f"Simplex quadrature disagrees with the closed form at p={p}")
            raise NumericalError(
                "Literal simplex integral does not match the series term",
                details={"p": p, "literal": literal, "closed": closed, "pinned": pinned},
            )

    x = length * l1
    if pinned:
        lhs = k_end * expTail(F, n - 1) + K_end**2 * expTail(F, n - 2)
        rhs = sup * expTail(x, n - 1) + l1**2 * expTail(x, n - 2)
    else:
        lhs = expTail(F, n)
        rhs = expTail(x, n)
    ok = bool(lhs <= rhs * (1.0 + 1e-8))
    if ok:
        logger.success(f"Combinatorial bound n={n}, |I|={length:g}, pinned={pinned}: {lhs:.6g} <= {rhs:.6g}")
    else:
        logger.warning(f"Combinatorial bound n={n}, |I|={length:g} violated: {lhs:.6g} > {rhs:.6g}")
    return lhs, rhs, ok
