"""
Diagram Weights
Pair factor h on the real and imaginary time legs, and the Wick weight of a diagram
"""

from functools import reduce
from operator import mul

import numpy as np

from classes.Diagram import Diagram
from classes.SpectralDensity import SpectralDensity
from constants.defaults import PairOrder, Side
from diagrams.combinatorics import irreducibleDecomposition
from utils.errors import ConfigurationError, DomainError


# real leg: h = sign * psi_hat(orientation * (s - s')), keyed by (side, side')
REAL_TIME_TABLE = {
    (Side.LEFT, Side.LEFT): (-1.0, 1.0),
    (Side.RIGHT, Side.RIGHT): (-1.0, -1.0),
    (Side.RIGHT, Side.LEFT): (1.0, -1.0),
    (Side.LEFT, Side.RIGHT): (1.0, 1.0),
}


def _imaginaryMap(s: float, sign: int) -> complex:
    """m_+ or m_- : identity on the real leg, s -> +-i s on [-beta/2, 0]"""
    if s >= 0:
        return complex(s)
    return sign * 1j * s


def _sidePrefactor(s: float, side: Side) -> complex:
    if s <= 0:
        return 1.0
    return -1j if side is Side.LEFT else 1j


def _checkTime(s: float, beta: float) -> None:
    if s < -0.5 * beta:
        raise DomainError(
            f"Time {s} lies before the imaginary leg start -beta/2",
            details={"time": s, "beta": beta},
        )


def correlationArgument(s, s_prime, side: Side, side_prime: Side, beta: float) -> complex:
    """Argument of psi_hat in h(s, s', side, side'); must lie in 0 <= Im <= beta"""
    s, s_prime = float(s), float(s_prime)
    _checkTime(s, beta)
    _checkTime(s_prime, beta)

    if side is Side.LEFT and side_prime is Side.LEFT:
        argument = _imaginaryMap(s, -1) - _imaginaryMap(s_prime, -1)
    elif side is Side.RIGHT and side_prime is Side.RIGHT:
        argument = _imaginaryMap(s_prime, 1) - _imaginaryMap(s, 1)
    elif side is Side.RIGHT and side_prime is Side.LEFT:
        argument = _imaginaryMap(s_prime, -1) - _imaginaryMap(s, 1)
    elif side is Side.LEFT and side_prime is Side.RIGHT:
        argument = _imaginaryMap(s, -1) - _imaginaryMap(s_prime, 1)
    else:
        raise ConfigurationError(f"Unknown sides: {side}, {side_prime}")

    if argument.imag < -1e-12 * beta or argument.imag > beta * (1 + 1e-12):
        raise DomainError(
            "Pair factor argument leaves the strip 0 <= Im z <= beta",
            details={"s": s, "s_prime": s_prime, "imag": argument.imag, "beta": beta},
        )
    return argument


def hValue(s, s_prime, side: Side, side_prime: Side, psd: SpectralDensity) -> complex:
    """
    Pair factor h(s, s', side, side').

    On the real leg (s, s' >= 0) this is the sign table
    LL -psi_hat(u - v), RR -psi_hat(v - u), RL psi_hat(v - u), LR psi_hat(u - v).
    With an imaginary time the prefactor is sigma(s, side) sigma(s', side').
    """
    argument = correlationArgument(s, s_prime, side, side_prime, psd.beta)
    if float(s) >= 0 and float(s_prime) >= 0:
        prefactor = REAL_TIME_TABLE[(side, side_prime)][0]
    else:
        prefactor = _sidePrefactor(float(s), side) * _sidePrefactor(float(s_prime), side_prime)
    return complex(prefactor * psd.correlation(argument))


def hRealTime(s, s_prime, side: Side, side_prime: Side, psd: SpectralDensity) -> np.ndarray:
    """Vectorised h for arrays of non-negative times"""
    s = np.asarray(s, dtype=float)
    s_prime = np.asarray(s_prime, dtype=float)
    if np.any(s < 0) or np.any(s_prime < 0):
        raise DomainError("hRealTime takes times on the real leg only")
    sign, orientation = REAL_TIME_TABLE[(side, side_prime)]
    return sign * psd.correlation(orientation * (s - s_prime))


def _pairFactor(diagram: Diagram, r: int, s: int, lam: float, psd, order: PairOrder) -> complex:
    first, second = diagram.path.triples[r], diagram.path.triples[s]
    if first.x != second.x:
        return 0.0
    if order is PairOrder.PRINTED:
        h = hValue(first.t, second.t, second.side, first.side, psd)
    elif order is PairOrder.TIME_ORDERED:
        h = hValue(first.t, second.t, first.side, second.side, psd)
    else:
        raise ConfigurationError(f"Unknown pair order: {order}")
    return lam**2 * h


def weight(
    diagram: Diagram,
    lam: float,
    psd: SpectralDensity,
    order: PairOrder = PairOrder.PRINTED,
) -> complex:
    """
    prod over pairs of lambda^2 h(...) delta(x_r, x_s).

    Accumulated part by part over the irreducible decomposition so that the
    weight of a union is the product of the weights of its parts.
    """
    parts = irreducibleDecomposition(diagram)
    factors = [
        reduce(mul, (_pairFactor(part, r, s, lam, psd, order) for r, s in part.pairing.pairs), 1.0 + 0j)
        for part in parts
    ]
    return reduce(mul, factors, 1.0 + 0j)
