"""
Diagram Combinatorics
Pairing enumeration, domains, irreducible decomposition and ladder detection
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from classes.Diagram import Diagram, IntervalUnion, Pairing, Path, Triple
from constants.defaults import Side
from utils.errors import ConfigurationError


MAX_ENUMERATION_ORDER = 8


def _pairings(elements: Tuple[int, ...]) -> List[Tuple[Tuple[int, int], ...]]:
    if not elements:
        return [()]
    first, rest = elements[0], elements[1:]
    result = []
    for position, partner in enumerate(rest):
        remaining = rest[:position] + rest[position + 1 :]
        for tail in _pairings(remaining):
            result.append(((first, partner),) + tail)
    return result


def enumeratePairings(n: int) -> List[Pairing]:
    """All (2n-1)!! perfect matchings of 0..2n-1"""
    if n < 0:
        raise ConfigurationError(f"Pairing order must be non-negative: {n}")
    if n > MAX_ENUMERATION_ORDER:
        raise ConfigurationError(
            f"Enumeration is capped at n={MAX_ENUMERATION_ORDER}, got {n}"
        )
    return [Pairing(pairs) for pairs in _pairings(tuple(range(2 * n)))]


def domain(diagram: Diagram) -> IntervalUnion:
    times = diagram.path.times
    return IntervalUnion.fromIntervals((times[r], times[s]) for r, s in diagram.pairing.pairs)


def isIrreducible(diagram: Diagram, interval: Optional[Tuple] = None) -> bool:
    """Irreducible over I iff its domain is the single interval I (default: its own span)"""
    if not diagram.pairing.pairs:
        return False
    times = diagram.path.times
    start, end = interval if interval is not None else (times[0], times[-1])
    return domain(diagram).equals(start, end)


def irreducibleDecomposition(diagram: Diagram) -> List[Diagram]:
    """
    Ordered irreducible parts with pairwise disjoint domains.

    A part closes at index i once no pair opened so far reaches beyond i.
    """
    partner = {}
    for r, s in diagram.pairing.pairs:
        partner[r], partner[s] = s, r

    parts: List[Diagram] = []
    start, reach = 0, -1
    for index in range(len(diagram.path)):
        reach = max(reach, partner[index])
        if reach == index:
            triples = diagram.path.triples[start : index + 1]
            pairs = tuple(
                (r - start, s - start)
                for r, s in diagram.pairing.pairs
                if start <= r <= index
            )
            parts.append(Diagram(Path(triples), Pairing(pairs)))
            start = index + 1
    return parts


def assemble(parts: Sequence[Diagram]) -> Diagram:
    """Inverse of the decomposition: concatenate time-ordered parts"""
    if not parts:
        return Diagram(Path(()), Pairing(()))
    result = parts[0]
    for part in parts[1:]:
        result = result.union(part)
    return result


def isLadder(diagram: Diagram) -> bool:
    """Every irreducible part carries exactly one pair"""
    return all(part.pairing.order == 1 for part in irreducibleDecomposition(diagram))


def randomDiagram(rng: np.random.Generator, n: int, sites: int = 2, span: float = 2.0) -> Diagram:
    """
    n random pairs on a random path in [0, span] over sites 0..sites-1 of a chain
    """
    if n < 1:
        raise ConfigurationError(f"Random diagrams need at least one pair: {n}")
    increments = rng.uniform(0.1, 1.0, 2 * n)
    times = span * np.cumsum(increments) / np.sum(increments)
    sides = rng.integers(0, 2, 2 * n)
    positions = rng.integers(0, sites, 2 * n)
    triples = tuple(
        Triple((int(x),), Side.LEFT if side == 0 else Side.RIGHT, float(t))
        for x, side, t in zip(positions, sides, times)
    )
    order = rng.permutation(2 * n)
    pairs = tuple(sorted((int(min(a, b)), int(max(a, b))) for a, b in zip(order[::2], order[1::2])))
    return Diagram(Path(triples), Pairing(pairs))
