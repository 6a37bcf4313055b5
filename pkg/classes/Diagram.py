"""
Diagram Types
Triples, time-ordered paths, Wick pairings and their interval domains
"""

from dataclasses import dataclass
from typing import Any, Tuple

from constants.defaults import Side
from utils.errors import ConfigurationError


@dataclass(frozen=True)
class Triple:
    """Interaction at lattice site x on one side of the density matrix at time t"""

    x: Tuple[int, ...]
    side: Side
    t: Any

    def __post_init__(self):
        if not isinstance(self.side, Side):
            raise ConfigurationError(f"Unknown side: {self.side}")


@dataclass(frozen=True)
class Path:
    triples: Tuple[Triple, ...]

    def __post_init__(self):
        times = [triple.t for triple in self.triples]
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ConfigurationError("Path times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.triples)

    @property
    def times(self) -> Tuple[Any, ...]:
        return tuple(triple.t for triple in self.triples)


@dataclass(frozen=True)
class Pairing:
    """Perfect matching on 0..2n-1, every pair stored as (r, s) with r < s"""

    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        seen = []
        for r, s in self.pairs:
            if not r < s:
                raise ConfigurationError(f"Pair ({r}, {s}) violates r < s")
            seen.extend((r, s))
        if sorted(seen) != list(range(len(seen))):
            raise ConfigurationError(f"Pairs do not partition 0..{len(seen) - 1}")

    @property
    def order(self) -> int:
        return len(self.pairs)

    def shifted(self, offset: int) -> "Pairing":
        return Pairing(tuple((r + offset, s + offset) for r, s in self.pairs))


@dataclass(frozen=True)
class Diagram:
    path: Path
    pairing: Pairing

    def __post_init__(self):
        if len(self.path) != 2 * self.pairing.order:
            raise ConfigurationError(
                f"Path of length {len(self.path)} cannot carry {self.pairing.order} pairs"
            )

    def union(self, other: "Diagram") -> "Diagram":
        """Concatenate with a diagram that lies entirely later in time"""
        if len(self.path) and len(other.path) and self.path.times[-1] >= other.path.times[0]:
            raise ConfigurationError("Diagrams to join must be ordered in time")
        path = Path(self.path.triples + other.path.triples)
        pairing = Pairing(self.pairing.pairs + other.pairing.shifted(len(self.path)).pairs)
        return Diagram(path, pairing)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals"""

    intervals: Tuple[Tuple[Any, Any], ...]

    @classmethod
    def fromIntervals(cls, intervals) -> "IntervalUnion":
        merged = []
        for start, end in sorted(intervals):
            if merged and start <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], end))
            else:
                merged.append((start, end))
        return cls(tuple(merged))

    def isSingle(self) -> bool:
        return len(self.intervals) == 1

    def equals(self, start, end) -> bool:
        return self.isSingle() and self.intervals[0] == (start, end)
