"""Mobility-pattern mining over the path history.

Direct (2-AP) and indirect (3-AP) subpath frequencies are counted over the
whole path multiset. A candidate ``b`` reached from ``a`` scores its direct
count plus ``corruption_factor`` times the indirect counts ``a -> v -> b``
through the other candidates ``v``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .exceptions import InvalidPathError, PredictionError
from .grid import DEFAULT_GRID, GridTopology
from .paths import as_path

CORRUPTION_FACTOR = 0.5


@dataclass
class PatternDatabase:
    grid: GridTopology = DEFAULT_GRID
    direct_counts: Counter = field(default_factory=Counter)
    indirect_counts: Counter = field(default_factory=Counter)
    path_count: int = 0

    def record_path(self, path) -> "PatternDatabase":
        """Count every consecutive AP pair and triple. Invalid paths leave the db untouched."""
        path = as_path(path).validate(self.grid, min_len=2)
        aps = path.aps
        self.direct_counts.update(zip(aps, aps[1:]))
        self.indirect_counts.update(zip(aps, aps[1:], aps[2:]))
        self.path_count += 1
        return self

    def record_paths(self, paths: Iterable) -> "PatternDatabase":
        for p in paths:
            self.record_path(p)
        return self

    def direct(self, a: int, b: int) -> int:
        return self.direct_counts.get((a, b), 0)

    def indirect(self, a: int, v: int, b: int) -> int:
        return self.indirect_counts.get((a, v, b), 0)

    @classmethod
    def from_paths(cls, paths: Iterable, grid: GridTopology = DEFAULT_GRID) -> "PatternDatabase":
        return cls(grid).record_paths(paths)


def score_candidate(db: PatternDatabase, from_ap: int, to_ap: int, others=(),
                    corruption_factor: float = CORRUPTION_FACTOR) -> float:
    return db.direct(from_ap, to_ap) + corruption_factor * sum(
        db.indirect(from_ap, v, to_ap) for v in others)


def predict_next_ap(db: PatternDatabase, from_ap: int, candidates,
                    corruption_factor: float = CORRUPTION_FACTOR):
    """Return ``(ap, rank_table)``; rank_table is ``[(ap, score), ...]`` best first.

    One candidate is returned as is, two are compared on direct counts only,
    three or more on the full score. Ties go to the lower AP id.
    """
    cands = sorted(set(candidates))
    if not cands:
        raise PredictionError(f"empty candidate set from AP{from_ap}")
    if len(cands) == 1:
        return cands[0], [(cands[0], float(db.direct(from_ap, cands[0])))]
    if len(cands) == 2:
        scores = {b: float(db.direct(from_ap, b)) for b in cands}
    else:
        scores = {b: score_candidate(db, from_ap, b, [v for v in cands if v != b],
                                     corruption_factor) for b in cands}
    table = sorted(scores.items(), key=lambda t: (-t[1], t[0]))
    return table[0][0], table


@dataclass
class MobilityRule:
    ap: int
    from_region: int
    to_region: int
    predicted_ap: int
    valid: bool | None = None

    def check(self, actual_ap: int) -> bool:
        self.valid = actual_ap == self.predicted_ap
        return self.valid

    def __str__(self):
        tag = "" if self.valid is None else (" (valid)" if self.valid else " (invalid)")
        return f"AP{self.ap}:R{self.from_region}→R{self.to_region} | AP{self.predicted_ap}{tag}"


def generate_rule(db: PatternDatabase, ap: int, from_region: int, to_region: int,
                  grid: GridTopology | None = None,
                  corruption_factor: float = CORRUPTION_FACTOR) -> MobilityRule | None:
    grid = grid or db.grid
    if to_region not in grid.adjacent_regions(from_region):
        raise InvalidPathError(f"R{from_region} and R{to_region} are not adjacent")
    cands = grid.candidate_next_aps(ap, to_region)
    if not cands:
        return None
    pred, _ = predict_next_ap(db, ap, cands, corruption_factor)
    return MobilityRule(ap, from_region, to_region, pred)
