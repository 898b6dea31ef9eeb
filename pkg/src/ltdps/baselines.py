"""Comparison predictors: transition-matrix (TM) and ignorant prediction (IP)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .grid import DEFAULT_GRID, GridTopology
from .paths import as_path

log = logging.getLogger(__name__)


@dataclass
class TransitionMatrix:
    counts: np.ndarray
    grid: GridTopology = DEFAULT_GRID

    def ranking(self, current: int) -> list[int]:
        """Neighbours of ``current`` by descending count, ties to the lower id."""
        row = self.counts[self.grid.check_ap(current)]
        return sorted(self.grid.ap_neighbors(current), key=lambda b: (-row[b], b))


def build_tm(history: Iterable, grid: GridTopology = DEFAULT_GRID) -> TransitionMatrix:
    counts = np.zeros((grid.n_aps, grid.n_aps), dtype=np.int64)
    for p in history:
        aps = as_path(p).validate(grid).aps
        if len(aps) > 1:
            np.add.at(counts, (list(aps[:-1]), list(aps[1:])), 1)
    return TransitionMatrix(counts, grid)


def tm_predict(tm: TransitionMatrix, current: int, x: int = 1) -> list[int]:
    """The ``x`` most frequent successors; a never-left AP falls back to its lowest-id neighbour."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if not tm.counts[tm.grid.check_ap(current)].any():
        log.info("TM row for AP%d is empty; falling back to lowest-id neighbour", current)
    return tm.ranking(current)[:x]


def ip_predict(grid: GridTopology, current: int, rng: np.random.Generator) -> int:
    nbrs = grid.ap_neighbors(current)
    return nbrs[int(rng.integers(len(nbrs)))]
