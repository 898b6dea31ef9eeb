"""Discrete mobile paths: the (AP, region) visit sequences LTDPS learns from.

Also holds the path-history text format (one path per line, tokens
``ap(region)`` joined by commas) and the two generators that produce paths:
``gen_region_path`` directly on the lattice and ``trajectory_to_path`` from a
continuous trajectory.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import DomainError, InvalidPathError, PathFormatError
from .grid import DEFAULT_GRID, GridTopology

_TOKEN = re.compile(r"^\s*(\d+)\s*\(\s*(\d+)\s*\)\s*$")


@dataclass(frozen=True)
class MobilePath:
    steps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((int(a), int(g)) for a, g in self.steps))

    @classmethod
    def parse(cls, text: str) -> "MobilePath":
        text = text.strip()
        if not text:
            raise PathFormatError("empty path")
        steps = []
        for tok in text.split(","):
            m = _TOKEN.match(tok)
            if m is None:
                raise PathFormatError(f"bad token {tok.strip()!r}, expected 'ap(region)'")
            steps.append((int(m.group(1)), int(m.group(2))))
        return cls(tuple(steps))

    def __str__(self):
        return ",".join(f"{a}({g})" for a, g in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.steps)

    def __getitem__(self, k):
        return self.steps[k]

    @property
    def aps(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.steps)

    @property
    def regions(self) -> tuple[int, ...]:
        return tuple(g for _, g in self.steps)

    def arrow(self) -> str:
        """Arrow rendering, e.g. ``19(22)→13(15)``."""
        return "→".join(f"{a}({g})" for a, g in self.steps)

    def validate(self, grid: GridTopology = DEFAULT_GRID, min_len: int = 1) -> "MobilePath":
        if len(self.steps) < min_len:
            raise InvalidPathError(f"path {self} shorter than {min_len}")
        for a, g in self.steps:
            try:
                ok = a in grid.region_aps(g)
            except DomainError as exc:
                raise InvalidPathError(str(exc)) from None
            if not ok:
                raise InvalidPathError(f"AP{a} is not a corner of R{g} in {self}")
        for (a, _), (b, _) in zip(self.steps, self.steps[1:]):
            if not grid.are_adjacent(a, b):
                raise InvalidPathError(f"AP{a} -> AP{b} are not grid neighbours in {self}")
        return self

    def is_valid(self, grid: GridTopology = DEFAULT_GRID, min_len: int = 1) -> bool:
        try:
            self.validate(grid, min_len)
        except InvalidPathError:
            return False
        return True


def as_path(obj) -> MobilePath:
    if isinstance(obj, MobilePath):
        return obj
    if isinstance(obj, str):
        return MobilePath.parse(obj)
    return MobilePath(tuple(obj))


# -- history file -----------------------------------------------------------

def parse_history(lines: Iterable[str], grid: GridTopology | None = None) -> list[MobilePath]:
    """Parse history lines, skipping blanks. With ``grid``, each path is also validated."""
    paths = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            p = MobilePath.parse(line)
        except PathFormatError as exc:
            raise PathFormatError(str(exc), lineno) from None
        if grid is not None:
            try:
                p.validate(grid)
            except InvalidPathError as exc:
                raise InvalidPathError(f"line {lineno}: {exc}") from None
        paths.append(p)
    return paths


def read_history(path, grid: GridTopology | None = None) -> list[MobilePath]:
    with open(path, encoding="utf-8") as fh:
        return parse_history(fh, grid)


def write_history(path, paths: Iterable[MobilePath]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in paths:
            fh.write(f"{p}\n")
            n += 1
    return n


def append_history(path, mobile_path: MobilePath) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{mobile_path}\n")


# -- lattice generator -------------------------------------------------------

@lru_cache(maxsize=None)
def _start_pairs(grid: GridTopology):
    return tuple((a, g) for a in range(grid.n_aps) for g in grid.regions_of_ap(a))


def _sign(v):
    return (v > 0) - (v < 0)


def _heading_region(grid, region, heading, options):
    """Keep going straight; at a wall mirror the blocked component (bounce)."""
    i, j = grid.region_cell(region)
    di, dj = heading
    for ci, cj in ((di, dj), (-di if not 0 <= i + di < grid.region_rows else di,
                              -dj if not 0 <= j + dj < grid.region_cols else dj)):
        ni, nj = i + ci, j + cj
        if 0 <= ni < grid.region_rows and 0 <= nj < grid.region_cols:
            g2 = ni * grid.region_cols + nj
            if g2 in options:
                return g2
    return None


def _is_inner(grid, region):
    i, j = grid.region_cell(region)
    return 0 < i < grid.region_rows - 1 and 0 < j < grid.region_cols - 1


def gen_region_path(grid: GridTopology = DEFAULT_GRID, len_range=(3, 6),
                    rng: np.random.Generator | None = None, *,
                    persistence: float = 0.7, lead: float = 0.5, jitter: float = 0.3,
                    avoid_center: bool = False) -> MobilePath:
    """Modified random-waypoint walk over the region lattice.

    The start is uniform over admissible (AP, region) pairs, which makes the
    start AP uniform. Each step keeps the previous region heading with
    probability ``persistence`` (bouncing off the outer wall) and otherwise
    picks uniformly among adjacent regions; ``avoid_center`` halves the weight
    of inner regions. The node then associates with the candidate AP nearest
    its position in the new region: the region centre pushed ``lead`` along the
    move plus uniform ``jitter``. The previous AP is never re-entered directly.
    """
    lo, hi = len_range
    if not 2 <= lo <= hi:
        raise DomainError(f"need 2 <= min <= max for len_range, got {len_range}")
    if rng is None:
        rng = np.random.default_rng()
    length = int(rng.integers(lo, hi + 1))
    pairs = _start_pairs(grid)
    while True:
        a, g = pairs[int(rng.integers(len(pairs)))]
        steps = [(a, g)]
        prev, heading = None, None
        while len(steps) < length:
            options = {}
            for g2 in grid.adjacent_regions(g):
                s = tuple(b for b in grid.candidate_next_aps(a, g2) if b != prev)
                if s:
                    options[g2] = s
            if not options:
                break
            g2 = None
            if heading is not None and rng.random() < persistence:
                g2 = _heading_region(grid, g, heading, options)
            if g2 is None:
                keys = sorted(options)
                if avoid_center:
                    w = np.array([0.5 if _is_inner(grid, k) else 1.0 for k in keys])
                    g2 = keys[int(rng.choice(len(keys), p=w / w.sum()))]
                else:
                    g2 = keys[int(rng.integers(len(keys)))]
            (i, j), (i2, j2) = grid.region_cell(g), grid.region_cell(g2)
            px = j2 + 0.5 + lead * (j2 - j) + rng.uniform(-jitter, jitter)
            py = i2 + 0.5 + lead * (i2 - i) + rng.uniform(-jitter, jitter)

            def dist(b):
                bx, by = grid.ap_position(b)
                return math.hypot(bx - px, by - py), b

            b = min(options[g2], key=dist)
            heading = (_sign(i2 - i), _sign(j2 - j))
            prev, a, g = a, b, g2
            steps.append((a, g))
        if len(steps) == length:
            return MobilePath(tuple(steps))


def gen_history(n: int, grid: GridTopology = DEFAULT_GRID, len_range=(3, 6),
                rng: np.random.Generator | None = None, **kwargs) -> list[MobilePath]:
    if rng is None:
        rng = np.random.default_rng()
    return [gen_region_path(grid, len_range, rng, **kwargs) for _ in range(n)]


# -- continuous trajectory bridge ---------------------------------------------

def nearest_ap_in_region(grid: GridTopology, x: float, y: float) -> tuple[int, int]:
    g = grid.region_at(x, y)

    def dist(b):
        bx, by = grid.ap_position(b)
        return math.hypot(bx - x, by - y), b

    return min(grid.region_aps(g), key=dist), g


def trajectory_to_path(traj: Sequence, grid: GridTopology = DEFAULT_GRID,
                       max_substep: float = 0.1) -> MobilePath:
    """Map sampled positions to (nearest AP in enclosing region, region) visits.

    Consecutive samples associated with the same AP collapse into one visit,
    which keeps the region where that association began. If two successive
    samples land on non-adjacent APs the segment between them is resampled at
    ``max_substep`` spacing.
    """
    if len(traj) == 0:
        raise DomainError("trajectory is empty")
    pts = [(float(s.x), float(s.y)) for s in traj]
    steps = [nearest_ap_in_region(grid, *pts[0])]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        nxt = nearest_ap_in_region(grid, x1, y1)
        if nxt[0] == steps[-1][0]:
            continue
        if grid.are_adjacent(steps[-1][0], nxt[0]):
            steps.append(nxt)
            continue
        n = max(2, math.ceil(math.hypot(x1 - x0, y1 - y0) / max_substep))
        for k in range(1, n + 1):
            f = k / n
            vis = nearest_ap_in_region(grid, x0 + f * (x1 - x0), y0 + f * (y1 - y0))
            if vis[0] != steps[-1][0]:
                steps.append(vis)
    return MobilePath(tuple(steps)).validate(grid)
