"""Access-point lattice and the region lattice that surrounds it.

APs sit on an ``ap_rows x ap_cols`` lattice; regions are the
``(ap_rows + 1) x (ap_cols + 1)`` cells whose corners are APs. Both are
numbered row-major from 0. In area coordinates region ``(i, j)`` is the
unit square ``[j, j+1] x [i, i+1]`` and AP ``(r, c)`` sits at ``(c+1, r+1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .exceptions import DomainError, IdentificationError


@dataclass(frozen=True)
class GridTopology:
    ap_rows: int = 5
    ap_cols: int = 5
    _neighbors: tuple = field(init=False, repr=False, compare=False)
    _region_aps: tuple = field(init=False, repr=False, compare=False)
    _region_index: dict = field(init=False, repr=False, compare=False)
    _candidates: tuple = field(init=False, repr=False, compare=False)
    _adjacent: tuple = field(init=False, repr=False, compare=False)
    n_aps: int = field(init=False, repr=False, compare=False)
    n_regions: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # below 2x2 several regions share one AP set and region_of is ambiguous
        if self.ap_rows < 2 or self.ap_cols < 2:
            raise DomainError("grid needs at least two AP rows and two AP columns")
        object.__setattr__(self, "n_aps", self.ap_rows * self.ap_cols)
        object.__setattr__(self, "n_regions", (self.ap_rows + 1) * (self.ap_cols + 1))
        neighbors = tuple(self._moore(a) for a in range(self.n_aps))
        region_aps = tuple(self._corners(g) for g in range(self.n_regions))
        index = {frozenset(aps): g for g, aps in enumerate(region_aps)}
        candidates = tuple(
            tuple(tuple(sorted(set(neighbors[a]) & set(region_aps[g])))
                  for g in range(self.n_regions))
            for a in range(self.n_aps)
        )
        object.__setattr__(self, "_neighbors", neighbors)
        object.__setattr__(self, "_region_aps", region_aps)
        object.__setattr__(self, "_region_index", index)
        object.__setattr__(self, "_candidates", candidates)
        object.__setattr__(self, "_adjacent",
                           tuple(self._region_moore(g) for g in range(self.n_regions)))

    @property
    def region_rows(self) -> int:
        return self.ap_rows + 1

    @property
    def region_cols(self) -> int:
        return self.ap_cols + 1

    @property
    def width(self) -> float:
        return float(self.region_cols)

    @property
    def height(self) -> float:
        return float(self.region_rows)

    # -- lattice helpers ---------------------------------------------------

    def _moore(self, ap):
        r, c = divmod(ap, self.ap_cols)
        return tuple(
            rr * self.ap_cols + cc
            for rr in range(r - 1, r + 2)
            for cc in range(c - 1, c + 2)
            if 0 <= rr < self.ap_rows and 0 <= cc < self.ap_cols and (rr, cc) != (r, c)
        )

    def _corners(self, region):
        i, j = divmod(region, self.region_cols)
        return tuple(
            r * self.ap_cols + c
            for r in (i - 1, i)
            for c in (j - 1, j)
            if 0 <= r < self.ap_rows and 0 <= c < self.ap_cols
        )

    def check_ap(self, ap) -> int:
        if type(ap) is int and 0 <= ap < self.n_aps:
            return ap
        if isinstance(ap, bool) or int(ap) != ap or not 0 <= ap < self.n_aps:
            raise DomainError(f"AP id {ap!r} outside 0..{self.n_aps - 1}")
        return int(ap)

    def check_region(self, region) -> int:
        if type(region) is int and 0 <= region < self.n_regions:
            return region
        if isinstance(region, bool) or int(region) != region or not 0 <= region < self.n_regions:
            raise DomainError(f"region id {region!r} outside 0..{self.n_regions - 1}")
        return int(region)

    def ap_cell(self, ap: int) -> tuple[int, int]:
        return divmod(self.check_ap(ap), self.ap_cols)

    def region_cell(self, region: int) -> tuple[int, int]:
        return divmod(self.check_region(region), self.region_cols)

    def ap_position(self, ap: int) -> tuple[float, float]:
        r, c = self.ap_cell(ap)
        return float(c + 1), float(r + 1)

    def region_center(self, region: int) -> tuple[float, float]:
        i, j = self.region_cell(region)
        return j + 0.5, i + 0.5

    def region_at(self, x: float, y: float) -> int:
        """Region enclosing the point; the far edges belong to the last row/column."""
        if not (0.0 <= x <= self.width and 0.0 <= y <= self.height):
            raise DomainError(f"position ({x}, {y}) outside the {self.width}x{self.height} area")
        j = min(int(x), self.region_cols - 1)
        i = min(int(y), self.region_rows - 1)
        return i * self.region_cols + j

    # -- queries -----------------------------------------------------------

    def ap_neighbors(self, ap: int) -> tuple[int, ...]:
        """APs within one row and one column of ``ap`` (8-connected), ascending."""
        return self._neighbors[self.check_ap(ap)]

    def are_adjacent(self, a: int, b: int) -> bool:
        return self.check_ap(b) in self.ap_neighbors(a)

    def region_aps(self, region: int) -> tuple[int, ...]:
        """APs at the corners of ``region``: 1 for corners, 2 on edges, 4 inside."""
        return self._region_aps[self.check_region(region)]

    def regions_of_ap(self, ap: int) -> tuple[int, ...]:
        r, c = self.ap_cell(ap)
        return tuple(i * self.region_cols + j for i in (r, r + 1) for j in (c, c + 1))

    def region_of(self, aps: Iterable[int]) -> int:
        key = frozenset(aps)
        try:
            return self._region_index[key]
        except KeyError:
            raise IdentificationError(
                f"AP set {sorted(key)} is not the AP set of any region") from None

    def adjacent_regions(self, region: int) -> tuple[int, ...]:
        return self._adjacent[self.check_region(region)]

    def _region_moore(self, region):
        i, j = divmod(region, self.region_cols)
        return tuple(
            ii * self.region_cols + jj
            for ii in range(i - 1, i + 2)
            for jj in range(j - 1, j + 2)
            if 0 <= ii < self.region_rows and 0 <= jj < self.region_cols and (ii, jj) != (i, j)
        )

    def candidate_next_aps(self, current: int, next_region: int) -> tuple[int, ...]:
        """Neighbours of ``current`` that are corners of ``next_region`` (the set S)."""
        return self._candidates[self.check_ap(current)][self.check_region(next_region)]


DEFAULT_GRID = GridTopology()
