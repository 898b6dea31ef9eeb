"""Location tracking from RSSI samples: region, motion, direction, next region."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .exceptions import IdentificationError, IndecisiveError
from .grid import DEFAULT_GRID, GridTopology
from .rssi import Level, RssiConfig, RssiSample, classify_level, similar


class Motion(Enum):
    STATIONARY = "stationary"
    MOVING = "moving"


@dataclass
class TrackState:
    mn_id: int
    current_ap: int
    current_region: int
    last_sample: RssiSample | None = None
    motion: Motion = Motion.STATIONARY
    sample_streak: int = 0


@dataclass(frozen=True)
class DirectionReading:
    pattern: str  # "MMMM", "LLHH", "LLLH" or "other"
    toward: frozenset = field(default_factory=frozenset)


def locate_region(sample: RssiSample, grid: GridTopology = DEFAULT_GRID,
                  cfg: RssiConfig = RssiConfig()) -> tuple[int, int]:
    """Region from the readings at or above the region threshold, plus the AP to associate with.

    Four strong readings mean an inner region, two an edge region, one a
    corner. Three strong readings are read as an inner region with the fourth
    reading lost.
    """
    if len(sample) == 0:
        raise IdentificationError("empty RSSI sample")
    strong = frozenset(a for a, r in sample.readings if r >= cfg.region_threshold)
    if not strong:
        raise IdentificationError("no reading reaches the region threshold")
    try:
        region = grid.region_of(strong)
    except IdentificationError:
        if len(strong) != 3:
            raise
        matches = [g for g in range(grid.n_regions)
                   if len(grid.region_aps(g)) == 4 and strong <= set(grid.region_aps(g))]
        if not matches:
            raise
        region = matches[0]
    return region, sample.strongest()


def detect_motion(prev: RssiSample | None, cur: RssiSample,
                  cfg: RssiConfig = RssiConfig()) -> Motion:
    if prev is None:
        return Motion.STATIONARY
    p, c = prev.as_dict(), cur.as_dict()
    if set(p) != set(c):
        return Motion.MOVING
    if any(not similar(p[a], c[a], cfg) for a in p):
        return Motion.MOVING
    return Motion.STATIONARY


_PATTERNS = {
    (Level.MV, Level.MV, Level.MV, Level.MV): "MMMM",
    (Level.LV, Level.LV, Level.HV, Level.HV): "LLHH",
    (Level.LV, Level.LV, Level.LV, Level.HV): "LLLH",
}


def infer_direction(sample: RssiSample, cfg: RssiConfig = RssiConfig()) -> DirectionReading:
    levels = {a: classify_level(r, cfg) for a, r in sample.readings}
    key = tuple(sorted(levels.values()))
    pattern = _PATTERNS.get(key, "other")
    if pattern in ("LLHH", "LLLH"):
        return DirectionReading(pattern, frozenset(a for a, lv in levels.items() if lv is Level.HV))
    return DirectionReading(pattern, frozenset())


def predict_region(state: TrackState, reading: DirectionReading,
                   grid: GridTopology = DEFAULT_GRID) -> int:
    """Adjacent region the node is heading for.

    The heading is the vector from the current region centre to the centroid
    of the ``toward`` APs. Among adjacent regions holding the most ``toward``
    APs, the one whose offset is best aligned with the heading wins; ties go
    to the lower region id.
    """
    if not reading.toward:
        raise IndecisiveError("no directional evidence in the sample")
    cx, cy = grid.region_center(state.current_region)
    pts = [grid.ap_position(a) for a in reading.toward]
    hx = sum(p[0] for p in pts) / len(pts) - cx
    hy = sum(p[1] for p in pts) / len(pts) - cy
    norm = math.hypot(hx, hy)
    if norm < 1e-12:
        raise IndecisiveError("evidence is centred on the current region")
    i, j = grid.region_cell(state.current_region)
    best, best_key = None, None
    for g in grid.adjacent_regions(state.current_region):
        held = len(reading.toward & set(grid.region_aps(g)))
        if held == 0:
            continue
        i2, j2 = grid.region_cell(g)
        cos = ((j2 - j) * hx + (i2 - i) * hy) / (math.hypot(j2 - j, i2 - i) * norm)
        if cos <= 0:
            continue
        key = (-held, -round(cos, 12), g)
        if best_key is None or key < best_key:
            best, best_key = g, key
    if best is None:
        raise IndecisiveError("no adjacent region agrees with the evidence")
    return best


def is_ambiguous(readings, cfg: RssiConfig = RssiConfig()) -> bool:
    """True when the two strongest of ``readings`` are within the error factor."""
    vals = sorted(readings, reverse=True)
    return len(vals) >= 2 and similar(vals[0], vals[1], cfg)


def should_handoff(state: TrackState, cur_sample: RssiSample, next_ap: int,
                   cfg: RssiConfig = RssiConfig()) -> bool:
    """Hand off once the next AP reaches the region threshold and the current AP fades.

    Fading means a drop of more than the error factor since the previous
    sample, a weak (LV) reading, or a reading no longer distinguishable from
    the next AP's.
    """
    nxt = cur_sample.get(next_ap)
    if nxt < cfg.region_threshold:
        return False
    cur = cur_sample.get(state.current_ap)
    before = state.last_sample.get(state.current_ap) if state.last_sample else cur
    return (before - cur > cfg.delta_e
            or classify_level(cur, cfg) is Level.LV
            or similar(cur, nxt, cfg))
