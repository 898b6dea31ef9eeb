"""Synthetic RSSI samples and signal-level classification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .exceptions import DomainError
from .grid import DEFAULT_GRID, GridTopology


@dataclass(frozen=True)
class VendorScale:
    rssi_max: int = 100

    def __post_init__(self):
        if not 1 <= self.rssi_max <= 255:
            raise DomainError(f"RSSI_Max must be in 1..255, got {self.rssi_max}")


CISCO = VendorScale(100)
SYMBOL = VendorScale(31)
ATHEROS = VendorScale(60)


class Level(IntEnum):
    LV = 0
    MV = 1
    HV = 2


@dataclass(frozen=True)
class RssiConfig:
    """Tracking knobs. ``region_threshold`` defaults to ``lv_mv_bound``.

    ``falloff_range`` is the distance (in region widths) at which the synthetic
    signal reaches zero; with the default 1.5 a reading at the edge of an AP's
    four regions lands just under the default threshold of 34.
    """
    delta_e: int = 5
    delta_t: int = 1
    lv_mv_bound: int = 34
    mv_hv_bound: int = 67
    region_threshold: int | None = None
    noise_amplitude: int = 0
    falloff_range: float = 1.5
    rssi_max: int = 100

    def __post_init__(self):
        if self.region_threshold is None:
            object.__setattr__(self, "region_threshold", self.lv_mv_bound)
        if not 0 <= self.lv_mv_bound < self.mv_hv_bound <= self.rssi_max:
            raise DomainError("need 0 <= lv_mv_bound < mv_hv_bound <= rssi_max")
        if not 0 <= self.noise_amplitude <= self.delta_e:
            raise DomainError("noise_amplitude must lie in [0, delta_e]")
        if self.delta_e < 0 or self.delta_t < 1 or self.falloff_range <= 0:
            raise DomainError("delta_e >= 0, delta_t >= 1 and falloff_range > 0 required")

    @classmethod
    def for_scale(cls, scale: VendorScale, **overrides) -> "RssiConfig":
        """Tertile thresholds for a vendor's RSSI_Max."""
        m = scale.rssi_max
        kw = dict(lv_mv_bound=math.ceil(m / 3), mv_hv_bound=math.ceil(2 * m / 3), rssi_max=m)
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class RssiSample:
    readings: tuple[tuple[int, int], ...]
    timestamp: int = 0

    def __post_init__(self):
        readings = tuple(sorted(((int(a), int(r)) for a, r in self.readings),
                                key=lambda t: (-t[1], t[0])))
        if len({a for a, _ in readings}) != len(readings):
            raise DomainError("duplicate AP in RSSI sample")
        if any(r < 0 for _, r in readings):
            raise DomainError("negative RSSI reading")
        object.__setattr__(self, "readings", readings)

    @classmethod
    def from_dict(cls, values: dict, timestamp: int = 0) -> "RssiSample":
        return cls(tuple(values.items()), timestamp)

    def as_dict(self) -> dict[int, int]:
        return dict(self.readings)

    @property
    def aps(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.readings)

    def get(self, ap: int, default: int = 0) -> int:
        return self.as_dict().get(ap, default)

    def strongest(self) -> int:
        return self.readings[0][0]

    def __len__(self):
        return len(self.readings)


def coverage_distance(x: float, y: float, ax: float, ay: float) -> float:
    """Chebyshev distance: an AP's footprint is the square of its four regions."""
    return max(abs(x - ax), abs(y - ay))


def synthesize_sample(pos, grid: GridTopology = DEFAULT_GRID,
                      scale: VendorScale = CISCO, cfg: RssiConfig | None = None,
                      rng: np.random.Generator | None = None, timestamp: int = 0,
                      top: int = 4) -> RssiSample:
    """Linear-falloff readings from every AP, noised, clamped, best ``top`` kept."""
    cfg = cfg or RssiConfig.for_scale(scale)
    x, y = pos
    if not (0.0 <= x <= grid.width and 0.0 <= y <= grid.height):
        raise DomainError(f"position {pos} outside the area")
    m = scale.rssi_max
    values = {}
    for ap in range(grid.n_aps):
        ax, ay = grid.ap_position(ap)
        d = coverage_distance(x, y, ax, ay)
        r = round(m * max(0.0, 1.0 - d / cfg.falloff_range))
        if cfg.noise_amplitude and rng is not None:
            r += int(rng.integers(-cfg.noise_amplitude, cfg.noise_amplitude + 1))
        r = min(max(r, 0), m)
        if r > 0:
            values[ap] = r
    best = sorted(values.items(), key=lambda t: (-t[1], t[0]))[:top]
    return RssiSample(tuple(best), timestamp)


def classify_level(value: int, cfg: RssiConfig = RssiConfig()) -> Level:
    if value < cfg.lv_mv_bound:
        return Level.LV
    if value >= cfg.mv_hv_bound:
        return Level.HV
    return Level.MV


def similar(a: int, b: int, cfg: RssiConfig = RssiConfig()) -> bool:
    """Equal within the error factor. Reflexive and symmetric, not transitive."""
    return abs(a - b) <= cfg.delta_e
