"""RSSI reports sent by a mobile node, and their byte encoding.

Payload layout: ``[cur_ap:1][cur_rssi:1][n:1]`` then ``n`` pairs ``[ap:1][rssi:1]``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exceptions import DomainError
from .rssi import RssiSample

MAX_NEIGHBORS = 4


@dataclass(frozen=True)
class RssiReport:
    mn_id: int
    current_ap: int
    current_rssi: int
    neighbors: tuple[tuple[int, int], ...] = ()
    tick: int = 0

    def __post_init__(self):
        object.__setattr__(self, "neighbors", tuple((int(a), int(r)) for a, r in self.neighbors))
        if len(self.neighbors) > MAX_NEIGHBORS:
            raise DomainError(f"at most {MAX_NEIGHBORS} neighbour readings, got {len(self.neighbors)}")
        for ap, r in ((self.current_ap, self.current_rssi), *self.neighbors):
            if not 0 <= ap <= 255 or not 0 <= r <= 255:
                raise DomainError(f"reading ({ap}, {r}) outside the 0..255 wire range")
        if any(a == self.current_ap for a, _ in self.neighbors):
            raise DomainError("current AP repeated among the neighbours")

    @classmethod
    def from_readings(cls, mn_id: int, current_ap: int, readings: dict[int, int],
                      tick: int = 0) -> "RssiReport":
        """Build a report from a full ``{ap: rssi}`` map; the four strongest others become neighbours."""
        others = sorted(((a, r) for a, r in readings.items() if a != current_ap),
                        key=lambda p: (-p[1], p[0]))[:MAX_NEIGHBORS]
        return cls(mn_id, current_ap, readings.get(current_ap, 0), tuple(others), tick)

    def readings(self) -> dict[int, int]:
        out = dict(self.neighbors)
        out[self.current_ap] = self.current_rssi
        return out

    def sample(self, top: int | None = None) -> RssiSample:
        """Readings as a sample, optionally cut to the ``top`` strongest non-zero ones."""
        s = RssiSample.from_dict({a: r for a, r in self.readings().items() if r > 0}, self.tick)
        if top is not None and len(s) > top:
            s = RssiSample(s.readings[:top], s.timestamp)
        return s

    def encode(self) -> bytes:
        out = bytearray((self.current_ap, self.current_rssi, len(self.neighbors)))
        for a, r in self.neighbors:
            out += bytes((a, r))
        return bytes(out)

    @classmethod
    def decode(cls, payload: bytes, mn_id: int, tick: int = 0) -> "RssiReport":
        if len(payload) < 3 or len(payload) != 3 + 2 * payload[2]:
            raise DomainError("malformed report payload")
        pairs = tuple((payload[k], payload[k + 1]) for k in range(3, len(payload), 2))
        return cls(mn_id, payload[0], payload[1], pairs, tick)
