"""Mobile path prediction server: reports in, reservation and handoff directives out."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .estimators import LTDPSPredictor, PredictionResult
from .exceptions import DomainError, IdentificationError, IndecisiveError, ProtocolError
from .grid import DEFAULT_GRID, GridTopology
from .miner import predict_next_ap
from .paths import MobilePath, append_history
from .reports import RssiReport
from .rssi import RssiConfig, RssiSample
from .security import MsgType, ServerEndpoint, Verdict
from .tracker import (Motion, TrackState, detect_motion, infer_direction, is_ambiguous,
                      locate_region, predict_region, should_handoff)

log = logging.getLogger(__name__)


class DirectiveKind(Enum):
    RESERVE_STAGE1 = "ReserveStage1"
    RESERVE_STAGE2 = "ReserveStage2"
    HANDOFF = "Handoff"
    NONE = "None"


class TrafficClass(Enum):
    DATA = "data"
    VOICE = "voice"
    VIDEO = "video"


BUFFER_UNITS = {TrafficClass.DATA: 1, TrafficClass.VOICE: 4, TrafficClass.VIDEO: 8}


@dataclass(frozen=True)
class Directive:
    kind: DirectiveKind
    mn_id: int
    target_ap: int | None
    traffic_class: TrafficClass = TrafficClass.DATA
    buffer_units: int = 0
    tick: int = 0

    def __str__(self):
        tgt = "-" if self.target_ap is None else f"AP{self.target_ap}"
        return f"t={self.tick} MN{self.mn_id} {self.kind.value} {tgt} {self.traffic_class.value}/{self.buffer_units}"


@dataclass(frozen=True)
class Reservation:
    mn_id: int
    ap: int
    stage: int
    traffic_class: TrafficClass
    buffer_units: int
    tick: int


class ReservationLedger:
    """Active reservations keyed by ``(mn_id, ap)``."""

    def __init__(self):
        self.active: dict[tuple[int, int], Reservation] = {}
        self.released_units = 0

    def reserve(self, mn_id: int, ap: int, stage: int, traffic_class: TrafficClass,
                tick: int = 0) -> Reservation:
        if stage not in (1, 2):
            raise ProtocolError(f"unknown reservation stage {stage}")
        held = self.active.get((mn_id, ap))
        if stage == 2 and held is None:
            raise ProtocolError(f"stage-2 reservation for MN{mn_id} at AP{ap} without stage 1")
        if stage == 1 and held is not None and held.stage == 2:
            raise ProtocolError(f"MN{mn_id} already holds a stage-2 reservation at AP{ap}")
        res = Reservation(mn_id, ap, stage, traffic_class, BUFFER_UNITS[traffic_class], tick)
        self.active[(mn_id, ap)] = res
        return res

    def release(self, mn_id: int, ap: int) -> int:
        res = self.active.pop((mn_id, ap), None)
        if res is None:
            return 0
        self.released_units += res.buffer_units
        return res.buffer_units

    def expire(self, tick: int, timeout: int) -> list[Reservation]:
        stale = [r for r in self.active.values() if tick - r.tick >= timeout]
        for r in stale:
            self.release(r.mn_id, r.ap)
        return stale

    def units_at(self, ap: int) -> int:
        return sum(r.buffer_units for (_, a), r in self.active.items() if a == ap)

    def total_units(self) -> int:
        return sum(r.buffer_units for r in self.active.values())

    def __len__(self):
        return len(self.active)


def reserve(ledger: ReservationLedger, mn_id: int, ap: int, stage: int,
            traffic_class: TrafficClass = TrafficClass.DATA, tick: int = 0) -> ReservationLedger:
    ledger.reserve(mn_id, ap, stage, traffic_class, tick)
    return ledger


@dataclass
class _Session:
    visits: list[tuple[int, int]] = field(default_factory=list)
    target: int | None = None
    stage1_tick: int = 0
    stage2: bool = False
    weak_ticks: int = 0
    traffic_class: TrafficClass = TrafficClass.DATA


class MobilityPredictionServer:
    """Single-threaded event loop over RSSI reports.

    The mined prediction is computed whenever a candidate set exists and is
    used only when the RSSI evidence cannot pick a unique next AP.
    """

    def __init__(self, grid: GridTopology = DEFAULT_GRID, rssi_cfg: RssiConfig = RssiConfig(),
                 predictor: LTDPSPredictor | None = None, history_file=None,
                 traffic_class: TrafficClass = TrafficClass.DATA,
                 reservation_timeout: int = 5, backup_ticks: int = 2,
                 endpoint: ServerEndpoint | None = None):
        self.grid = grid
        self.cfg = rssi_cfg
        if predictor is None:
            predictor = LTDPSPredictor(ap_rows=grid.ap_rows, ap_cols=grid.ap_cols).fit([])
        self.predictor = predictor
        self.history_file = history_file
        self.traffic_class = traffic_class
        self.reservation_timeout = reservation_timeout
        self.backup_ticks = backup_ticks
        self.endpoint = endpoint
        self.ledger = ReservationLedger()
        self.tracks: dict[int, TrackState] = {}
        self.sessions: dict[int, _Session] = {}
        self.predictions: list[tuple[int, int, PredictionResult]] = []
        self.events: list[str] = []
        self.failures = 0

    def _event(self, tick, mn_id, msg):
        line = f"t={tick} MN{mn_id}: {msg}"
        self.events.append(line)
        log.info(line)

    def register(self, mn_id: int, ap: int, region: int, tick: int = 0,
                 sample: RssiSample | None = None,
                 traffic_class: TrafficClass | None = None) -> None:
        self.grid.check_ap(ap)
        if region not in self.grid.regions_of_ap(ap):
            raise DomainError(f"AP{ap} does not cover R{region}")
        self.tracks[mn_id] = TrackState(mn_id, ap, region, sample)
        self.sessions[mn_id] = _Session([(ap, region)],
                                        traffic_class=traffic_class or self.traffic_class)
        self._event(tick, mn_id, f"registered at AP{ap} in R{region}")

    def _directive(self, kind, mn_id, ap, tick, units=0):
        sess = self.sessions[mn_id]
        return Directive(kind, mn_id, ap, sess.traffic_class, units, tick)

    def _choose(self, st: TrackState, cands, sample: RssiSample, use_rssi: bool) -> PredictionResult:
        db = self.predictor.db_
        ap, table = predict_next_ap(db, st.current_ap, cands, self.predictor.corruption_factor)
        mined = PredictionResult(ap, tuple(cands), tuple(table), "mining")
        if len(cands) == 1:
            return PredictionResult(cands[0], tuple(cands), ((cands[0], 1.0),), "tracking")
        if use_rssi:
            vals = sorted(((sample.get(a), a) for a in cands), key=lambda p: (-p[0], p[1]))
            if vals[0][0] > 0 and not is_ambiguous([v for v, _ in vals], self.cfg):
                return PredictionResult(vals[0][1], tuple(cands),
                                        tuple((a, float(v)) for v, a in vals), "tracking")
        return mined

    def handle_report(self, report: RssiReport) -> list[Directive]:
        tick, mn = report.tick, report.mn_id
        for res in self.ledger.expire(tick, self.reservation_timeout):
            self._event(tick, res.mn_id, f"reservation at AP{res.ap} timed out")
            s = self.sessions.get(res.mn_id)
            if s is not None and s.target == res.ap:
                s.target, s.stage2 = None, False

        full = report.sample()
        top = report.sample(top=4)
        st = self.tracks.get(mn)
        if st is None:
            try:
                region, _ = locate_region(top, self.grid, self.cfg)
            except IdentificationError as exc:
                self._event(tick, mn, f"cannot register: {exc}")
                return [Directive(DirectiveKind.NONE, mn, None, self.traffic_class, 0, tick)]
            ap = report.current_ap
            if region not in self.grid.regions_of_ap(ap):
                ap = max(self.grid.region_aps(region), key=lambda a: (full.get(a), -a))
            self.register(mn, ap, region, tick, full)
            return []

        sess = self.sessions[mn]
        sess.weak_ticks = sess.weak_ticks + 1 if full.get(st.current_ap) < self.cfg.delta_e else 0
        if detect_motion(st.last_sample, full, self.cfg) is Motion.STATIONARY \
                and sess.weak_ticks < self.backup_ticks:
            st.motion = Motion.STATIONARY
            st.sample_streak += 1
            st.last_sample = full
            return []
        st.motion, st.sample_streak = Motion.MOVING, 0

        try:
            located, _ = locate_region(top, self.grid, self.cfg)
        except IdentificationError as exc:
            located = None
            self._event(tick, mn, f"region not identified: {exc}")
        entered = located is not None and located != st.current_region

        next_region = located if entered else None
        if next_region is None:
            try:
                next_region = predict_region(st, infer_direction(top, self.cfg), self.grid)
            except IndecisiveError:
                next_region = None

        out: list[Directive] = []
        if next_region is not None:
            cands = self.grid.candidate_next_aps(st.current_ap, next_region)
            if not cands:
                self.failures += 1
                self._event(tick, mn, f"prediction failure: AP{st.current_ap} has no neighbour in R{next_region}")
                st.last_sample = full
                return [self._directive(DirectiveKind.NONE, mn, None, tick)]
        else:
            nb = self.grid.ap_neighbors(st.current_ap)
            cands = tuple(a for a in nb if full.get(a) > 0) or nb
        result = self._choose(st, cands, full, use_rssi=entered)
        self.predictions.append((tick, mn, result))
        target = result.predicted_ap

        units = BUFFER_UNITS[sess.traffic_class]
        if sess.target != target:
            if sess.target is not None:
                self.ledger.release(mn, sess.target)
            self.ledger.reserve(mn, target, 1, sess.traffic_class, tick)
            sess.target, sess.stage1_tick, sess.stage2 = target, tick, False
            out.append(self._directive(DirectiveKind.RESERVE_STAGE1, mn, target, tick, units))
        elif not sess.stage2 and tick > sess.stage1_tick and full.get(target) >= self.cfg.region_threshold:
            self.ledger.reserve(mn, target, 2, sess.traffic_class, tick)
            sess.stage2 = True
            out.append(self._directive(DirectiveKind.RESERVE_STAGE2, mn, target, tick, units))

        fire = entered and should_handoff(st, full, target, self.cfg)
        backup = not fire and sess.weak_ticks >= self.backup_ticks
        if fire or backup:
            if backup:
                self._event(tick, mn, f"backup handoff: AP{st.current_ap} below {self.cfg.delta_e}")
            region = located if located is not None and target in self.grid.region_aps(located) \
                else (next_region if next_region is not None and target in self.grid.region_aps(next_region)
                      else self._region_for(st, target, full))
            out.append(self._directive(DirectiveKind.HANDOFF, mn, target, tick, units))
            self.ledger.release(mn, target)
            st.current_ap, st.current_region = target, region
            sess.visits.append((target, region))
            sess.target, sess.stage2, sess.weak_ticks = None, False, 0
            self._event(tick, mn, f"handoff to AP{target} in R{region}")
        st.last_sample = full
        return out

    def _region_for(self, st, ap, sample):
        # region of ``ap`` adjacent to the current one, best covered by the sample
        options = [g for g in self.grid.regions_of_ap(ap)
                   if g == st.current_region or g in self.grid.adjacent_regions(st.current_region)]
        options = options or list(self.grid.regions_of_ap(ap))
        return max(options, key=lambda g: (sum(sample.get(a) for a in self.grid.region_aps(g)), -g))

    def commit_path(self, mn_id: int) -> MobilePath | None:
        """Store the node's visits as a path; the buffer restarts from the last visit."""
        sess = self.sessions.get(mn_id)
        if sess is None or len(sess.visits) < 2:
            log.warning("MN%s: path shorter than two visits discarded", mn_id)
            if sess is not None:
                sess.visits = sess.visits[-1:]
            return None
        path = MobilePath(tuple(sess.visits))
        try:
            path.validate(self.grid, min_len=2)
        except DomainError as exc:
            log.warning("MN%s: invalid path %s discarded (%s)", mn_id, path, exc)
            sess.visits = sess.visits[-1:]
            return None
        self.predictor.partial_fit([path])
        if self.history_file is not None:
            append_history(self.history_file, path)
        sess.visits = sess.visits[-1:]
        return path

    def handle_packet(self, data: bytes, tick: int = 0) -> tuple[Verdict, list[Directive], list[bytes]]:
        """Authenticated entry point. Returns the verdict, directives and packets to send back.

        An accepted report is answered by an ACK carrying the next nonce, and
        every directive is mirrored to the node as a server message.
        """
        if self.endpoint is None:
            raise ProtocolError("server has no security endpoint configured")
        verdict, pkt = self.endpoint.receive(data)
        if verdict is not Verdict.ACCEPTED:
            mn = pkt.mn_id if pkt is not None else -1
            self._event(tick, mn, f"alarm: {verdict.value} packet dropped")
            return verdict, [], []
        if pkt.msg_type != MsgType.REPORT:
            return verdict, [], []
        try:
            report = RssiReport.decode(pkt.payload, pkt.mn_id, tick)
        except DomainError as exc:
            self._event(tick, pkt.mn_id, f"malformed report: {exc}")
            return Verdict.TAMPERED, [], []
        directives = self.handle_report(report)
        replies = [self.endpoint.make_ack(pkt.mn_id).encode()]
        for d in directives:
            body = f"{d.kind.value} {d.target_ap}".encode()
            replies.append(self.endpoint.send_message(pkt.mn_id, body).encode())
        return verdict, directives, replies


def drive_path(server: MobilityPredictionServer, path: MobilePath, mn_id: int = 0,
               ticks_per_hop: int = 4, start_tick: int = 0,
               rng: np.random.Generator | None = None) -> list[Directive]:
    """Walk a node between the region centres of ``path`` and feed the server its reports.

    The node reports against whichever AP the server last handed it to.
    """
    from .rssi import synthesize_sample

    grid = server.grid
    centres = [grid.region_center(g) for _, g in path]
    out: list[Directive] = []
    tick = start_tick
    for k, (x0, y0) in enumerate(centres):
        x1, y1 = centres[min(k + 1, len(centres) - 1)]
        for s in range(ticks_per_hop if k + 1 < len(centres) else 2):
            f = s / ticks_per_hop if k + 1 < len(centres) else 0.0
            pos = (x0 + f * (x1 - x0), y0 + f * (y1 - y0))
            sample = synthesize_sample(pos, grid, cfg=server.cfg, rng=rng, timestamp=tick, top=5)
            st = server.tracks.get(mn_id)
            ap = st.current_ap if st is not None else path[0][0]
            report = RssiReport.from_readings(mn_id, ap, sample.as_dict(), tick)
            out.extend(server.handle_report(report))
            tick += 1
    return out
