"""Accuracy experiment: history, test paths, per-scheme predictions and reports."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .estimators import IgnorantPredictor, LTDPSPredictor, TransitionMatrixPredictor
from .exceptions import ConfigError
from .grid import GridTopology
from .paths import MobilePath, gen_history

SCHEMES = ("LTDPS", "TM", "IP")

RESULT_COLUMNS = ["scheme", "path_index", "original_path", "predicted_path",
                  "accuracy_pct", "error_count"]
SUMMARY_COLUMNS = ["scheme", "mean_accuracy", "accuracy_per_path", "max_freq_deviation"]


@dataclass(frozen=True)
class Transition:
    predicted: int
    actual: int
    rank: int

    @property
    def correct(self) -> bool:
        return self.predicted == self.actual

    def token(self) -> str:
        return str(self.predicted) if self.correct else f"{self.predicted}({self.actual},{self.rank})"


@dataclass
class PathResult:
    original: MobilePath
    predicted: list[Transition]

    @property
    def accuracy(self) -> Fraction:
        return path_accuracy(self)

    @property
    def correct(self) -> int:
        return sum(t.correct for t in self.predicted)

    @property
    def errors(self) -> int:
        return len(self.predicted) - self.correct

    @property
    def max_deviation(self) -> int:
        """Worst frequency rank along the path; 1 only when every prediction is right."""
        return max(t.rank for t in self.predicted)

    def predicted_path(self) -> str:
        return "→".join([str(self.original.aps[0])] + [t.token() for t in self.predicted])

    def original_path(self) -> str:
        return "→".join(str(a) for a in self.original.aps)


def path_accuracy(result: PathResult) -> Fraction:
    if not result.predicted:
        raise ValueError("path has no transitions; accuracy undefined")
    return Fraction(result.correct, len(result.predicted))


def as_percent(frac) -> int:
    """Whole percent, halves rounded up."""
    return int(Fraction(frac) * 100 + Fraction(1, 2))


_PRED_TOKEN = re.compile(r"^\s*(\d+)\s*(?:\(\s*(\d+)\s*,\s*(\d+)\s*\))?\s*$")


def parse_predicted_path(text: str) -> tuple[int, list[Transition]]:
    """Parse ``7→1(2, 2)→6→0(1, 2)``: start AP, then pred or pred(actual, rank) per hop."""
    tokens = re.split(r"→|->", text)
    parsed = []
    for tok in tokens:
        m = _PRED_TOKEN.match(tok)
        if m is None:
            raise ValueError(f"bad predicted-path token {tok!r}")
        parsed.append(m.groups())
    start = int(parsed[0][0])
    hops = []
    for pred, actual, rank in parsed[1:]:
        if actual is None:
            hops.append(Transition(int(pred), int(pred), 1))
        else:
            hops.append(Transition(int(pred), int(actual), int(rank)))
    return start, hops


# -- evaluation ---------------------------------------------------------------

def fit_scheme(scheme: str, history, grid: GridTopology, corruption_factor=0.5, rng=None):
    if scheme == "LTDPS":
        return LTDPSPredictor(corruption_factor, grid.ap_rows, grid.ap_cols).fit(history)
    if scheme == "TM":
        return TransitionMatrixPredictor(1, grid.ap_rows, grid.ap_cols).fit(history)
    if scheme == "IP":
        return IgnorantPredictor(rng, grid.ap_rows, grid.ap_cols).fit()
    raise ConfigError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


def _hop(scheme, model, prev_ap, region, actual):
    if scheme == "LTDPS":
        res = model.predict_one(prev_ap, region)
        rank = res.rank_of(actual)
        return Transition(res.predicted_ap, actual, rank if rank else len(res.ranking) + 1)
    if scheme == "TM":
        ranking = model.ranking(prev_ap)
        rank = ranking.index(actual) + 1 if actual in ranking else len(ranking) + 1
        return Transition(ranking[0], actual, rank)
    pred = model.predict_one(prev_ap)
    # IP has no ranking: a miss is charged the size of the uniform candidate pool
    return Transition(pred, actual, 1 if pred == actual else len(model.grid_.ap_neighbors(prev_ap)))


def evaluate_scheme(scheme: str, model, test_set) -> list[PathResult]:
    """Predict every hop of every test path, conditioning on the actual previous AP."""
    results = []
    for path in test_set:
        hops = [_hop(scheme, model, a, g2, b)
                for (a, _), (b, g2) in zip(path.steps, path.steps[1:])]
        results.append(PathResult(path, hops))
    return results


@dataclass
class ExperimentConfig:
    seed: int = 0
    history_size: int = 10000
    test_paths: int = 10
    path_len_range: tuple[int, int] = (3, 6)
    schemes: tuple[str, ...] = SCHEMES
    ap_rows: int = 5
    ap_cols: int = 5
    corruption_factor: float = 0.5
    persistence: float = 0.7
    lead: float = 0.5
    jitter: float = 0.3
    avoid_center: bool = False

    def __post_init__(self):
        if self.history_size < 1 or self.test_paths < 1:
            raise ConfigError("history_size and test_paths must be >= 1")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad or not self.schemes:
            raise ConfigError(f"unknown schemes {bad}; choose from {', '.join(SCHEMES)}")
        lo, hi = self.path_len_range
        if not 2 <= lo <= hi:
            raise ConfigError(f"bad path_len_range {self.path_len_range}")

    @property
    def grid(self) -> GridTopology:
        return GridTopology(self.ap_rows, self.ap_cols)

    def generator_kwargs(self) -> dict:
        return dict(persistence=self.persistence, lead=self.lead, jitter=self.jitter,
                    avoid_center=self.avoid_center)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    test_set: list[MobilePath]
    results: dict[str, list[PathResult]] = field(default_factory=dict)
    history_size: int = 0

    def mean_accuracy(self, scheme: str) -> float:
        rs = self.results[scheme]
        return float(sum(r.accuracy for r in rs) / len(rs))

    def result_rows(self):
        for scheme, rs in self.results.items():
            for k, r in enumerate(rs, start=1):
                yield [scheme, k, r.original_path(), r.predicted_path(),
                       as_percent(r.accuracy), r.errors]

    def summary_rows(self):
        for scheme, rs in self.results.items():
            yield [scheme, f"{100 * self.mean_accuracy(scheme):.4f}",
                   ";".join(str(as_percent(r.accuracy)) for r in rs),
                   ";".join(str(r.max_deviation) for r in rs)]

    def write_csv(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        res_path, sum_path = out / "results.csv", out / "summary.csv"
        with open(res_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# rank: position of the actual AP in the scheme's ranking; "
                     "IP misses are charged the neighbour count\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RESULT_COLUMNS)
            w.writerows(self.result_rows())
        with open(sum_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_COLUMNS)
            w.writerows(self.summary_rows())
        return res_path, sum_path


def run_experiment(cfg: ExperimentConfig, history=None) -> ExperimentReport:
    """Generate history and test set from independent streams, then score each scheme."""
    grid = cfg.grid
    hist_rng, test_rng, ip_rng = (np.random.default_rng(s)
                                  for s in np.random.SeedSequence(cfg.seed).spawn(3))
    if history is None:
        history = gen_history(cfg.history_size, grid, cfg.path_len_range, hist_rng,
                              **cfg.generator_kwargs())
    test_set = gen_history(cfg.test_paths, grid, cfg.path_len_range, test_rng,
                           **cfg.generator_kwargs())
    report = ExperimentReport(cfg, test_set, history_size=len(history))
    for scheme in cfg.schemes:
        model = fit_scheme(scheme, history, grid, cfg.corruption_factor, ip_rng)
        report.results[scheme] = evaluate_scheme(scheme, model, test_set)
    return report
