"""Predictors with a scikit-learn style interface.

``fit`` takes an iterable of mobile paths (``MobilePath`` objects, path
strings, or sequences of ``(ap, region)`` pairs). ``predict`` takes an
``(n, 2)`` array of ``(current_ap, next_region)`` rows and returns the
predicted next AP per row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from ._validation import check_aps, check_paths, check_transitions
from .baselines import build_tm, ip_predict
from .exceptions import PredictionError
from .grid import GridTopology
from .miner import PatternDatabase, generate_rule, predict_next_ap


@dataclass(frozen=True)
class PredictionResult:
    predicted_ap: int
    candidates: tuple[int, ...]
    ranking: tuple[tuple[int, float], ...]
    method: str  # "tracking" or "mining"

    def rank_of(self, ap: int) -> int | None:
        for k, (b, _) in enumerate(self.ranking, start=1):
            if b == ap:
                return k
        return None


class _PathModel(BaseEstimator):
    def _grid(self):
        return GridTopology(self.ap_rows, self.ap_cols)

    def score(self, X, y):
        """Fraction of rows whose predicted next AP equals ``y``."""
        y = np.asarray(y)
        return float(np.mean(self.predict(X) == y)) if len(y) else float("nan")


class LTDPSPredictor(_PathModel):
    """Region-constrained candidate set S, resolved by mined path frequencies."""

    def __init__(self, corruption_factor=0.5, ap_rows=5, ap_cols=5):
        self.corruption_factor = corruption_factor
        self.ap_rows = ap_rows
        self.ap_cols = ap_cols

    def fit(self, X, y=None):
        self.grid_ = self._grid()
        self.db_ = PatternDatabase(self.grid_)
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        if not hasattr(self, "db_"):
            self.grid_ = self._grid()
            self.db_ = PatternDatabase(self.grid_)
        self.db_.record_paths(check_paths(X, self.grid_))
        self.n_paths_ = self.db_.path_count
        return self

    def predict_one(self, current_ap: int, next_region: int) -> PredictionResult:
        check_is_fitted(self, "db_")
        cands = self.grid_.candidate_next_aps(current_ap, next_region)
        if not cands:
            raise PredictionError(f"AP{current_ap} has no neighbour in R{next_region}")
        ap, table = predict_next_ap(self.db_, current_ap, cands, self.corruption_factor)
        method = "tracking" if len(cands) == 1 else "mining"
        return PredictionResult(ap, cands, tuple(table), method)

    def predict(self, X):
        check_is_fitted(self, "db_")
        X = check_transitions(X, self.grid_)
        return np.array([self.predict_one(int(a), int(g)).predicted_ap for a, g in X],
                        dtype=np.int64)

    def rule(self, ap, from_region, to_region):
        check_is_fitted(self, "db_")
        return generate_rule(self.db_, ap, from_region, to_region, self.grid_,
                             self.corruption_factor)


class TransitionMatrixPredictor(_PathModel):
    """Most frequent historical successor of the current AP; the region is ignored."""

    def __init__(self, n_predictions=1, ap_rows=5, ap_cols=5):
        self.n_predictions = n_predictions
        self.ap_rows = ap_rows
        self.ap_cols = ap_cols

    def fit(self, X, y=None):
        self.grid_ = self._grid()
        self.tm_ = build_tm(check_paths(X, self.grid_, min_len=1), self.grid_)
        return self

    def ranking(self, current_ap: int) -> list[int]:
        check_is_fitted(self, "tm_")
        return self.tm_.ranking(current_ap)

    def predict_one(self, current_ap: int) -> list[int]:
        return self.ranking(current_ap)[: self.n_predictions]

    def predict(self, X):
        check_is_fitted(self, "tm_")
        return np.array([self.ranking(int(a))[0] for a in check_aps(X, self.grid_)],
                        dtype=np.int64)


class IgnorantPredictor(_PathModel):
    """Uniform draw over the current AP's neighbours; history is ignored."""

    def __init__(self, random_state=None, ap_rows=5, ap_cols=5):
        self.random_state = random_state
        self.ap_rows = ap_rows
        self.ap_cols = ap_cols

    def fit(self, X=None, y=None):
        self.grid_ = self._grid()
        rs = self.random_state
        self.rng_ = rs if isinstance(rs, np.random.Generator) else np.random.default_rng(rs)
        return self

    def predict_one(self, current_ap: int) -> int:
        if not hasattr(self, "rng_"):
            raise NotFittedError("IgnorantPredictor is not fitted yet; call fit first")
        return ip_predict(self.grid_, current_ap, self.rng_)

    def predict(self, X):
        check_is_fitted(self, "rng_")
        return np.array([self.predict_one(int(a)) for a in check_aps(X, self.grid_)],
                        dtype=np.int64)
