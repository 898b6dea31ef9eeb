"""Hybrid location-tracking and data-mining mobility prediction for 802.11 networks."""
from .baselines import TransitionMatrix, build_tm, ip_predict, tm_predict
from .estimators import IgnorantPredictor, LTDPSPredictor, PredictionResult, TransitionMatrixPredictor
from .evaluation import ExperimentConfig, ExperimentReport, path_accuracy, run_experiment
from .exceptions import (ConfigError, DomainError, IdentificationError, IndecisiveError,
                         InvalidPathError, LTDPSError, PathFormatError, PredictionError,
                         ProtocolError)
from .grid import DEFAULT_GRID, GridTopology
from .miner import MobilityRule, PatternDatabase, generate_rule, predict_next_ap, score_candidate
from .mpps import Directive, DirectiveKind, MobilityPredictionServer, ReservationLedger, TrafficClass
from .paths import MobilePath, gen_history, gen_region_path, read_history, write_history
from .reports import RssiReport
from .rssi import RssiConfig, RssiSample
from .security import Verdict, compute_mic, run_handshake, verify

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DEFAULT_GRID", "Directive", "DirectiveKind", "DomainError",
    "ExperimentConfig", "ExperimentReport", "GridTopology", "IdentificationError",
    "IgnorantPredictor", "IndecisiveError", "InvalidPathError", "LTDPSError", "LTDPSPredictor",
    "MobilePath", "MobilityPredictionServer", "MobilityRule", "PathFormatError",
    "PatternDatabase", "PredictionError", "PredictionResult", "ProtocolError",
    "ReservationLedger", "RssiConfig", "RssiReport", "RssiSample", "TrafficClass",
    "TransitionMatrix", "TransitionMatrixPredictor", "Verdict", "build_tm", "compute_mic",
    "gen_history", "gen_region_path", "generate_rule", "ip_predict", "path_accuracy",
    "predict_next_ap", "read_history", "run_experiment", "run_handshake", "score_candidate",
    "tm_predict", "verify", "write_history",
]
