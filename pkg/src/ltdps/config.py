"""Flat ``key = value`` configuration shared by the command-line tools."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .evaluation import SCHEMES, ExperimentConfig
from .exceptions import ConfigError, DomainError
from .rssi import ATHEROS, CISCO, SYMBOL, RssiConfig

ENV_VAR = "LTDPS_CONFIG"
VENDORS = {"cisco": CISCO, "symbol": SYMBOL, "atheros": ATHEROS}


def _opt(default, help, **kw):
    return field(default=default, metadata={"help": help, **kw})


@dataclass(frozen=True)
class Settings:
    seed: int = _opt(0, "master seed for every random stream")
    history_size: int = _opt(10000, "paths in the generated history")
    test_paths: int = _opt(10, "fresh paths scored per experiment")
    path_len_min: int = _opt(3, "shortest generated path")
    path_len_max: int = _opt(6, "longest generated path")
    schemes: tuple = _opt(SCHEMES, "comma-separated schemes to evaluate")
    runs: int = _opt(1, "seeded experiments (seed, seed+1, ...)")
    ap_rows: int = _opt(5, "AP lattice rows")
    ap_cols: int = _opt(5, "AP lattice columns")
    corruption_factor: float = _opt(0.5, "weight of indirect 3-AP counts")
    persistence: float = _opt(0.7, "probability a generated walk keeps its heading")
    lead: float = _opt(0.5, "how far ahead of the region centre the AP choice looks")
    jitter: float = _opt(0.3, "uniform jitter on the AP choice point")
    avoid_center: bool = _opt(False, "halve the weight of inner regions in generated walks")
    vendor: str = _opt("cisco", "RSSI scale: cisco (100), symbol (31) or atheros (60)")
    delta_e: int = _opt(5, "RSSI error factor")
    delta_t: int = _opt(1, "sampling interval in ticks")
    lv_mv_bound: int | None = _opt(None, "LV/MV boundary (default: a third of the scale)")
    mv_hv_bound: int | None = _opt(None, "MV/HV boundary (default: two thirds of the scale)")
    region_threshold: int | None = _opt(None, "reading counted as 'in range' (default: lv_mv_bound)")
    noise_amplitude: int = _opt(0, "uniform noise on synthetic readings")
    falloff_range: float = _opt(1.5, "distance at which synthetic RSSI reaches zero")
    history_file: str = _opt("history.txt", "path-history file")
    output_dir: str = _opt("results", "directory for report CSVs")
    cipher: str = _opt("substitution", "block cipher: substitution, xor or 3des")

    def __post_init__(self):
        if self.vendor not in VENDORS:
            raise ConfigError(f"vendor must be one of {', '.join(VENDORS)}")
        if self.cipher not in ("substitution", "xor", "3des"):
            raise ConfigError("cipher must be substitution, xor or 3des")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        self.experiment(self.seed)
        self.rssi_config()

    def experiment(self, seed: int | None = None) -> ExperimentConfig:
        return ExperimentConfig(
            seed=self.seed if seed is None else seed, history_size=self.history_size,
            test_paths=self.test_paths, path_len_range=(self.path_len_min, self.path_len_max),
            schemes=tuple(self.schemes), ap_rows=self.ap_rows, ap_cols=self.ap_cols,
            corruption_factor=self.corruption_factor, persistence=self.persistence,
            lead=self.lead, jitter=self.jitter, avoid_center=self.avoid_center)

    def rssi_config(self) -> RssiConfig:
        over = {k: getattr(self, k) for k in ("lv_mv_bound", "mv_hv_bound", "region_threshold")
                if getattr(self, k) is not None}
        try:
            return RssiConfig.for_scale(VENDORS[self.vendor], delta_e=self.delta_e,
                                        delta_t=self.delta_t, noise_amplitude=self.noise_amplitude,
                                        falloff_range=self.falloff_range, **over)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


FIELDS = {f.name: f for f in fields(Settings)}


def _convert(key: str, raw: str):
    f = FIELDS[key]
    default = f.default
    raw = raw.strip()
    try:
        if key == "schemes":
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if isinstance(default, bool):
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if key in ("lv_mv_bound", "mv_hv_bound", "region_threshold"):
            return None if raw.lower() in ("", "auto", "none") else int(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config(text: str, base: Settings | None = None) -> Settings:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return replace(base or Settings(), **values)


def load_config(path=None) -> Settings:
    """Read ``path``, else ``$LTDPS_CONFIG``, else defaults."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return Settings()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)


def with_overrides(settings: Settings, **values) -> Settings:
    """Apply non-None overrides, converting strings like the file parser does."""
    clean = {}
    for k, v in values.items():
        if v is None:
            continue
        if k not in FIELDS:
            raise ConfigError(f"unknown key {k!r}")
        clean[k] = _convert(k, v) if isinstance(v, str) else v
    return replace(settings, **clean)


def describe_keys() -> str:
    lines = ["config keys (file lines are 'key = value'; command-line flags win):"]
    for name, f in FIELDS.items():
        default = f.default
        if isinstance(default, tuple):
            default = ",".join(default)
        elif default is None:
            default = "auto"
        lines.append(f"  {name:<18} {f.metadata['help']} [default: {default}]")
    return "\n".join(lines)
