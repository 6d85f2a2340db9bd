"""Run configuration: a single JSON file, overridable by CLI flags.

Relative paths resolve against AFFECTINFO_DATA when set, otherwise
against the directory containing the config file. The raw scale is
always explicit (preset name or min/max pair), never inferred.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .lexicon import SCALE_PRESETS, ValenceScale

ENV_DATA_DIR = "AFFECTINFO_DATA"


@dataclass(frozen=True)
class RunConfig:
    lexicon_path: Path
    scale: ValenceScale
    language: str
    output_dir: Path
    raw_dir: Path | None = None
    table_paths: dict[int, Path] = field(default_factory=dict)
    max_context: int = 4
    log_base: float = math.e
    bins: int = 20
    info_bins: int = 10
    resample_size: int = 100_000
    seed: int = 0

    def context_sizes(self) -> list[int]:
        return [n for n in (2, 3, 4) if n <= self.max_context]


def _parse_scale(raw) -> ValenceScale:
    if isinstance(raw, str):
        if raw not in SCALE_PRESETS:
            raise ConfigError(
                f"unknown scale preset {raw!r}; known: {sorted(SCALE_PRESETS)}"
            )
        return SCALE_PRESETS[raw]
    if isinstance(raw, dict) and {"min_raw", "max_raw"} <= raw.keys():
        return ValenceScale(float(raw["min_raw"]), float(raw["max_raw"]))
    raise ConfigError(f"scale must be a preset name or {{min_raw, max_raw}}, got {raw!r}")


def _parse_log_base(raw) -> float:
    if raw in ("e", None):
        return math.e
    try:
        base = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"log_base must be 'e' or a number > 1, got {raw!r}")
    if base <= 1.0:
        raise ConfigError(f"log_base must be > 1, got {base}")
    return base


def load_config(path: Path, overrides: dict | None = None) -> RunConfig:
    """Parse and resolve a config file; ``overrides`` wins over file values."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")

    base_dir = Path(os.environ.get(ENV_DATA_DIR) or path.parent)

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base_dir / p

    overrides = overrides or {}

    lex = data.get("lexicon")
    if not isinstance(lex, dict) or "path" not in lex or "scale" not in lex:
        raise ConfigError("config needs lexicon.path and lexicon.scale")
    corpus_cfg = data.get("corpus")
    if not isinstance(corpus_cfg, dict) or not ({"raw_dir", "tables"} & corpus_cfg.keys()):
        raise ConfigError("config needs corpus.raw_dir or corpus.tables")

    raw_dir = None
    table_paths: dict[int, Path] = {}
    if "raw_dir" in corpus_cfg:
        raw_dir = resolve(corpus_cfg["raw_dir"])
    else:
        for key, value in corpus_cfg["tables"].items():
            try:
                order = int(key)
            except ValueError:
                raise ConfigError(f"corpus.tables keys must be integer orders, got {key!r}")
            table_paths[order] = resolve(value)

    resample = data.get("resample", {})
    max_context = int(overrides.get("max_context", data.get("max_context", 4)))
    if not 1 <= max_context <= 4:
        raise ConfigError(f"max_context must be in 1..4, got {max_context}")

    cfg = RunConfig(
        lexicon_path=resolve(lex["path"]),
        scale=_parse_scale(lex["scale"]),
        language=str(lex.get("language", "")),
        output_dir=resolve(overrides.get("output_dir", data.get("output_dir", "out"))),
        raw_dir=raw_dir,
        table_paths=table_paths,
        max_context=max_context,
        log_base=_parse_log_base(overrides.get("log_base", data.get("log_base", "e"))),
        bins=int(overrides.get("bins", data.get("bins", 20))),
        info_bins=int(data.get("info_bins", 10)),
        resample_size=int(overrides.get("sample_size", resample.get("size", 100_000))),
        seed=int(overrides.get("seed", resample.get("seed", 0))),
    )
    if cfg.bins < 2:
        raise ConfigError(f"bins must be >= 2, got {cfg.bins}")
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Existence and coverage checks; raises ConfigError on the first problem."""
    if not cfg.lexicon_path.is_file():
        raise ConfigError(f"lexicon file {cfg.lexicon_path} does not exist")
    if cfg.raw_dir is not None:
        if not cfg.raw_dir.exists():
            raise ConfigError(f"corpus directory {cfg.raw_dir} does not exist")
    else:
        needed = [1] + cfg.context_sizes()
        missing = [n for n in needed if n not in cfg.table_paths]
        if missing:
            raise ConfigError(
                f"max_context={cfg.max_context} needs tables for orders {needed}, "
                f"missing order(s) {missing}"
            )
        for order, p in sorted(cfg.table_paths.items()):
            if not p.is_file():
                raise ConfigError(f"count table for order {order} missing: {p}")


def config_hash(cfg: RunConfig) -> str:
    """Stable digest of the resolved configuration."""
    payload = {
        "lexicon_path": str(cfg.lexicon_path),
        "scale": [cfg.scale.min_raw, cfg.scale.max_raw],
        "language": cfg.language,
        "raw_dir": str(cfg.raw_dir) if cfg.raw_dir else None,
        "table_paths": {str(k): str(v) for k, v in sorted(cfg.table_paths.items())},
        "max_context": cfg.max_context,
        "log_base": cfg.log_base,
        "bins": cfg.bins,
        "info_bins": cfg.info_bins,
        "resample_size": cfg.resample_size,
        "seed": cfg.seed,
        "output_dir": str(cfg.output_dir),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
