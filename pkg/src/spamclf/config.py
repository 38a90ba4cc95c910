"""Run configuration: one dataclass tree holding every knob of the
pipeline, serializable to/from a JSON file. CLI flags override file
values, and the resolved config is echoed into artifacts and reports so
a run is reproducible from config plus seed alone.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .errors import DataError


@dataclass
class SyntheticSettings:
    n_per_class: int = 200
    overlap: float = 0.2


@dataclass
class Word2VecSettings:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025


@dataclass
class LogRegSettings:
    lr: float = 0.1
    l2_lambda: float = 1e-4
    max_iter: int = 1000


@dataclass
class SvmSettings:
    c: float = 1.0
    epochs: int = 100


@dataclass
class LstmSettings:
    embed_dim: int = 64
    hidden_dim: int = 64
    max_len: int = 50
    min_freq: int = 2
    batch_size: int = 32
    epochs: int = 30
    learning_rate: float = 1e-3
    grad_clip: float = 5.0


@dataclass
class RunConfig:
    dataset: str = "synthetic"  # "synthetic" or a CSV path
    seed: int = 42
    train_fraction: float = 0.8
    stopword_file: str | None = None  # None -> bundled Indonesian list
    out_dir: str = "runs/latest"
    synthetic: SyntheticSettings = field(default_factory=SyntheticSettings)
    word2vec: Word2VecSettings = field(default_factory=Word2VecSettings)
    logreg: LogRegSettings = field(default_factory=LogRegSettings)
    svm: SvmSettings = field(default_factory=SvmSettings)
    lstm: LstmSettings = field(default_factory=LstmSettings)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data, path="config")


_NESTED = {
    "synthetic": SyntheticSettings,
    "word2vec": Word2VecSettings,
    "logreg": LogRegSettings,
    "svm": SvmSettings,
    "lstm": LstmSettings,
}


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise DataError(f"{path}: expected an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise DataError(f"{path}: unknown keys {sorted(unknown)}; valid keys are {sorted(known)}")
    kwargs = {}
    for key, value in data.items():
        if key in _NESTED and cls is RunConfig:
            kwargs[key] = _build(_NESTED[key], value, path=f"{path}.{key}")
        else:
            kwargs[key] = value
    return cls(**kwargs)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path!r} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def save_config(config: RunConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
