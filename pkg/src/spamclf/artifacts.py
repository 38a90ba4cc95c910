"""Model persistence and run logging.

Trained models travel in a single-file container: one JSON header line
(format version, model kind, array manifest, vocabulary snapshot, config
echo, dataset fingerprint, payload checksum) followed by the raw
little-endian float64 array bytes in declared order. The format is
framework-free and bit-exact, so a loaded model predicts identically to
the one that was saved.

Training progress is appended to a local JSONL file, one JSON object per
line, which stands in for a hosted experiment tracker.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .classical import GaussianNbModel, LinearSvmModel, LogRegModel
from .corpus import Corpus
from .embedding import EmbeddingMatrix, Vocabulary
from .errors import DataError
from .neural import LstmParams

FORMAT_VERSION = 1
MODEL_KINDS = ("gnb", "logreg", "svm", "lstm")


@dataclass
class ModelArtifact:
    kind: str
    arrays: dict[str, np.ndarray]  # insertion order is the payload order
    vocab: Vocabulary
    config: dict
    dataset_sha256: str
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DataError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")


def vocab_to_dict(vocab: Vocabulary) -> dict:
    return {
        "min_freq": vocab.min_freq,
        "tokens": vocab.tokens_by_id(),
        "counts": vocab.counts,
    }


def vocab_from_dict(data: dict) -> Vocabulary:
    token_to_id = {tok: i + 2 for i, tok in enumerate(data["tokens"])}
    return Vocabulary(
        token_to_id=token_to_id,
        counts={k: int(v) for k, v in data["counts"].items()},
        min_freq=int(data["min_freq"]),
    )


def save_vocab(vocab: Vocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocab_to_dict(vocab), fh)
        fh.write("\n")


def load_vocab(path: str) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        return vocab_from_dict(json.load(fh))


def dataset_fingerprint(corpus: Corpus) -> str:
    """sha256 over the records in order; identifies the exact training data."""
    hasher = hashlib.sha256()
    for rec in corpus.records:
        hasher.update(rec.message.encode("utf-8"))
        hasher.update(b"\x1f")
        hasher.update(rec.label.encode("utf-8"))
        hasher.update(b"\x1e")
    return hasher.hexdigest()


def save_artifact(artifact: ModelArtifact, path: str) -> None:
    payload = b"".join(
        np.ascontiguousarray(arr, dtype="<f8").tobytes() for arr in artifact.arrays.values()
    )
    header = {
        "format_version": artifact.format_version,
        "kind": artifact.kind,
        "arrays": [
            {"name": name, "shape": list(arr.shape)} for name, arr in artifact.arrays.items()
        ],
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
        "vocab": vocab_to_dict(artifact.vocab),
        "config": artifact.config,
        "dataset_sha256": artifact.dataset_sha256,
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload)


def load_artifact(path: str) -> ModelArtifact:
    if not os.path.exists(path):
        raise DataError(f"model file not found: {path}")
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: not a model container (bad header): {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise DataError(
            f"{path}: unsupported format version {header.get('format_version')!r}"
        )
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        raise DataError(f"{path}: payload checksum mismatch (file corrupted?)")

    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        chunk = payload[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise DataError(f"{path}: payload truncated at array {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise DataError(f"{path}: {len(payload) - offset} unexpected trailing payload bytes")

    return ModelArtifact(
        kind=header["kind"],
        arrays=arrays,
        vocab=vocab_from_dict(header["vocab"]),
        config=header["config"],
        dataset_sha256=header["dataset_sha256"],
    )


# --------------------------------------------------------------------------
# Model <-> artifact packing
# --------------------------------------------------------------------------

def pack_gnb(model: GaussianNbModel, w2v: EmbeddingMatrix, vocab, config, fingerprint) -> ModelArtifact:
    arrays = {
        "class_priors": model.class_priors,
        "means": model.means,
        "variances": model.variances,
        "w2v": w2v.vectors,
    }
    return ModelArtifact("gnb", arrays, vocab, config, fingerprint)


def unpack_gnb(artifact: ModelArtifact) -> tuple[GaussianNbModel, EmbeddingMatrix]:
    a = artifact.arrays
    model = GaussianNbModel(class_priors=a["class_priors"], means=a["means"], variances=a["variances"])
    return model, EmbeddingMatrix(vectors=a["w2v"], dim=a["w2v"].shape[1])


def pack_logreg(model: LogRegModel, w2v: EmbeddingMatrix, vocab, config, fingerprint) -> ModelArtifact:
    arrays = {
        "weights": model.weights,
        "bias": np.asarray(model.bias),
        "w2v": w2v.vectors,
    }
    return ModelArtifact("logreg", arrays, vocab, config, fingerprint)


def unpack_logreg(artifact: ModelArtifact) -> tuple[LogRegModel, EmbeddingMatrix]:
    a = artifact.arrays
    cfg = artifact.config.get("logreg", {})
    model = LogRegModel(
        weights=a["weights"],
        bias=float(a["bias"]),
        l2_lambda=float(cfg.get("l2_lambda", 1e-4)),
        max_iter=int(cfg.get("max_iter", 1000)),
    )
    return model, EmbeddingMatrix(vectors=a["w2v"], dim=a["w2v"].shape[1])


def pack_svm(model: LinearSvmModel, w2v: EmbeddingMatrix, vocab, config, fingerprint) -> ModelArtifact:
    arrays = {
        "weights": model.weights,
        "bias": np.asarray(model.bias),
        "w2v": w2v.vectors,
    }
    return ModelArtifact("svm", arrays, vocab, config, fingerprint)


def unpack_svm(artifact: ModelArtifact) -> tuple[LinearSvmModel, EmbeddingMatrix]:
    a = artifact.arrays
    cfg = artifact.config.get("svm", {})
    model = LinearSvmModel(weights=a["weights"], bias=float(a["bias"]), c=float(cfg.get("c", 1.0)))
    return model, EmbeddingMatrix(vectors=a["w2v"], dim=a["w2v"].shape[1])


def pack_lstm(params: LstmParams, vocab, config, fingerprint) -> ModelArtifact:
    arrays = {name: arr for name, arr in params.arrays().items()}
    return ModelArtifact("lstm", arrays, vocab, config, fingerprint)


def unpack_lstm(artifact: ModelArtifact) -> LstmParams:
    a = artifact.arrays
    return LstmParams(
        embedding=a["embedding"],
        w_x=a["w_x"],
        w_h=a["w_h"],
        b=a["b"],
        out_w=a["out_w"],
        out_b=a["out_b"].reshape(()),
    )


# --------------------------------------------------------------------------
# JSONL metrics log
# --------------------------------------------------------------------------

@dataclass
class MetricsLogger:
    """Append-only JSONL log; each call writes one self-contained line."""

    path: str
    run_id: str

    def log(self, event: str, **fields) -> None:
        line = {
            "ts": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "run_id": self.run_id,
            "event": event,
        }
        line.update(fields)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(line, sort_keys=True))
            fh.write("\n")


def make_run_id(kind: str, config: dict) -> str:
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode("utf-8")).hexdigest()
    return f"{kind}-{digest[:12]}"
