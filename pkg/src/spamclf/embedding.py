"""Vocabulary construction, skip-gram word embeddings, and the two feature
encodings derived from them: mean-pooled document vectors for the classical
models and fixed-length index sequences for the LSTM.

The embedding trainer is skip-gram with negative sampling, written directly
against numpy: every (center, context) pair within the window pushes the
center's input vector toward the context's output vector and away from
negatives drawn from the unigram^0.75 distribution, with a linearly
decaying learning rate. Updates are applied one document at a time so the
inner loop stays vectorized.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DataError

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

MAX_SEQUENCE_LEN = 50


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-id map with ids 0 and 1 reserved for padding and unknowns.

    Real tokens occupy contiguous ids starting at 2, ordered by descending
    training-set frequency (ties broken lexicographically).
    """

    token_to_id: dict[str, int]
    counts: dict[str, int]
    min_freq: int
    pad_id: int = PAD_ID
    unk_id: int = UNK_ID

    @property
    def size(self) -> int:
        """Total id count including the two reserved slots."""
        return len(self.token_to_id) + 2

    def id_for(self, token: str) -> int:
        return self.token_to_id.get(token, self.unk_id)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def tokens_by_id(self) -> list[str]:
        """Tokens ordered by their id (position 0 is id 2)."""
        return sorted(self.token_to_id, key=self.token_to_id.__getitem__)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Dense vectors, one row per vocabulary id (reserved rows included)."""

    vectors: np.ndarray
    dim: int

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dim:
            raise DataError(
                f"embedding matrix shape {self.vectors.shape} does not match dim {self.dim}"
            )


@dataclass(frozen=True)
class Word2VecConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    seed: int = 42

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 1:
            raise DataError("dim, window and negatives must all be >= 1")
        if self.initial_lr <= 0:
            raise DataError("initial_lr must be positive")
        if self.epochs < 0:
            raise DataError("epochs must be >= 0")


def build_vocabulary(train_docs: Sequence[Sequence[str]], min_freq: int) -> Vocabulary:
    """Count tokens over the training docs and keep those at or above
    min_freq, assigning ids 2.. in (-count, token) order.
    """
    if not train_docs:
        raise DataError("cannot build a vocabulary from an empty training set")
    counts = Counter()
    for doc in train_docs:
        counts.update(doc)
    kept = sorted(
        (tok for tok, c in counts.items() if c >= min_freq),
        key=lambda tok: (-counts[tok], tok),
    )
    token_to_id = {tok: i + 2 for i, tok in enumerate(kept)}
    return Vocabulary(token_to_id=token_to_id, counts=dict(counts), min_freq=min_freq)


def _negative_sampling_cdf(vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative unigram^0.75 distribution over real token ids."""
    ids = np.array([vocab.token_to_id[t] for t in vocab.tokens_by_id()], dtype=np.int64)
    weights = np.array(
        [vocab.counts[t] ** 0.75 for t in vocab.tokens_by_id()], dtype=np.float64
    )
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return ids, cdf


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    # -softplus(-x), evaluated without overflow
    return np.minimum(x, 0.0) - np.log1p(np.exp(-np.abs(x)))


def train_word2vec(
    train_docs: Sequence[Sequence[str]],
    config: Word2VecConfig,
    vocab: Vocabulary | None = None,
    on_epoch: Callable[[int, float], None] | None = None,
) -> EmbeddingMatrix:
    """Train skip-gram embeddings on the training split.

    When no vocabulary is supplied one is built from the docs with
    min_freq 1; pass the shared vocabulary explicitly to keep row ids
    aligned with downstream encoders. Rows 0 and 1 (padding / unknown)
    stay zero. `on_epoch` receives (epoch index, mean pair loss) and is
    how callers observe the training curve.
    """
    if not train_docs:
        raise DataError("cannot train embeddings on an empty training set")
    if vocab is None:
        vocab = build_vocabulary(train_docs, min_freq=1)

    encoded = [
        np.array([vocab.token_to_id[t] for t in doc if t in vocab], dtype=np.int64)
        for doc in train_docs
    ]
    # one (center, context) pair per ordered position pair within the window
    doc_pairs = [_window_pairs(doc, config.window) for doc in encoded]
    n_pairs_per_epoch = sum(len(centers) for centers, _ in doc_pairs)
    if n_pairs_per_epoch == 0:
        raise DataError("corpus too small: no (center, context) pair in any document")

    rng = np.random.default_rng(config.seed)
    vocab_size = vocab.size
    vec_in = rng.uniform(-0.5 / config.dim, 0.5 / config.dim, size=(vocab_size, config.dim))
    vec_in[PAD_ID] = 0.0
    vec_in[UNK_ID] = 0.0
    vec_out = np.zeros((vocab_size, config.dim))

    neg_ids, neg_cdf = _negative_sampling_cdf(vocab)
    total_updates = max(1, config.epochs * n_pairs_per_epoch)
    min_lr = config.initial_lr * 1e-4
    step = 0

    # Pairs are processed one document at a time: gradients for a document's
    # pairs are computed against the parameters as of the document start and
    # applied together (np.add.at so repeated rows accumulate exactly).
    for epoch in range(config.epochs):
        epoch_loss = 0.0
        for centers, contexts in doc_pairs:
            n_pairs = len(centers)
            lr = max(min_lr, config.initial_lr * (1.0 - step / total_updates))
            step += n_pairs

            negs = neg_ids[
                np.searchsorted(neg_cdf, rng.random((n_pairs, config.negatives)))
            ]
            # a negative that collides with its pair's positive context is
            # dropped from loss and update (kept in place for determinism)
            live = negs != contexts[:, None]

            v = vec_in[centers]
            u_pos = vec_out[contexts]
            u_neg = vec_out[negs]
            s_pos = np.einsum("pd,pd->p", v, u_pos)
            s_neg = np.einsum("pkd,pd->pk", u_neg, v)
            epoch_loss += -float(_log_sigmoid(s_pos).sum())
            epoch_loss += -float((_log_sigmoid(-s_neg) * live).sum())

            g_pos = _sigmoid(s_pos) - 1.0
            g_neg = _sigmoid(s_neg) * live
            grad_v = g_pos[:, None] * u_pos + np.einsum("pk,pkd->pd", g_neg, u_neg)
            np.add.at(vec_in, centers, -lr * grad_v)
            np.add.at(vec_out, contexts, -lr * g_pos[:, None] * v)
            np.add.at(
                vec_out,
                negs.reshape(-1),
                (-lr * g_neg[:, :, None] * v[:, None, :]).reshape(-1, config.dim),
            )
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss / n_pairs_per_epoch)

    return EmbeddingMatrix(vectors=vec_in, dim=config.dim)


def _window_pairs(doc: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """All ordered (center, context) id pairs within the context radius."""
    centers, contexts = [], []
    for offset in range(1, window + 1):
        if offset >= len(doc):
            break
        earlier, later = doc[:-offset], doc[offset:]
        centers.append(earlier)
        contexts.append(later)
        centers.append(later)
        contexts.append(earlier)
    if not centers:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def embed_document(
    tokens: Sequence[str], vocab: Vocabulary, emb: EmbeddingMatrix
) -> np.ndarray:
    """Mean of the embedding rows of in-vocabulary tokens.

    Out-of-vocabulary tokens are skipped; a document with no known token
    maps to the zero vector (classical models must score any input).
    """
    if emb.vectors.shape[0] != vocab.size:
        raise DataError(
            f"embedding rows ({emb.vectors.shape[0]}) do not match vocabulary size ({vocab.size})"
        )
    ids = [vocab.token_to_id[t] for t in tokens if t in vocab]
    if not ids:
        return np.zeros(emb.dim)
    return emb.vectors[ids].mean(axis=0)


def encode_sequence(
    tokens: Sequence[str], vocab: Vocabulary, max_len: int = MAX_SEQUENCE_LEN
) -> np.ndarray:
    """Map tokens to ids (unknown -> 1), truncate to the first max_len,
    and pad with 0 to exactly max_len positions.
    """
    ids = np.full(max_len, PAD_ID, dtype=np.int64)
    for pos, token in enumerate(tokens[:max_len]):
        ids[pos] = vocab.id_for(token)
    return ids


def save_embedding(path: str, vocab: Vocabulary, emb: EmbeddingMatrix) -> None:
    """Text format: header `w2v <rows> <dim>`, then one `token v1 .. vdim`
    line per row. Reserved rows use the <pad>/<unk> pseudo-tokens. Floats
    are written with 17 significant digits so the round trip is exact.
    """
    if emb.vectors.shape[0] != vocab.size:
        raise DataError("embedding rows do not match vocabulary size")
    names = [PAD_TOKEN, UNK_TOKEN] + vocab.tokens_by_id()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"w2v {emb.vectors.shape[0]} {emb.dim}\n")
        for name, row in zip(names, emb.vectors):
            fh.write(name + " " + " ".join(format(x, ".17g") for x in row) + "\n")


def load_embedding(path: str) -> tuple[list[str], np.ndarray]:
    """Inverse of save_embedding; returns (row tokens, matrix)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "w2v":
            raise DataError(f"{path}: not an embedding file (bad header)")
        rows, dim = int(header[1]), int(header[2])
        names = []
        matrix = np.zeros((rows, dim))
        for i in range(rows):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise DataError(f"{path} row {i}: expected {dim + 1} fields, got {len(parts)}")
            names.append(parts[0])
            matrix[i] = [float(x) for x in parts[1:]]
    return names, matrix
