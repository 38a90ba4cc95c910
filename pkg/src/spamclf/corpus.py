"""Labeled email corpus: CSV loading, cleaning filter, stratified split,
and a deterministic synthetic-corpus generator used by the test suite
and the bundled benchmark in place of a real dataset.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

HAM = "ham"
SPAM = "spam"
LABELS = (HAM, SPAM)

# Class-flavored token pools for synthetic corpora. Spam-side tokens lean on
# promotional vocabulary, ham-side on everyday work email; the shared pool is
# neutral filler drawn by both classes in proportion to `overlap`. All tokens
# are lowercase a-z and none is a stopword, so they survive preprocessing.
DEFAULT_SPAM_LEXICON = (
    "gratis promo menang hadiah klik diskon bonus uang jutaan transfer "
    "pulsa undian kredit murah penawaran terbatas situs jackpot deposit "
    "instan klaim voucher kuota pemenang raih segera daftar untung cair "
    "langsung"
).split()
DEFAULT_HAM_LEXICON = (
    "rapat laporan jadwal proyek kantor dokumen tugas kuliah dosen materi "
    "presentasi tim kerja catatan agenda diskusi revisi berkas surat "
    "undangan keluarga kabar teman liburan foto makan rumah besok datang "
    "bertemu"
).split()
DEFAULT_SHARED_LEXICON = (
    "halo selamat pagi siang malam email pesan info minggu bulan tahun "
    "nomor alamat jalan kota acara tempat nama balas kirim"
).split()


@dataclass(frozen=True)
class EmailRecord:
    """One message with its binary label ("ham" or "spam")."""

    message: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise DataError(f"label must be one of {LABELS}, got {self.label!r}")


@dataclass(frozen=True)
class Corpus:
    records: tuple[EmailRecord, ...]

    @property
    def class_counts(self) -> dict[str, int]:
        counts = {HAM: 0, SPAM: 0}
        for rec in self.records:
            counts[rec.label] += 1
        return counts

    def __len__(self) -> int:
        return len(self.records)

    def messages(self) -> list[str]:
        return [rec.message for rec in self.records]

    def labels(self) -> np.ndarray:
        """Labels as ints, spam = 1 (the positive class everywhere)."""
        return np.array([1 if r.label == SPAM else 0 for r in self.records])


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )


@dataclass(frozen=True)
class FilterReport:
    """Result of filter_clean: the surviving corpus plus the drop count."""

    corpus: Corpus
    dropped: int

    @property
    def empty(self) -> bool:
        return len(self.corpus) == 0


def _parse_label(raw: str, row: int) -> str:
    label = raw.strip().lower()
    if label not in LABELS:
        raise DataError(f"row {row}: unrecognized label {raw!r} (expected ham/spam)")
    return label


def _find_column(header: Sequence[str], name: str, path: str) -> int:
    hits = [i for i, col in enumerate(header) if col.strip().lower() == name]
    if not hits:
        raise DataError(f"{path}: missing required column {name!r}")
    if len(hits) > 1:
        raise DataError(f"{path}: column {name!r} appears {len(hits)} times")
    return hits[0]


def load_csv(path: str) -> Corpus:
    """Read a labeled corpus from UTF-8 CSV with `message` and `label` columns.

    Column lookup is case-insensitive and extra columns are ignored. Row
    order is preserved. Label strings map case-insensitively to ham/spam;
    anything else is an error naming the offending data row (1-based).
    """
    if not os.path.exists(path):
        raise DataError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        msg_col = _find_column(header, "message", path)
        label_col = _find_column(header, "label", path)
        records = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) <= max(msg_col, label_col):
                raise DataError(f"{path} row {row_num}: expected at least "
                                f"{max(msg_col, label_col) + 1} fields, got {len(row)}")
            records.append(
                EmailRecord(message=row[msg_col], label=_parse_label(row[label_col], row_num))
            )
    return Corpus(records=tuple(records))


def save_csv(corpus: Corpus, path: str) -> None:
    """Write `message,label` CSV that load_csv reads back verbatim."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["message", "label"])
        for rec in corpus.records:
            writer.writerow([rec.message, rec.label])


def filter_clean(corpus: Corpus, cleaner: Callable[[str], list[str]]) -> FilterReport:
    """Drop records whose preprocessed token sequence is empty.

    `cleaner` maps raw text to tokens (normally preprocess_pipeline with a
    stopword list). The dropped records' cleaned text carried no signal
    (URL-only messages, pure punctuation, stopwords only).
    """
    kept = [rec for rec in corpus.records if cleaner(rec.message)]
    dropped = len(corpus) - len(kept)
    report = FilterReport(corpus=Corpus(records=tuple(kept)), dropped=dropped)
    if report.empty:
        logger.warning("filter_clean: no records survived cleaning")
    return report


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def stratified_split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Seeded stratified split preserving per-class proportions.

    Each class contributes round-half-up(train_fraction * class size)
    records to the train side; the remainder goes to test. Membership is
    a pure function of (corpus order, spec.seed).
    """
    train_idx, test_idx = split_indices(corpus, spec)
    train = Corpus(records=tuple(corpus.records[i] for i in train_idx))
    test = Corpus(records=tuple(corpus.records[i] for i in test_idx))
    return train, test


def split_indices(corpus: Corpus, spec: SplitSpec) -> tuple[list[int], list[int]]:
    """Index-level stratified split (what the manifest file records)."""
    rng = np.random.default_rng(spec.seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in LABELS:
        members = [i for i, rec in enumerate(corpus.records) if rec.label == label]
        if len(members) < 2:
            raise DataError(
                f"class {label!r} has {len(members)} record(s); need at least 2 to split"
            )
        order = rng.permutation(len(members))
        n_train = _round_half_up(spec.train_fraction * len(members))
        chosen = [members[j] for j in order]
        train_idx.extend(chosen[:n_train])
        test_idx.extend(chosen[n_train:])
    return sorted(train_idx), sorted(test_idx)


def write_manifest(path: str, train_idx: Sequence[int], test_idx: Sequence[int]) -> None:
    """Audit file: one `subset index` line per record."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# subset index\n")
        for i in train_idx:
            fh.write(f"train {i}\n")
        for i in test_idx:
            fh.write(f"test {i}\n")


def read_manifest(path: str) -> dict[str, list[int]]:
    subsets: dict[str, list[int]] = {"train": [], "test": []}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or parts[0] not in subsets:
                raise DataError(f"{path} line {lineno}: bad manifest entry {line!r}")
            subsets[parts[0]].append(int(parts[1]))
    return subsets


def generate_synthetic(
    seed: int,
    n_per_class: int,
    spam_lexicon: Sequence[str] | None = None,
    ham_lexicon: Sequence[str] | None = None,
    overlap: float = 0.2,
    shared_lexicon: Sequence[str] | None = None,
    min_tokens: int = 40,
    max_tokens: int = 70,
) -> Corpus:
    """Build a two-cluster corpus: each message draws a fraction `overlap`
    of its tokens from a shared neutral pool and the rest from its class
    lexicon. overlap 0 means the classes share no tokens at all. Fully
    deterministic given the seed.

    Default message lengths are email-like (40-70 tokens) so most encoded
    sequences fill the fixed 50-position window the LSTM consumes.
    """
    spam_lexicon = list(spam_lexicon) if spam_lexicon is not None else list(DEFAULT_SPAM_LEXICON)
    ham_lexicon = list(ham_lexicon) if ham_lexicon is not None else list(DEFAULT_HAM_LEXICON)
    shared = list(shared_lexicon) if shared_lexicon is not None else list(DEFAULT_SHARED_LEXICON)
    if not spam_lexicon or not ham_lexicon or not shared:
        raise DataError("lexicons must be non-empty")
    if not 0.0 <= overlap <= 1.0:
        raise DataError(f"overlap must be in [0, 1], got {overlap}")

    rng = np.random.default_rng(seed)
    records = []
    for label, pool in ((HAM, ham_lexicon), (SPAM, spam_lexicon)):
        for _ in range(n_per_class):
            n_tokens = int(rng.integers(min_tokens, max_tokens + 1))
            tokens = []
            for _ in range(n_tokens):
                source = shared if rng.random() < overlap else pool
                tokens.append(source[int(rng.integers(len(source)))])
            records.append(EmailRecord(message=" ".join(tokens), label=label))
    return Corpus(records=tuple(records))
