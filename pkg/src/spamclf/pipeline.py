"""Command implementations behind the CLI: prepare the dataset, train one
of the four models, evaluate an artifact, compare several, and score a
single message. Each function works purely from a RunConfig plus file
paths, so scripts and tests drive them directly.

Output layout under the run directory:

    prepared/   clean.csv train.csv test.csv split_manifest.txt
                vocab_classical.json vocab_lstm.json summary.json config.json
    models/     <kind>.model <kind>.meta.json w2v_train.vec
    logs/       metrics.jsonl
    reports/    <kind>_eval.{json,txt} roc_<kind>.csv loss_curve_lstm.csv
                comparison.{json,txt}
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from . import artifacts as art
from . import classical, evaluation, neural
from .config import RunConfig, save_config
from .corpus import (
    Corpus,
    EmailRecord,
    SplitSpec,
    filter_clean,
    generate_synthetic,
    load_csv,
    save_csv,
    split_indices,
    write_manifest,
)
from .embedding import (
    EmbeddingMatrix,
    Word2VecConfig,
    build_vocabulary,
    embed_document,
    encode_sequence,
    load_embedding,
    save_embedding,
    train_word2vec,
)
from .errors import DataError
from .preprocess import load_stopwords, preprocess_pipeline

DISPLAY_NAMES = {"gnb": "NB", "logreg": "LR", "svm": "SVM", "lstm": "LSTM"}


@dataclass(frozen=True)
class RunPaths:
    out_dir: str

    @property
    def prepared(self): return os.path.join(self.out_dir, "prepared")
    @property
    def models(self): return os.path.join(self.out_dir, "models")
    @property
    def logs(self): return os.path.join(self.out_dir, "logs")
    @property
    def reports(self): return os.path.join(self.out_dir, "reports")
    @property
    def clean_csv(self): return os.path.join(self.prepared, "clean.csv")
    @property
    def train_csv(self): return os.path.join(self.prepared, "train.csv")
    @property
    def test_csv(self): return os.path.join(self.prepared, "test.csv")
    @property
    def manifest(self): return os.path.join(self.prepared, "split_manifest.txt")
    @property
    def vocab_classical(self): return os.path.join(self.prepared, "vocab_classical.json")
    @property
    def vocab_lstm(self): return os.path.join(self.prepared, "vocab_lstm.json")
    @property
    def summary(self): return os.path.join(self.prepared, "summary.json")
    @property
    def config_echo(self): return os.path.join(self.prepared, "config.json")
    @property
    def metrics_log(self): return os.path.join(self.logs, "metrics.jsonl")
    @property
    def w2v_cache(self): return os.path.join(self.models, "w2v_train.vec")

    def model_file(self, kind: str) -> str:
        return os.path.join(self.models, f"{kind}.model")

    def meta_file(self, kind: str) -> str:
        return os.path.join(self.models, f"{kind}.meta.json")


def _tokens_of(corpus: Corpus) -> list[list[str]]:
    # prepared CSVs hold cleaned space-joined tokens
    return [msg.split() for msg in corpus.messages()]


def _load_prepared(paths: RunPaths, which: str) -> Corpus:
    path = paths.train_csv if which == "train" else paths.test_csv
    if not os.path.exists(path):
        raise DataError(f"{path} not found; run `prepare` first")
    return load_csv(path)


# --------------------------------------------------------------------------
# prepare
# --------------------------------------------------------------------------

def run_prepare(config: RunConfig) -> dict:
    """Clean, filter, and split the dataset; write every prepared file.

    Returns the summary dict (total/dropped/split counts).
    """
    paths = RunPaths(config.out_dir)
    for d in (paths.prepared, paths.models, paths.logs, paths.reports):
        os.makedirs(d, exist_ok=True)

    if config.dataset == "synthetic":
        raw = generate_synthetic(
            seed=config.seed,
            n_per_class=config.synthetic.n_per_class,
            overlap=config.synthetic.overlap,
        )
    else:
        raw = load_csv(config.dataset)

    stopwords = load_stopwords(config.stopword_file)
    cleaned = Corpus(
        records=tuple(
            EmailRecord(" ".join(preprocess_pipeline(r.message, stopwords)), r.label)
            for r in raw.records
        )
    )
    report = filter_clean(cleaned, cleaner=str.split)
    clean = report.corpus
    if report.empty:
        raise DataError("no records survived cleaning; cannot prepare an empty corpus")

    spec = SplitSpec(train_fraction=config.train_fraction, seed=config.seed)
    train_idx, test_idx = split_indices(clean, spec)
    train = Corpus(records=tuple(clean.records[i] for i in train_idx))
    test = Corpus(records=tuple(clean.records[i] for i in test_idx))

    save_csv(clean, paths.clean_csv)
    save_csv(train, paths.train_csv)
    save_csv(test, paths.test_csv)
    write_manifest(paths.manifest, train_idx, test_idx)

    train_docs = _tokens_of(train)
    art.save_vocab(build_vocabulary(train_docs, min_freq=1), paths.vocab_classical)
    art.save_vocab(build_vocabulary(train_docs, min_freq=config.lstm.min_freq), paths.vocab_lstm)
    save_config(config, paths.config_echo)

    summary = {
        "total_raw": len(raw),
        "dropped_empty": report.dropped,
        "total_clean": len(clean),
        "train": len(train),
        "test": len(test),
        "class_counts_clean": clean.class_counts,
        "class_counts_train": train.class_counts,
        "class_counts_test": test.class_counts,
    }
    with open(paths.summary, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    pct = 100.0 * config.train_fraction
    print(f"Loaded {len(raw)} records; dropped {report.dropped} empty after cleaning.")
    print(f"{'Subset':<18}{'Samples':>10}{'Percentage':>12}")
    print(f"{'Training Data':<18}{len(train):>10}{pct:>11.0f}%")
    print(f"{'Test Data':<18}{len(test):>10}{100.0 - pct:>11.0f}%")
    print(f"{'Total Clean Data':<18}{len(clean):>10}{100.0:>11.0f}%")
    return summary


# --------------------------------------------------------------------------
# train
# --------------------------------------------------------------------------

def _ensure_w2v(config: RunConfig, docs, vocab, paths: RunPaths, logger) -> EmbeddingMatrix:
    """Train the shared skip-gram embeddings, or reuse the cached matrix if
    its rows still line up with the vocabulary (same prepare output).
    """
    w2v_cfg = Word2VecConfig(
        dim=config.word2vec.dim,
        window=config.word2vec.window,
        negatives=config.word2vec.negatives,
        epochs=config.word2vec.epochs,
        initial_lr=config.word2vec.initial_lr,
        seed=config.seed,
    )
    if os.path.exists(paths.w2v_cache):
        names, matrix = load_embedding(paths.w2v_cache)
        expected = ["<pad>", "<unk>"] + vocab.tokens_by_id()
        if names == expected and matrix.shape == (vocab.size, w2v_cfg.dim):
            return EmbeddingMatrix(vectors=matrix, dim=w2v_cfg.dim)
    start = time.perf_counter()
    emb = train_word2vec(
        docs,
        w2v_cfg,
        vocab=vocab,
        on_epoch=lambda e, loss: logger.log("w2v_epoch", epoch=e + 1, loss=loss),
    )
    logger.log("w2v_done", seconds=time.perf_counter() - start)
    save_embedding(paths.w2v_cache, vocab, emb)
    return emb


def run_train(config: RunConfig, kind: str) -> str:
    """Train one model kind on the prepared train split; returns the
    artifact path. Training wall-clock seconds land in the sidecar meta
    file feeding the comparison table's TT column.
    """
    if kind not in art.MODEL_KINDS:
        raise DataError(f"unknown model kind {kind!r}; expected one of {art.MODEL_KINDS}")
    paths = RunPaths(config.out_dir)
    train = _load_prepared(paths, "train")
    docs = _tokens_of(train)
    ys = train.labels()
    fingerprint = art.dataset_fingerprint(train)
    config_echo = config.to_dict()
    run_id = art.make_run_id(kind, config_echo)
    logger = art.MetricsLogger(paths.metrics_log, run_id)

    if kind == "lstm":
        vocab = art.load_vocab(paths.vocab_lstm)
        seqs = np.stack([encode_sequence(d, vocab, config.lstm.max_len) for d in docs])
        lstm_cfg = neural.LstmConfig(
            embed_dim=config.lstm.embed_dim,
            hidden_dim=config.lstm.hidden_dim,
            max_len=config.lstm.max_len,
            batch_size=config.lstm.batch_size,
            epochs=config.lstm.epochs,
            learning_rate=config.lstm.learning_rate,
            grad_clip=config.lstm.grad_clip,
            seed=config.seed,
        )
        start = time.perf_counter()
        params, train_log = neural.train_lstm(
            seqs,
            ys,
            vocab.size,
            lstm_cfg,
            on_epoch=lambda rec: logger.log(
                "epoch", epoch=rec.epoch, loss=rec.mean_loss, seconds=rec.seconds
            ),
        )
        train_seconds = time.perf_counter() - start
        artifact = art.pack_lstm(params, vocab, config_echo, fingerprint)
        _write_loss_curve(os.path.join(paths.reports, "loss_curve_lstm.csv"), train_log)
    else:
        vocab = art.load_vocab(paths.vocab_classical)
        w2v = _ensure_w2v(config, docs, vocab, paths, logger)
        xs = np.stack([embed_document(d, vocab, w2v) for d in docs])
        start = time.perf_counter()
        if kind == "gnb":
            model = classical.train_gnb(xs, ys)
            artifact = art.pack_gnb(model, w2v, vocab, config_echo, fingerprint)
        elif kind == "logreg":
            model = classical.train_logreg(
                xs, ys,
                l2_lambda=config.logreg.l2_lambda,
                max_iter=config.logreg.max_iter,
                lr=config.logreg.lr,
            )
            artifact = art.pack_logreg(model, w2v, vocab, config_echo, fingerprint)
        else:  # svm
            model = classical.train_linear_svm(
                xs, ys, c=config.svm.c, epochs=config.svm.epochs, seed=config.seed
            )
            artifact = art.pack_svm(model, w2v, vocab, config_echo, fingerprint)
        train_seconds = time.perf_counter() - start

    model_path = paths.model_file(kind)
    art.save_artifact(artifact, model_path)
    with open(paths.meta_file(kind), "w", encoding="utf-8") as fh:
        json.dump({"kind": kind, "train_seconds": train_seconds, "run_id": run_id}, fh)
        fh.write("\n")
    logger.log("train_done", kind=kind, train_seconds=train_seconds)
    print(f"Trained {DISPLAY_NAMES[kind]} in {train_seconds:.3f}s -> {model_path}")
    return model_path


def _write_loss_curve(path: str, train_log: neural.TrainLog) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "seconds"])
        for rec in train_log.records:
            writer.writerow([rec.epoch, format(rec.mean_loss, ".17g"), format(rec.seconds, ".6f")])


# --------------------------------------------------------------------------
# evaluate / compare / predict
# --------------------------------------------------------------------------

def _predict_with_artifact(
    artifact: art.ModelArtifact, tokens: list[list[str]]
) -> tuple[list[int], list[float]]:
    """Run the artifact's model over token lists; returns labels + scores
    (margin, probability, or log-posterior margin depending on the kind).
    """
    preds: list[int] = []
    scores: list[float] = []
    if artifact.kind == "lstm":
        params = art.unpack_lstm(artifact)
        max_len = int(artifact.config.get("lstm", {}).get("max_len", 50))
        for doc in tokens:
            ids = encode_sequence(doc, artifact.vocab, max_len)
            label, prob = neural.predict_lstm(params, ids)[0]
            preds.append(label)
            scores.append(prob)
        return preds, scores

    if artifact.kind == "gnb":
        model, w2v = art.unpack_gnb(artifact)
        predict = lambda x: classical.predict_gnb(model, x)
    elif artifact.kind == "logreg":
        model, w2v = art.unpack_logreg(artifact)
        predict = lambda x: classical.predict_logreg(model, x)
    elif artifact.kind == "svm":
        model, w2v = art.unpack_svm(artifact)
        predict = lambda x: classical.predict_svm(model, x)
    else:
        raise DataError(f"artifact has unknown kind {artifact.kind!r}")
    for doc in tokens:
        label, score = predict(embed_document(doc, artifact.vocab, w2v))
        preds.append(label)
        scores.append(score)
    return preds, scores


def _artifact_tokens(artifact: art.ModelArtifact, corpus: Corpus) -> list[list[str]]:
    """Apply the artifact's training-time preprocessing to raw messages."""
    stopwords = load_stopwords(artifact.config.get("stopword_file"))
    return [preprocess_pipeline(msg, stopwords) for msg in corpus.messages()]


def _read_train_seconds(paths: RunPaths, kind: str) -> float:
    meta_path = paths.meta_file(kind)
    if os.path.exists(meta_path):
        with open(meta_path, encoding="utf-8") as fh:
            return float(json.load(fh).get("train_seconds", 0.0))
    return 0.0


def _evaluate_artifact(
    artifact: art.ModelArtifact, test: Corpus, train_seconds: float
) -> tuple[evaluation.MetricsReport, evaluation.ConfusionMatrix, list[evaluation.ScoredPrediction]]:
    tokens = _artifact_tokens(artifact, test)
    preds, scores = _predict_with_artifact(artifact, tokens)
    truths = test.labels()
    cm = evaluation.confusion(preds, truths)
    report = evaluation.per_class_report(preds, truths)
    scored = [
        evaluation.ScoredPrediction(score=s, truth=int(t)) for s, t in zip(scores, truths)
    ]
    try:
        report.auc = evaluation.roc_auc(scored)
    except DataError:
        report.auc = None  # single-class test set
        report.flags = tuple(sorted(set(report.flags) | {"auc"}))
    report.train_seconds = train_seconds
    return report, cm, scored


def run_evaluate(config: RunConfig, artifact_path: str, test_path: str | None = None) -> evaluation.MetricsReport:
    """Evaluate one artifact on the test split (or any message,label CSV);
    writes the JSON/text reports and the ROC points CSV, prints the text.
    """
    paths = RunPaths(config.out_dir)
    os.makedirs(paths.reports, exist_ok=True)
    artifact = art.load_artifact(artifact_path)
    test = load_csv(test_path) if test_path else _load_prepared(paths, "test")
    if len(test) == 0:
        raise DataError("test set is empty")
    report, cm, scored = _evaluate_artifact(
        artifact, test, _read_train_seconds(paths, artifact.kind)
    )

    doc = evaluation.report_to_dict(report, cm)
    doc["model_kind"] = artifact.kind
    doc["seed"] = artifact.config.get("seed")
    doc["train_dataset_sha256"] = artifact.dataset_sha256
    doc["test_dataset_sha256"] = art.dataset_fingerprint(test)
    json_path = os.path.join(paths.reports, f"{artifact.kind}_eval.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")

    text = evaluation.format_report(report)
    with open(os.path.join(paths.reports, f"{artifact.kind}_eval.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    if report.auc is not None:
        _write_roc_csv(os.path.join(paths.reports, f"roc_{artifact.kind}.csv"), scored)
    print(f"== {DISPLAY_NAMES.get(artifact.kind, artifact.kind)} ==")
    print(text)
    return report


def _write_roc_csv(path: str, scored) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr", "threshold"])
        for fpr, tpr, threshold in evaluation.roc_points(scored):
            writer.writerow([format(fpr, ".17g"), format(tpr, ".17g"), format(threshold, ".17g")])


def run_compare(
    config: RunConfig, artifact_paths: list[str], test_path: str | None = None
) -> list[evaluation.ComparisonRow]:
    """Evaluate several artifacts on one test set and print/write the
    comparison table sorted by accuracy.
    """
    if not artifact_paths:
        raise DataError("compare needs at least one artifact")
    paths = RunPaths(config.out_dir)
    os.makedirs(paths.reports, exist_ok=True)
    test = load_csv(test_path) if test_path else _load_prepared(paths, "test")
    results = []
    for apath in artifact_paths:
        artifact = art.load_artifact(apath)
        report, _, _ = _evaluate_artifact(
            artifact, test, _read_train_seconds(paths, artifact.kind)
        )
        results.append((DISPLAY_NAMES.get(artifact.kind, artifact.kind), report))
    rows = evaluation.compare_models(results)

    text = evaluation.format_comparison(rows)
    with open(os.path.join(paths.reports, "comparison.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    with open(os.path.join(paths.reports, "comparison.json"), "w", encoding="utf-8") as fh:
        json.dump([row.__dict__ for row in rows], fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(text)
    return rows


def run_predict(artifact_path: str, text: str) -> tuple[str, float]:
    """Score one raw message with an artifact's full preprocessing + model."""
    artifact = art.load_artifact(artifact_path)
    stopwords = load_stopwords(artifact.config.get("stopword_file"))
    tokens = preprocess_pipeline(text, stopwords)
    preds, scores = _predict_with_artifact(artifact, [tokens])
    label = "spam" if preds[0] == 1 else "ham"
    print(f"{label} {scores[0]:.9g}")
    return label, scores[0]
