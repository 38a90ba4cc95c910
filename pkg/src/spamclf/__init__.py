"""Spam/ham email classification built from scratch: deterministic text
cleaning, skip-gram word embeddings, three classical classifiers, a
numpy LSTM trained with hand-derived backpropagation through time, and a
full evaluation harness.
"""

from .corpus import Corpus, EmailRecord, SplitSpec, generate_synthetic, load_csv, stratified_split
from .embedding import Vocabulary, Word2VecConfig, build_vocabulary, embed_document, encode_sequence, train_word2vec
from .errors import DataError, NumericError
from .evaluation import ConfusionMatrix, MetricsReport, confusion, per_class_report, roc_auc
from .preprocess import StopwordList, clean_text, load_stopwords, preprocess_pipeline

__all__ = [
    "Corpus",
    "ConfusionMatrix",
    "DataError",
    "EmailRecord",
    "MetricsReport",
    "NumericError",
    "SplitSpec",
    "StopwordList",
    "Vocabulary",
    "Word2VecConfig",
    "build_vocabulary",
    "clean_text",
    "confusion",
    "embed_document",
    "encode_sequence",
    "generate_synthetic",
    "load_csv",
    "load_stopwords",
    "per_class_report",
    "preprocess_pipeline",
    "roc_auc",
    "stratified_split",
    "train_word2vec",
]

__version__ = "0.1.0"
