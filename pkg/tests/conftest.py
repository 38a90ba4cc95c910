import numpy as np
import pytest

from spamclf.corpus import Corpus, EmailRecord, SplitSpec, generate_synthetic, stratified_split
from spamclf.embedding import Word2VecConfig, build_vocabulary, embed_document, train_word2vec
from spamclf.preprocess import load_stopwords, preprocess_pipeline


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


def clean_corpus(raw, stopwords):
    """Map raw messages through the preprocessing pipeline, keeping labels."""
    return Corpus(
        records=tuple(
            EmailRecord(" ".join(preprocess_pipeline(r.message, stopwords)), r.label)
            for r in raw.records
        )
    )


@pytest.fixture(scope="session")
def small_split(stopwords):
    """Small fast synthetic split (40/class, short messages) with document
    vectors for classical-model tests: (Xtr, ytr, Xte, yte).
    """
    raw = generate_synthetic(seed=11, n_per_class=40, overlap=0.0, min_tokens=8, max_tokens=16)
    clean = clean_corpus(raw, stopwords)
    train, test = stratified_split(clean, SplitSpec(0.8, 11))
    docs_tr = [m.split() for m in train.messages()]
    docs_te = [m.split() for m in test.messages()]
    vocab = build_vocabulary(docs_tr, min_freq=1)
    emb = train_word2vec(docs_tr, Word2VecConfig(dim=50, epochs=3, seed=11), vocab=vocab)
    xtr = np.stack([embed_document(d, vocab, emb) for d in docs_tr])
    xte = np.stack([embed_document(d, vocab, emb) for d in docs_te])
    return xtr, train.labels(), xte, test.labels()
