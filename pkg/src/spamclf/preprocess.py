"""Text cleaning and tokenization for Indonesian email messages.

The cleaning pass runs five steps in a fixed order: lowercase, drop URLs,
drop email attributes (addresses, bare domain-extension tokens, subject
prefixes like ``re:``), strip every character outside a-z and space, and
collapse whitespace. Token-shaped rules run before character filtering
because filtering destroys the ``://`` and ``@`` markers they match on.

The result is a fixed point: cleaning an already-clean string changes
nothing, which the test suite checks property-style.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import DataError

_URL_PREFIXES = ("http://", "https://", "www.")
_SUBJECT_PREFIXES = ("re:", "fw:", "fwd:")
_DOMAIN_EXT_RE = re.compile(r"\.[a-z]{2,4}")
_NON_ALPHA_RE = re.compile(r"[^a-z ]+")

_BUNDLED_STOPWORDS = "stopwords_id.txt"


@dataclass(frozen=True)
class StopwordList:
    """Immutable set of lowercase stopwords plus where it came from."""

    words: frozenset[str]
    source: str = "bundled"

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)


def clean_text(raw: str) -> str:
    """Normalize arbitrary text to lowercase a-z words with single spaces.

    May return the empty string (e.g. for a message that is only a URL).
    """
    lowered = raw.lower()
    kept = []
    for token in lowered.split():
        if token.startswith(_URL_PREFIXES):
            continue
        if "@" in token:
            continue
        if _DOMAIN_EXT_RE.fullmatch(token):
            continue
        if token in _SUBJECT_PREFIXES:
            continue
        kept.append(token)
    filtered = _NON_ALPHA_RE.sub("", " ".join(kept))
    return " ".join(filtered.split())


def tokenize(clean: str) -> list[str]:
    """Split cleaned text on single spaces; empty text gives no tokens."""
    if not clean:
        return []
    return clean.split(" ")


def remove_stopwords(tokens: list[str], stopwords: StopwordList) -> list[str]:
    """Drop stopword tokens, keeping the relative order of the rest."""
    return [t for t in tokens if t not in stopwords]


def preprocess_pipeline(raw: str, stopwords: StopwordList) -> list[str]:
    """Full pipeline: clean, tokenize, remove stopwords."""
    return remove_stopwords(tokenize(clean_text(raw)), stopwords)


def load_stopwords(path: str | None = None) -> StopwordList:
    """Load a stopword file (one lowercase word per line, ``#`` comments).

    With no path, returns the bundled Indonesian list.
    """
    if path is None:
        text = (
            resources.files("spamclf.data")
            .joinpath(_BUNDLED_STOPWORDS)
            .read_text(encoding="utf-8")
        )
        source = "bundled"
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read stopword file {path!r}: {exc}") from exc
        source = path

    words = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        if any(ch.isspace() for ch in word):
            raise DataError(
                f"stopword file {source!r} line {lineno}: entry {word!r} "
                "contains whitespace"
            )
        words.add(word.lower())
    return StopwordList(words=frozenset(words), source=source)
