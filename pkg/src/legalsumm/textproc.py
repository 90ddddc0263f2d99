"""Deterministic text primitives shared by every metric.

Tokenization, legal-aware sentence segmentation, n-gram extraction and
longest-common-subsequence length. Everything here is pure and
reproducible: no stemming, no external models.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from importlib import resources

from .errors import ValidationError

# Characters stripped from token edges. Internal punctuation (e.g. "u.s.",
# "10b-5") is preserved.
_EDGE_PUNCT = string.punctuation + "‘’“”–—"

_TERMINATOR_RE = re.compile(r"[.!?]+")


def count_words(text: str) -> int:
    """Whitespace-delimited word count; the unit for |D|, |S| and chunk sizes."""
    return len(text.split())


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with edge punctuation stripped.

    Standalone punctuation is dropped; numbers are kept as tokens.
    """
    tokens = []
    for raw in text.split():
        tok = raw.strip(_EDGE_PUNCT).lower()
        if tok:
            tokens.append(tok)
    return tokens


def _load_default_abbreviations() -> frozenset[str]:
    data = resources.files("legalsumm.data").joinpath("legal_abbreviations.txt")
    lines = data.read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip().lower() for line in lines if line.strip())


DEFAULT_ABBREVIATIONS = _load_default_abbreviations()


def load_abbreviations(path) -> frozenset[str]:
    """Read a user abbreviation list (one per line) and merge with defaults."""
    with open(path, encoding="utf-8") as fh:
        extra = {line.strip().lower() for line in fh if line.strip()}
    return DEFAULT_ABBREVIATIONS | extra


@dataclass(frozen=True)
class SentenceList:
    """Sentences with character spans into the source text.

    Spans are ordered and non-overlapping; the text between consecutive
    spans is whitespace only, so the segmentation is lossless.
    """

    sentences: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.sentences)


def _word_before(text: str, pos: int) -> str:
    """The whitespace-delimited word that ends at index ``pos`` (exclusive)."""
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:pos]


def split_sentences(text: str, abbreviations: frozenset[str] | None = None) -> SentenceList:
    """Segment text into sentences, respecting legal abbreviations.

    A split happens after a run of ``. ! ?`` followed by whitespace and an
    uppercase letter or digit, unless the preceding word is a known
    abbreviation ("ss.", "No.", "Rs.", ...) or a single-letter initial
    ("V. Ramaswami").
    """
    abbrevs = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    boundaries = []
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        if end >= len(text):
            continue
        # require whitespace then an uppercase letter or digit
        i = end
        while i < len(text) and text[i].isspace():
            i += 1
        if i == end or i >= len(text):
            continue
        if not (text[i].isupper() or text[i].isdigit()):
            continue
        word = _word_before(text, end).strip(_EDGE_PUNCT.replace(".", ""))
        bare = word.rstrip(".")
        if word.lower() in abbrevs:
            continue
        if len(bare) == 1 and bare.isalpha():
            continue  # initials: "A. S. R. Chari"
        if "." in bare:
            continue  # dotted abbreviations: "U.S.", "M.K.", "i.e."
        boundaries.append(end)

    sentences = []
    offsets = []
    prev = 0
    for cut in boundaries + [len(text)]:
        segment = text[prev:cut]
        stripped = segment.strip()
        if stripped:
            start = prev + (len(segment) - len(segment.lstrip()))
            offsets.append((start, start + len(stripped)))
            sentences.append(stripped)
        prev = cut
    return SentenceList(tuple(sentences), tuple(offsets))


def ngrams(tokens, n: int):
    """All n-grams of the sequence, in order, as tuples (multiset semantics)."""
    if n < 1:
        raise ValidationError(f"n-gram order must be >= 1, got {n}")
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def lcs_len(a, b) -> int:
    """Length of a longest common subsequence of two token sequences."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]
