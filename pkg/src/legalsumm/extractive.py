"""Built-in unsupervised extractive baseline.

TF-IDF sentence scoring with entity, date and section-heading boosts, and
greedy budgeted selection. Output is always a verbatim subsequence of the
document's sentences, so it is faithful to the source by construction.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .consistency import DATE_RE, entity_spans
from .errors import ValidationError
from .textproc import split_sentences, tokenize

DEFAULT_WEIGHTS = (0.2, 0.2, 0.2)  # entity, date, heading boosts

_NUMBERED_HEADING_RE = re.compile(r"^\d+(?:\.\d+)*[.)]\s+\S")


@dataclass(frozen=True)
class SentenceScore:
    index: int
    tfidf_mean: float
    entity_count: int
    date_count: int
    heading_proximity: float
    total: float


def _is_heading(sentence: str) -> bool:
    line = sentence.strip()
    if not line:
        return False
    letters = [c for c in line if c.isalpha()]
    if letters and all(c.isupper() for c in letters) and len(letters) >= 3:
        return True
    return bool(_NUMBERED_HEADING_RE.match(line))


def _heading_proximity(index, heading_indices):
    if not heading_indices:
        return 0.0
    dist = min(abs(index - h) for h in heading_indices)
    return 1.0 / (1.0 + dist)


def score_sentences(doc, weights=DEFAULT_WEIGHTS):
    """Score every sentence of the document.

    TF is the token's raw count in the whole document; IDF treats each
    sentence as a pseudo-document, idf(t) = ln(n_sentences / df(t)). A
    sentence's tfidf_mean is the mean tf*idf of its tokens, normalized to
    [0, 1] by the corpus-of-sentences maximum.
    """
    w_e, w_d, w_h = weights
    sentences = split_sentences(doc.text).sentences
    if not sentences:
        raise ValidationError(f"document {doc.id!r} has no sentences")

    sent_tokens = [tokenize(s) for s in sentences]
    doc_tf = Counter(t for toks in sent_tokens for t in toks)
    df = Counter()
    for toks in sent_tokens:
        df.update(set(toks))
    n = len(sentences)
    idf = {t: math.log(n / df[t]) for t in df}

    raw_means = []
    for toks in sent_tokens:
        if toks:
            raw_means.append(sum(doc_tf[t] * idf[t] for t in toks) / len(toks))
        else:
            raw_means.append(0.0)
    peak = max(raw_means) if raw_means else 0.0

    heading_indices = [i for i, s in enumerate(sentences) if _is_heading(s)]

    scores = []
    for i, sentence in enumerate(sentences):
        tfidf_mean = raw_means[i] / peak if peak > 0 else 0.0
        entity_count = len(entity_spans(sentence))
        date_count = len(DATE_RE.findall(sentence))
        heading_proximity = _heading_proximity(i, heading_indices)
        total = (
            tfidf_mean
            + w_e * entity_count
            + w_d * date_count
            + w_h * heading_proximity
        )
        scores.append(
            SentenceScore(
                index=i,
                tfidf_mean=tfidf_mean,
                entity_count=entity_count,
                date_count=date_count,
                heading_proximity=heading_proximity,
                total=total,
            )
        )
    return scores


def extract_summary_text(doc, budget_words: int, weights=DEFAULT_WEIGHTS) -> str:
    """Select sentences by descending score under a word budget.

    Ties break toward the earlier sentence; sentences that would overflow
    the budget are skipped; the top-scoring sentence is always included.
    Output preserves original document order.
    """
    if budget_words < 1:
        raise ValidationError(f"budget_words must be >= 1, got {budget_words}")
    sentences = split_sentences(doc.text).sentences
    scores = score_sentences(doc, weights)
    ranked = sorted(scores, key=lambda s: (-s.total, s.index))

    selected = []
    used = 0
    for rank, score in enumerate(ranked):
        n_words = len(sentences[score.index].split())
        if rank == 0:
            selected.append(score.index)
            used += n_words
            continue
        if used + n_words <= budget_words:
            selected.append(score.index)
            used += n_words
    selected.sort()
    return " ".join(sentences[i] for i in selected)
