"""Corpus loading and statistics for (judgement, gold summary) pairs.

Corpus files are UTF-8 JSON lines, one record per line:
``{"id": str, "text": str, "summary": str}``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import InputError, ValidationError
from .textproc import count_words


@dataclass(frozen=True)
class CaseDocument:
    id: str
    text: str
    word_count: int


@dataclass(frozen=True)
class GoldSummary:
    doc_id: str
    text: str
    word_count: int


@dataclass(frozen=True)
class CorpusStats:
    n_docs: int
    avg_doc_words: float
    avg_summary_words: float


def load_corpus(path, split: str | None = None) -> list[tuple[CaseDocument, GoldSummary]]:
    """Load a corpus split from a JSONL file, preserving file order.

    ``path`` may be a directory containing ``<split>.jsonl`` or a file path.
    Raises :class:`InputError` for missing files and :class:`ValidationError`
    for malformed or duplicate records.
    """
    if split is not None and os.path.isdir(path):
        path = os.path.join(path, f"{split}.jsonl")
    if not os.path.isfile(path):
        raise InputError(f"corpus file not found: {path}")

    pairs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            doc_id = record.get("id")
            if not doc_id:
                raise ValidationError(f"{path}:{lineno}: record missing 'id'")
            if doc_id in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            text = record.get("text")
            summary = record.get("summary")
            if not text or not str(text).strip():
                raise ValidationError(f"{path}:{lineno}: record {doc_id!r} missing text")
            if not summary or not str(summary).strip():
                raise ValidationError(f"{path}:{lineno}: record {doc_id!r} missing summary")
            seen.add(doc_id)
            doc = CaseDocument(id=doc_id, text=text, word_count=count_words(text))
            gold = GoldSummary(doc_id=doc_id, text=summary, word_count=count_words(summary))
            pairs.append((doc, gold))
    return pairs


def corpus_stats(pairs) -> CorpusStats:
    """Arithmetic mean word counts over a non-empty list of pairs."""
    if not pairs:
        raise ValidationError("cannot compute statistics of an empty corpus")
    n = len(pairs)
    return CorpusStats(
        n_docs=n,
        avg_doc_words=sum(d.word_count for d, _ in pairs) / n,
        avg_summary_words=sum(g.word_count for _, g in pairs) / n,
    )
