"""Document chunking and per-chunk summary length budgets.

Long judgements are split into chunks of at most ``chunk_words`` words; each
chunk gets a target summary length that preserves the document's overall
compression ratio gold_words / doc_words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .textproc import split_sentences


@dataclass(frozen=True)
class BudgetParams:
    doc_words: int
    gold_words: int
    chunk_words: int = 1024
    token_limit: int = 4096  # informational: model limit for prompt + output

    def __post_init__(self):
        if self.chunk_words < 1:
            raise ValidationError(f"chunk_words must be >= 1, got {self.chunk_words}")
        if self.doc_words < 1:
            raise ValidationError(f"doc_words must be >= 1, got {self.doc_words}")
        if self.gold_words < 1:
            raise ValidationError(f"gold_words must be >= 1, got {self.gold_words}")


@dataclass(frozen=True)
class Chunk:
    text: str
    word_count: int
    target_summary_words: int


@dataclass(frozen=True)
class ChunkPlan:
    chunks: tuple[Chunk, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.chunks)


def target_summary_length(params: BudgetParams, chunk_len: int) -> int:
    """Round-half-up of (gold_words / doc_words) * chunk_len, floored at 1."""
    if chunk_len < 1 or chunk_len > params.chunk_words:
        raise ValidationError(
            f"chunk_len {chunk_len} outside [1, {params.chunk_words}]"
        )
    ratio = params.gold_words / params.doc_words
    return max(1, math.floor(ratio * chunk_len + 0.5))


def _pack_words(words, params):
    """Hard mode: consecutive runs of exactly chunk_words, shorter final run."""
    groups = []
    for start in range(0, len(words), params.chunk_words):
        groups.append(words[start : start + params.chunk_words])
    return groups


def _pack_sentences(text, params):
    """Greedy whole-sentence packing; oversized sentences are hard-split."""
    sentence_words = [s.split() for s in split_sentences(text).sentences]
    groups = []
    current: list[str] = []
    for words in sentence_words:
        if len(words) > params.chunk_words:
            if current:
                groups.append(current)
                current = []
            for start in range(0, len(words), params.chunk_words):
                piece = words[start : start + params.chunk_words]
                if len(piece) == params.chunk_words:
                    groups.append(piece)
                else:
                    current = piece
            continue
        if current and len(current) + len(words) > params.chunk_words:
            groups.append(current)
            current = []
        current.extend(words)
    if current:
        groups.append(current)
    return groups


def chunk_document(doc, params: BudgetParams, mode: str = "hard") -> ChunkPlan:
    """Split a document into budgeted chunks.

    ``hard`` cuts every chunk_words words; ``sentence_aligned`` packs whole
    sentences greedily. Documents of at most chunk_words words yield a
    single chunk either way.
    """
    words = doc.text.split()
    if not words:
        raise ValidationError(f"document {doc.id!r} is empty")
    if mode not in ("hard", "sentence_aligned"):
        raise ValidationError(f"unknown chunk mode {mode!r}")

    if len(words) <= params.chunk_words:
        groups = [words]
    elif mode == "hard":
        groups = _pack_words(words, params)
    else:
        groups = _pack_sentences(doc.text, params)

    chunks = tuple(
        Chunk(
            text=" ".join(group),
            word_count=len(group),
            target_summary_words=target_summary_length(params, len(group)),
        )
        for group in groups
    )
    return ChunkPlan(chunks=chunks)


def assemble_summary(chunk_summaries) -> str:
    """Join chunk summaries in order with single spaces, collapsing whitespace."""
    if not chunk_summaries:
        raise ValidationError("cannot assemble an empty list of chunk summaries")
    return " ".join(" ".join(chunk_summaries).split())
