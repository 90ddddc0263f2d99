"""Faithfulness metrics and hallucination flags.

Number precision, named-entity precision, NLI-based consistency scoring and
chunk-merge artifact detection. NLI and NER are behind a pluggable scorer
protocol; the built-in lexical scorer keeps everything runnable offline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import requests

from .errors import ExternalServiceError, ValidationError
from .textproc import split_sentences, tokenize

NUMBER_RE = re.compile(r"\d+(?:,\d+)*(?:\.\d+)?")

DATE_RE = re.compile(
    r"(?:January|February|March|April|May|June|July|August|September|October|"
    r"November|December)\s+\d{1,2}(?:,\s*\d{4})?"
    r"|\d{1,2}[/-]\d{1,2}[/-]\d{2,4}"
    r"|\b(?:1[5-9]\d{2}|20\d{2})\b",
    re.IGNORECASE,
)

# Function words that never form a one-token entity at sentence start.
_STOPWORDS = {
    "the", "a", "an", "in", "on", "at", "it", "he", "she", "they", "we", "i",
    "you", "this", "that", "these", "those", "but", "and", "or", "if", "as",
    "is", "are", "was", "were", "be", "been", "of", "for", "to", "from", "by",
    "with", "when", "while", "where", "there", "here", "then", "thus", "hence",
    "however", "therefore", "further", "also", "such", "no", "not", "so",
    "its", "his", "her", "their", "our", "my", "your", "after", "before",
    "during", "under", "over", "upon", "since", "now", "accordingly",
}

# Lowercase connectors tolerated inside a capitalized run:
# "U.S. District Court for the Southern District of New York".
_CONNECTORS = {"of", "for", "the", "and", "in"}

# Proper-noun prefixes whose internal capital is legitimate (McDonald,
# MacArthur, DeVito, O'Brien ...), not a chunk-merge artifact.
_MERGE_EXCEPTION_PREFIX = re.compile(
    r"^(?:Mc|Mac|De|Del|Della|Di|Du|Van|Von|La|Le|Fitz|St|O'|D'|L')[A-Z]"
)
_MERGE_RE = re.compile(r"[a-z][A-Z]")

_EDGE_STRIP = re.compile(r"^\W+|\W+$", re.UNICODE)


@dataclass(frozen=True)
class AuditFlag:
    kind: str  # unsupported_number | unsupported_entity | low_nli_sentence | merge_artifact
    start: int
    end: int
    detail: str
    severity: float

    def as_dict(self):
        return {
            "kind": self.kind,
            "start": self.start,
            "end": self.end,
            "detail": self.detail,
            "severity": self.severity,
        }


def _number_spans(text):
    """(normalized_value, start, end) for every number occurrence."""
    out = []
    for m in NUMBER_RE.finditer(text):
        out.append((m.group().replace(",", ""), m.start(), m.end()))
    return out


def extract_numbers(text: str) -> set[str]:
    """Normalized number strings: commas stripped, ordinal suffixes dropped."""
    return {value for value, _, _ in _number_spans(text)}


def _token_spans(text):
    """Non-whitespace tokens with the spans of their punctuation-stripped core."""
    spans = []
    for m in re.finditer(r"\S+", text):
        raw = m.group()
        stripped = _EDGE_STRIP.sub("", raw)
        if not stripped:
            continue
        start = m.start() + raw.find(stripped)
        spans.append((stripped, start, start + len(stripped)))
    return spans


def _is_capitalized(token: str) -> bool:
    return bool(token) and token[0].isupper()


def normalize_entity(name: str) -> str:
    return " ".join(name.casefold().split())


def entity_spans(text: str, gazetteer=None):
    """Heuristic entity mentions: maximal capitalized runs with spans.

    Lowercase connectors ("of", "for", "the"...) are absorbed when flanked by
    capitalized tokens. Sentence-initial single stopwords ("The", "It") are
    not entities. Gazetteer phrases are matched case-insensitively.
    """
    tokens = _token_spans(text)
    sentence_starts = {start for start, _ in split_sentences(text).offsets}

    runs = []
    i = 0
    while i < len(tokens):
        tok, start, end = tokens[i]
        if not _is_capitalized(tok):
            i += 1
            continue
        run = [i]
        j = i + 1
        while j < len(tokens):
            nxt = tokens[j][0]
            if tokens[j][1] in sentence_starts:
                break  # entities never cross a sentence boundary
            if _is_capitalized(nxt):
                run.append(j)
                j += 1
                continue
            if nxt.lower() in _CONNECTORS:
                # absorb connectors only if a capitalized token follows them
                k = j
                while k < len(tokens) and tokens[k][0].lower() in _CONNECTORS:
                    k += 1
                if k < len(tokens) and _is_capitalized(tokens[k][0]):
                    run.extend(range(j, k + 1))
                    j = k + 1
                    continue
            break
        if len(run) == 1 and start in sentence_starts and tok.lower() in _STOPWORDS:
            i = j
            continue
        run_start = tokens[run[0]][1]
        run_end = tokens[run[-1]][2]
        runs.append((text[run_start:run_end], run_start, run_end))
        i = j

    if gazetteer:
        for phrase in gazetteer:
            for m in re.finditer(re.escape(phrase), text, re.IGNORECASE):
                runs.append((m.group(), m.start(), m.end()))
        runs.sort(key=lambda r: (r[1], r[2]))
    return runs


def extract_entities(text: str, scorer=None, gazetteer=None) -> set[str]:
    """Normalized entity names, from the remote scorer when configured."""
    if scorer is not None:
        mentions = scorer.ner(text)
        return {normalize_entity(m["text"]) for m in mentions if m["text"].strip()}
    return {normalize_entity(t) for t, _, _ in entity_spans(text, gazetteer)}


def num_prec(summary: str, document: str) -> float:
    """Fraction of summary numbers present in the document; 1.0 when none."""
    summary_numbers = extract_numbers(summary)
    if not summary_numbers:
        return 1.0
    document_numbers = extract_numbers(document)
    return len(summary_numbers & document_numbers) / len(summary_numbers)


def _entity_supported(name: str, doc_norm: str, doc_entities) -> bool:
    return name in doc_entities or name in doc_norm


def ne_prec(summary: str, document: str, scorer=None) -> float:
    """Fraction of summary entities supported by the document; 1.0 when none.

    An entity counts as supported if its normalized form equals a document
    entity or occurs as a substring of the normalized document text.
    """
    summary_entities = extract_entities(summary, scorer)
    if not summary_entities:
        return 1.0
    doc_entities = extract_entities(document, scorer)
    doc_norm = normalize_entity(document)
    supported = sum(
        1 for name in summary_entities if _entity_supported(name, doc_norm, doc_entities)
    )
    return supported / len(summary_entities)


def summac_score(matrix) -> float:
    """Max over document sentences, then mean over summary sentences."""
    if not matrix or not matrix[0]:
        raise ValidationError("NLI matrix must be non-empty")
    n_cols = len(matrix[0])
    if any(len(row) != n_cols for row in matrix):
        raise ValidationError("NLI matrix rows have inconsistent lengths")
    col_max = [max(row[j] for row in matrix) for j in range(n_cols)]
    return sum(col_max) / n_cols


class LexicalOverlapScorer:
    """Offline stand-in for an NLI/NER service.

    NLI entailment is approximated by token overlap: shared tokens divided
    by hypothesis tokens. NER uses the heuristic capitalized-run extractor.
    """

    name = "lexical-overlap"

    def nli(self, premises, hypotheses):
        hyp_tokens = [set(tokenize(h)) for h in hypotheses]
        matrix = []
        for premise in premises:
            ptoks = set(tokenize(premise))
            row = []
            for htoks in hyp_tokens:
                row.append(len(ptoks & htoks) / len(htoks) if htoks else 1.0)
            matrix.append(row)
        return matrix

    def ner(self, text):
        return [
            {"text": t, "start": s, "end": e, "label": "MISC"}
            for t, s, e in entity_spans(text)
        ]


class RemoteScorer:
    """HTTP client for the scorer protocol (POST /nli, POST /ner)."""

    def __init__(self, base_url, timeout=60.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()

    def _post(self, path, payload):
        try:
            resp = self.session.post(
                f"{self.base_url}{path}", json=payload, timeout=self.timeout
            )
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise ExternalServiceError(f"scorer request {path} failed: {exc}") from exc

    def nli(self, premises, hypotheses):
        data = self._post("/nli", {"premises": list(premises), "hypotheses": list(hypotheses)})
        return data["scores"]

    def ner(self, text):
        return self._post("/ner", {"text": text})["entities"]

    def info(self):
        try:
            resp = self.session.get(f"{self.base_url}/info", timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise ExternalServiceError(f"scorer /info failed: {exc}") from exc


def nli_sentence_scores(document: str, summary: str, scorer=None):
    """Per-summary-sentence max entailment scores plus the sentence list."""
    scorer = scorer or LexicalOverlapScorer()
    doc_sents = split_sentences(document)
    sum_sents = split_sentences(summary)
    if not doc_sents.sentences or not sum_sents.sentences:
        return [], sum_sents
    matrix = scorer.nli(list(doc_sents.sentences), list(sum_sents.sentences))
    n_cols = len(sum_sents.sentences)
    col_max = [max(row[j] for row in matrix) for j in range(n_cols)]
    return col_max, sum_sents


def document_summac(document: str, summary: str, scorer=None) -> float:
    """SummaC-style score for a (document, summary) pair."""
    scores, sum_sents = nli_sentence_scores(document, summary, scorer)
    if not scores:
        return 0.0
    return sum(scores) / len(scores)


def detect_merge_artifacts(summary: str, exceptions=None) -> list[AuditFlag]:
    """Flag tokens where two sentences were fused ("theThe", "OrderThere")."""
    exception_set = {e.casefold() for e in exceptions} if exceptions else set()
    flags = []
    for token, start, end in _token_spans(summary):
        if not _MERGE_RE.search(token):
            continue
        if token.casefold() in exception_set:
            continue
        if _MERGE_EXCEPTION_PREFIX.match(token):
            continue
        flags.append(
            AuditFlag(
                kind="merge_artifact",
                start=start,
                end=end,
                detail=f"possible sentence merge inside token {token!r}",
                severity=0.6,
            )
        )
    return flags


def audit_summary(
    summary: str,
    document: str,
    scorer=None,
    nli_threshold: float = 0.5,
    merge_exceptions=None,
) -> list[AuditFlag]:
    """All span-level consistency flags for a summary, ordered by span start."""
    if not 0.0 <= nli_threshold <= 1.0:
        raise ValidationError(f"nli_threshold must be in [0, 1], got {nli_threshold}")
    flags = []

    doc_numbers = extract_numbers(document)
    for value, start, end in _number_spans(summary):
        if value not in doc_numbers:
            flags.append(
                AuditFlag(
                    kind="unsupported_number",
                    start=start,
                    end=end,
                    detail=f"number {value!r} not found in source document",
                    severity=0.8,
                )
            )

    doc_entities = extract_entities(document, scorer)
    doc_norm = normalize_entity(document)
    for text, start, end in entity_spans(summary):
        name = normalize_entity(text)
        if not _entity_supported(name, doc_norm, doc_entities):
            flags.append(
                AuditFlag(
                    kind="unsupported_entity",
                    start=start,
                    end=end,
                    detail=f"entity {text!r} not found in source document",
                    severity=0.8,
                )
            )

    scores, sum_sents = nli_sentence_scores(document, summary, scorer)
    for score, (start, end), sentence in zip(scores, sum_sents.offsets, sum_sents.sentences):
        if score < nli_threshold:
            flags.append(
                AuditFlag(
                    kind="low_nli_sentence",
                    start=start,
                    end=end,
                    detail=f"sentence entailment {score:.3f} below threshold {nli_threshold}",
                    severity=min(1.0, 1.0 - score),
                )
            )

    flags.extend(detect_merge_artifacts(summary, merge_exceptions))
    flags.sort(key=lambda f: (f.start, f.end, f.kind))
    return flags
