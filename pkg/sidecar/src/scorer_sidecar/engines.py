"""Scoring engines behind the HTTP service.

Two interchangeable implementations of the same two operations:

* ``nli(premises, hypotheses)`` -> row-major ``|premises| x |hypotheses|``
  matrix of entailment-style scores in [0, 1];
* ``ner(text)`` -> list of ``{"text", "start", "end", "label"}`` spans.

``TransformersEngine`` wraps pretrained checkpoints and is preferred when
the weights can be loaded. ``HeuristicEngine`` is a deterministic,
dependency-free fallback so the service always answers the protocol.
"""

from __future__ import annotations

import re

DEFAULT_NLI_MODEL = "roberta-large-mnli"
DEFAULT_NER_MODEL = "dslim/bert-base-NER"


class EngineUnavailable(Exception):
    """The requested engine cannot serve (weights missing, load failure)."""


# --- heuristic engine -------------------------------------------------------

_WORD_RE = re.compile(r"[A-Za-z0-9']+")

# Capitalized sentence-starters that are not entities on their own.
_STOPWORDS = {
    "the", "a", "an", "in", "on", "at", "it", "he", "she", "they", "we",
    "this", "that", "these", "those", "there", "however", "moreover",
    "further", "hence", "thus", "therefore", "accordingly", "if", "but",
    "and", "or", "as", "for", "to", "by", "of", "no", "not", "is", "was",
    "are", "were", "be", "been", "after", "before", "under", "upon",
}

# Connector words allowed inside a multi-word entity run.
_CONNECTORS = {"of", "for", "the", "and", "in"}

_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
}

_ORG_CUES = {
    "court", "tribunal", "commission", "committee", "board", "council",
    "authority", "ministry", "department", "university", "bank",
    "corporation", "company", "ltd", "assembly", "parliament", "legislature",
}

_LAW_CUES = {"act", "code", "constitution", "order", "rules", "regulation", "ordinance"}

_GPE_GAZETTEER = {
    "india", "delhi", "bombay", "madras", "calcutta", "mumbai", "chennai",
    "kolkata", "punjab", "bihar", "mysore", "kerala", "rajasthan", "assam",
    "gujarat", "maharashtra", "karnataka", "orissa", "bengal", "pakistan",
    "england", "london",
}

_YEAR_RE = re.compile(r"\b(1[5-9]\d{2}|20\d{2})\b")


def _tokens(text):
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


class HeuristicEngine:
    """Deterministic lexical scoring; no pretrained weights required.

    NLI is token-overlap coverage of the hypothesis by the premise; NER is
    capitalized-run extraction with cue-word labelling. Useful for offline
    runs and as a protocol reference, not a quality baseline.
    """

    name = "heuristic"
    nli_model = "lexical-overlap-v1"
    ner_model = "capitalized-runs-v1"

    def nli(self, premises, hypotheses):
        prem_sets = [set(_tokens(p)) for p in premises]
        hyp_sets = [set(_tokens(h)) for h in hypotheses]
        matrix = []
        for prem in prem_sets:
            row = []
            for hyp in hyp_sets:
                if not hyp:
                    row.append(1.0)
                else:
                    row.append(len(prem & hyp) / len(hyp))
            matrix.append(row)
        return matrix

    def ner(self, text):
        spans = []
        for start, end, words in _capitalized_runs(text):
            label = _label_for(words)
            spans.append({"text": text[start:end], "start": start, "end": end, "label": label})
        for m in _YEAR_RE.finditer(text):
            if not any(s["start"] <= m.start() < s["end"] for s in spans):
                spans.append(
                    {"text": m.group(0), "start": m.start(), "end": m.end(), "label": "DATE"}
                )
        spans.sort(key=lambda s: (s["start"], s["end"]))
        return spans


def _word_positions(text):
    """(start, end, word) for whitespace-delimited words, punctuation-trimmed."""
    out = []
    for m in re.finditer(r"\S+", text):
        word = m.group(0)
        lead = len(word) - len(word.lstrip("\"'([{“‘"))
        trail = len(word) - len(word.rstrip(".,;:!?\"')]}”’"))
        core = word[lead : len(word) - trail] if trail else word[lead:]
        if core:
            out.append((m.start() + lead, m.start() + lead + len(core), core))
    return out


def _capitalized_runs(text):
    """Maximal runs of capitalized words (connectors allowed inside)."""
    words = _word_positions(text)
    runs = []
    i = 0
    while i < len(words):
        start, end, core = words[i]
        if not (core[0].isupper() and any(c.isalpha() for c in core)):
            i += 1
            continue
        run = [(start, end, core)]
        j = i + 1
        while j < len(words):
            s, e, w = words[j]
            if w[0].isupper() and any(c.isalpha() for c in w):
                run.append((s, e, w))
                j += 1
            elif w.lower() in _CONNECTORS and j + 1 < len(words) and words[j + 1][2][0].isupper():
                run.append((s, e, w))
                run.append(words[j + 1])
                j += 2
            else:
                break
        # a capitalized sentence-starter ("The Supreme Court") is not part
        # of the entity; drop leading stopwords
        while len(run) > 1 and run[0][2].lower() in _STOPWORDS:
            run = run[1:]
        tokens = [w for _, _, w in run]
        if not (len(tokens) == 1 and tokens[0].lower() in _STOPWORDS):
            runs.append((run[0][0], run[-1][1], tokens))
        i = j
    return runs


def _label_for(words):
    lowered = [w.lower().rstrip(".") for w in words]
    if any(w in _MONTHS for w in lowered):
        return "DATE"
    if any(w in _LAW_CUES for w in lowered):
        return "LAW"
    if any(w in _ORG_CUES for w in lowered):
        return "ORG"
    if all(w in _GPE_GAZETTEER for w in lowered if w not in _CONNECTORS):
        return "GPE"
    return "PERSON"


# --- transformers engine ----------------------------------------------------


class TransformersEngine:
    """Pretrained NLI + NER pipelines; raises EngineUnavailable on load failure."""

    name = "transformers"

    def __init__(self, nli_model=DEFAULT_NLI_MODEL, ner_model=DEFAULT_NER_MODEL):
        self.nli_model = nli_model
        self.ner_model = ner_model
        try:
            import torch
            from transformers import (
                AutoModelForSequenceClassification,
                AutoTokenizer,
                pipeline,
            )
        except ImportError as exc:
            raise EngineUnavailable(f"transformers stack not installed: {exc}") from exc
        try:
            self._torch = torch
            self._tokenizer = AutoTokenizer.from_pretrained(nli_model)
            self._model = AutoModelForSequenceClassification.from_pretrained(nli_model)
            self._model.eval()
            self._entail_index = _entailment_index(self._model.config)
            self._ner_pipe = pipeline(
                "token-classification", model=ner_model, aggregation_strategy="simple"
            )
        except Exception as exc:  # noqa: BLE001 - any load failure means unavailable
            raise EngineUnavailable(f"failed to load pretrained models: {exc}") from exc

    def nli(self, premises, hypotheses):
        pairs = [(p, h) for p in premises for h in hypotheses]
        batch = self._tokenizer(
            [p for p, _ in pairs],
            [h for _, h in pairs],
            padding=True,
            truncation=True,
            return_tensors="pt",
        )
        with self._torch.no_grad():
            logits = self._model(**batch).logits
        probs = self._torch.softmax(logits, dim=-1)[:, self._entail_index].tolist()
        n_hyp = len(hypotheses)
        return [probs[i * n_hyp : (i + 1) * n_hyp] for i in range(len(premises))]

    def ner(self, text):
        spans = []
        for ent in self._ner_pipe(text):
            spans.append(
                {
                    "text": text[ent["start"] : ent["end"]],
                    "start": int(ent["start"]),
                    "end": int(ent["end"]),
                    "label": _normalize_label(ent["entity_group"]),
                }
            )
        return spans


def _entailment_index(config):
    for idx, label in config.id2label.items():
        if "entail" in label.lower():
            return int(idx)
    raise EngineUnavailable(f"model has no entailment label: {config.id2label}")


_LABEL_MAP = {"PER": "PERSON", "LOC": "GPE", "ORG": "ORG", "MISC": "MISC"}


def _normalize_label(label):
    return _LABEL_MAP.get(label, label)


def create_engine(kind="auto", nli_model=DEFAULT_NLI_MODEL, ner_model=DEFAULT_NER_MODEL):
    """Build the configured engine; ``auto`` degrades to the heuristic."""
    if kind == "heuristic":
        return HeuristicEngine()
    if kind == "transformers":
        return TransformersEngine(nli_model, ner_model)
    if kind == "auto":
        try:
            return TransformersEngine(nli_model, ner_model)
        except EngineUnavailable:
            return HeuristicEngine()
    raise ValueError(f"unknown engine kind {kind!r}")
