"""Gold-standard match metrics: ROUGE-2, ROUGE-L, METEOR and BLEU.

Formulas are pinned here so results are bit-reproducible without any
external evaluation package. Tokens are expected to come from
:func:`legalsumm.textproc.tokenize`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .textproc import lcs_len, ngrams


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def _prf(matches: float, cand_total: int, ref_total: int) -> PRF:
    p = matches / cand_total if cand_total else 0.0
    r = matches / ref_total if ref_total else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return PRF(p, r, f)


def rouge2(candidate, reference) -> PRF:
    """Clipped bigram-overlap precision/recall/F1."""
    cand = Counter(ngrams(candidate, 2))
    ref = Counter(ngrams(reference, 2))
    overlap = sum((cand & ref).values())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def rougeL(candidate, reference) -> PRF:
    """LCS-based precision/recall/F1 over the whole sequences."""
    if not candidate or not reference:
        return PRF(0.0, 0.0, 0.0)
    ell = lcs_len(candidate, reference)
    return _prf(ell, len(candidate), len(reference))


def bleu(candidate, reference, max_n: int = 4) -> float:
    """BLEU as a percent in [0, 100].

    Geometric mean of modified n-gram precisions for n = 1..4, with add-one
    smoothing when a higher-order overlap is empty, times the brevity
    penalty min(1, e^(1 - r/c)).
    """
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = Counter(ngrams(candidate, n))
        ref = Counter(ngrams(reference, n))
        total = sum(cand.values())
        matches = sum((cand & ref).values())
        if matches == 0:
            if n == 1:
                return 0.0
            precision = (matches + 1) / (total + 1)  # smoothing for sparse orders
        else:
            precision = matches / total
        log_sum += math.log(precision)
    geo_mean = math.exp(log_sum / max_n)
    bp = min(1.0, math.exp(1 - len(reference) / len(candidate)))
    return 100.0 * bp * geo_mean


def _align(candidate, reference):
    """Leftmost-greedy exact unigram alignment; each token matched once.

    Returns the list of (candidate_index, reference_index) pairs in
    candidate order.
    """
    available: dict[str, list[int]] = {}
    for j, tok in enumerate(reference):
        available.setdefault(tok, []).append(j)
    pairs = []
    for i, tok in enumerate(candidate):
        slots = available.get(tok)
        if slots:
            pairs.append((i, slots.pop(0)))
    return pairs


def _chunk_count(pairs) -> int:
    """Number of maximal runs contiguous in both sequences."""
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(candidate, reference) -> float:
    """Exact-match METEOR: Fmean = 10PR/(R+9P), penalty 0.5*(chunks/m)^3."""
    if not candidate or not reference:
        return 0.0
    pairs = _align(candidate, reference)
    m = len(pairs)
    if m == 0:
        return 0.0
    p = m / len(candidate)
    r = m / len(reference)
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (_chunk_count(pairs) / m) ** 3
    return fmean * (1 - penalty)


@dataclass(frozen=True)
class ScoreCard:
    """All per-document metric values for one (document, summary, model)."""

    doc_id: str
    model_name: str
    r2: PRF
    rl: PRF
    meteor: float
    bleu_percent: float
    summac: float
    num_prec: float
    ne_prec: float

    def as_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "model_name": self.model_name,
            "r2_p": self.r2.precision,
            "r2_r": self.r2.recall,
            "r2_f1": self.r2.f1,
            "rl_p": self.rl.precision,
            "rl_r": self.rl.recall,
            "rl_f1": self.rl.f1,
            "meteor": self.meteor,
            "bleu_percent": self.bleu_percent,
            "summac": self.summac,
            "num_prec": self.num_prec,
            "ne_prec": self.ne_prec,
        }


MATCH_METRIC_KEYS = ("r2_p", "r2_r", "r2_f1", "rl_p", "rl_r", "rl_f1", "meteor", "bleu_percent")
CONSISTENCY_METRIC_KEYS = ("summac", "ne_prec", "num_prec")
