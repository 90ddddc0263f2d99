"""Corpus-level evaluation: per-document score cards, aggregates,
significance tests and run-directory persistence."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from scipy import stats as scipy_stats

from . import consistency, metrics
from .errors import ValidationError
from .textproc import tokenize

ALL_METRIC_KEYS = metrics.MATCH_METRIC_KEYS + metrics.CONSISTENCY_METRIC_KEYS


@dataclass
class RunResult:
    model_name: str
    family: str
    cards: list
    aggregates: dict = field(default_factory=dict)
    significance: dict = field(default_factory=dict)  # metric key -> bool

    def metric_values(self, key):
        return [card.as_dict()[key] for card in self.cards]


def score_pair(doc, gold, summary_text: str, model_name: str, scorer=None):
    """All metrics for one (document, gold, candidate) triple."""
    cand = tokenize(summary_text)
    ref = tokenize(gold.text)
    return metrics.ScoreCard(
        doc_id=doc.id,
        model_name=model_name,
        r2=metrics.rouge2(cand, ref),
        rl=metrics.rougeL(cand, ref),
        meteor=metrics.meteor(cand, ref),
        bleu_percent=metrics.bleu(cand, ref),
        summac=consistency.document_summac(doc.text, summary_text, scorer),
        num_prec=consistency.num_prec(summary_text, doc.text),
        ne_prec=consistency.ne_prec(summary_text, doc.text, scorer),
    )


def evaluate_corpus(pairs, summaries, model_name, family="llm", scorer=None) -> RunResult:
    """One ScoreCard per document plus arithmetic-mean aggregates.

    ``summaries`` maps doc_id to either a GeneratedSummary or a plain string.
    """
    cards = []
    for doc, gold in pairs:
        if doc.id not in summaries:
            raise ValidationError(f"no summary for document {doc.id!r} (model {model_name})")
        summary = summaries[doc.id]
        text = summary if isinstance(summary, str) else summary.text
        cards.append(score_pair(doc, gold, text, model_name, scorer))
    result = RunResult(model_name=model_name, family=family, cards=cards)
    n = len(cards)
    result.aggregates = {
        key: sum(c.as_dict()[key] for c in cards) / n for key in ALL_METRIC_KEYS
    }
    return result


def t_test(a, b, alpha: float = 0.05):
    """Two-sided pooled-variance Student t-test.

    Returns (t, significant). Zero pooled variance with equal means gives
    (0.0, False); with unequal means the difference is trivially significant.
    """
    if len(a) < 2 or len(b) < 2:
        raise ValidationError("t_test needs at least 2 observations per sample")
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    n, m = len(a), len(b)
    mean_a = sum(a) / n
    mean_b = sum(b) / m
    var_a = sum((x - mean_a) ** 2 for x in a) / (n - 1)
    var_b = sum((x - mean_b) ** 2 for x in b) / (m - 1)
    df = n + m - 2
    pooled = ((n - 1) * var_a + (m - 1) * var_b) / df
    if pooled == 0:
        if mean_a == mean_b:
            return 0.0, False
        return math.copysign(math.inf, mean_a - mean_b), True
    t = (mean_a - mean_b) / math.sqrt(pooled * (1 / n + 1 / m))
    p = 2 * scipy_stats.t.sf(abs(t), df)
    return t, bool(p < alpha)


def paired_t_test(a, b, alpha: float = 0.05):
    """Paired-differences variant, exposed for same-corpus comparisons."""
    if len(a) != len(b):
        raise ValidationError("paired t_test needs equal-length samples")
    diffs = [x - y for x, y in zip(a, b)]
    n = len(diffs)
    if n < 2:
        raise ValidationError("paired t_test needs at least 2 pairs")
    mean_d = sum(diffs) / n
    var_d = sum((d - mean_d) ** 2 for d in diffs) / (n - 1)
    if var_d == 0:
        if mean_d == 0:
            return 0.0, False
        return math.copysign(math.inf, mean_d), True
    t = mean_d / math.sqrt(var_d / n)
    p = 2 * scipy_stats.t.sf(abs(t), n - 1)
    return t, bool(p < alpha)


def best_extractive_baseline(results, key):
    """The extractive result with the highest aggregate for a metric.

    Ties break by model name order. None when no extractive model ran.
    """
    extractive = [r for r in results if r.family == "extractive"]
    if not extractive:
        return None
    return max(extractive, key=lambda r: (r.aggregates[key], _NameOrder(r.model_name)))


class _NameOrder:
    """Reverses string comparison so max() prefers the earlier name on ties."""

    def __init__(self, name):
        self.name = name

    def __lt__(self, other):
        return self.name > other.name

    def __eq__(self, other):
        return self.name == other.name


def mark_significance(results, alpha: float = 0.05):
    """Asterisk semantics: a non-extractive aggregate is marked when it
    exceeds the best extractive aggregate for that metric AND the
    per-document score samples differ significantly under the t-test."""
    for key in metrics.MATCH_METRIC_KEYS:
        baseline = best_extractive_baseline(results, key)
        if baseline is None:
            continue
        base_values = baseline.metric_values(key)
        for result in results:
            if result.family == "extractive":
                continue
            if result.aggregates[key] <= baseline.aggregates[key]:
                result.significance[key] = False
                continue
            _, significant = t_test(result.metric_values(key), base_values, alpha)
            result.significance[key] = significant
    return results


def save_run(result: RunResult, run_dir):
    """Persist cards.jsonl and aggregates.json; cards carry no timestamps,
    so re-running evaluation on unchanged inputs is byte-identical."""
    os.makedirs(run_dir, exist_ok=True)
    cards_path = os.path.join(run_dir, "cards.jsonl")
    with open(cards_path, "w", encoding="utf-8") as fh:
        for card in result.cards:
            fh.write(json.dumps(card.as_dict(), sort_keys=True) + "\n")
    agg_path = os.path.join(run_dir, "aggregates.json")
    with open(agg_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "model_name": result.model_name,
                "family": result.family,
                "aggregates": result.aggregates,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def load_run(run_dir) -> RunResult:
    """Rehydrate a RunResult from a run directory written by save_run."""
    agg_path = os.path.join(run_dir, "aggregates.json")
    with open(agg_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    cards = []
    with open(os.path.join(run_dir, "cards.jsonl"), encoding="utf-8") as fh:
        for line in fh:
            d = json.loads(line)
            cards.append(
                metrics.ScoreCard(
                    doc_id=d["doc_id"],
                    model_name=d["model_name"],
                    r2=metrics.PRF(d["r2_p"], d["r2_r"], d["r2_f1"]),
                    rl=metrics.PRF(d["rl_p"], d["rl_r"], d["rl_f1"]),
                    meteor=d["meteor"],
                    bleu_percent=d["bleu_percent"],
                    summac=d["summac"],
                    num_prec=d["num_prec"],
                    ne_prec=d["ne_prec"],
                )
            )
    return RunResult(
        model_name=meta["model_name"],
        family=meta["family"],
        cards=cards,
        aggregates=meta["aggregates"],
    )
