"""Rendering: model comparison tables, span-highlighted audit reports,
and summary figures.

Tables mirror the evaluation layout: eight match-metric columns for every
model grouped by family, and a separate consistency table (SummaC, NEPrec,
NumPrec) for non-extractive models.
"""

from __future__ import annotations

import csv
import html
import io
import json
import os

from .errors import ValidationError
from .metrics import CONSISTENCY_METRIC_KEYS, MATCH_METRIC_KEYS

MATCH_COLUMNS = (
    ("R2-P", "r2_p"),
    ("R2-R", "r2_r"),
    ("R2-F1", "r2_f1"),
    ("RL-P", "rl_p"),
    ("RL-R", "rl_r"),
    ("RL-F1", "rl_f1"),
    ("ME", "meteor"),
    ("BLEU(%)", "bleu_percent"),
)

CONSISTENCY_COLUMNS = (
    ("SummaC", "summac"),
    ("NEPrec", "ne_prec"),
    ("NumPrec", "num_prec"),
)

FAMILY_ORDER = ("llm", "abstractive", "extractive")
FAMILY_LABELS = {
    "llm": "General-domain LLMs",
    "abstractive": "Domain-specific abstractive models",
    "extractive": "Extractive models",
}

_FLAG_COLORS = {
    "unsupported_number": "#ffb3b3",
    "unsupported_entity": "#ffd9b3",
    "low_nli_sentence": "#fff3b3",
    "merge_artifact": "#d1b3ff",
}


def _fmt(key, value):
    return f"{value:.2f}" if key == "bleu_percent" else f"{value:.4f}"


def _grouped(results):
    by_family = {fam: [] for fam in FAMILY_ORDER}
    for result in results:
        by_family.setdefault(result.family, []).append(result)
    return by_family


def _best_in_family(group, key):
    """Model name holding the best aggregate in a family; ties to first."""
    best = None
    for result in group:
        if best is None or result.aggregates[key] > best.aggregates[key]:
            best = result
    return best.model_name if best else None


def _table_rows(results, columns):
    """(family, model, {key: (text, is_best, significant)}) per result."""
    by_family = _grouped(results)
    rows = []
    for family in FAMILY_ORDER:
        group = by_family.get(family, [])
        best = {key: _best_in_family(group, key) for _, key in columns}
        for result in group:
            cells = {}
            for _, key in columns:
                cells[key] = (
                    _fmt(key, result.aggregates[key]),
                    result.model_name == best[key],
                    bool(result.significance.get(key, False)),
                )
            rows.append((family, result.model_name, cells))
    return rows


def render_table(results, format: str = "csv", columns=MATCH_COLUMNS) -> str:
    """Serialize the comparison table deterministically.

    Significant cells carry a trailing asterisk; best-in-family cells are
    marked per format (separate flag in json, bold in markdown, ``^`` in
    csv-adjacent plain cells are avoided: csv keeps only the asterisk).
    """
    if not results:
        raise ValidationError("render_table needs at least one result")
    if format not in ("csv", "json", "markdown"):
        raise ValidationError(f"unknown table format {format!r}")
    rows = _table_rows(results, columns)
    headers = [label for label, _ in columns]

    if format == "json":
        payload = []
        for family, model, cells in rows:
            entry = {"family": family, "model": model, "metrics": {}}
            for label, key in columns:
                text, best, sig = cells[key]
                entry["metrics"][label] = {
                    "value": text,
                    "best_in_family": best,
                    "significant": sig,
                }
            payload.append(entry)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["family", "model"] + headers)
        for family, model, cells in rows:
            out = [family, model]
            for _, key in columns:
                text, _, sig = cells[key]
                out.append(text + "*" if sig else text)
            writer.writerow(out)
        return buf.getvalue()

    lines = ["| family | model | " + " | ".join(headers) + " |"]
    lines.append("|" + "---|" * (len(headers) + 2))
    for family, model, cells in rows:
        out = [family, model]
        for _, key in columns:
            text, best, sig = cells[key]
            if sig:
                text += "\\*"
            if best:
                text = f"**{text}**"
            out.append(text)
        lines.append("| " + " | ".join(out) + " |")
    return "\n".join(lines) + "\n"


def render_consistency_table(results, format: str = "csv") -> str:
    """Consistency table for non-extractive models only."""
    non_extractive = [r for r in results if r.family != "extractive"]
    if not non_extractive:
        raise ValidationError("no non-extractive results to tabulate")
    return render_table(non_extractive, format, columns=CONSISTENCY_COLUMNS)


def merge_overlapping_flags(flags):
    """Collapse overlapping spans into single highlights listing all kinds."""
    ordered = sorted(flags, key=lambda f: (f.start, f.end))
    merged = []
    for flag in ordered:
        if merged and flag.start < merged[-1]["end"]:
            merged[-1]["end"] = max(merged[-1]["end"], flag.end)
            merged[-1]["kinds"].append(flag.kind)
            merged[-1]["details"].append(flag.detail)
        else:
            merged.append(
                {
                    "start": flag.start,
                    "end": flag.end,
                    "kinds": [flag.kind],
                    "details": [flag.detail],
                }
            )
    return merged


def render_audit(summary: str, flags, format: str = "json") -> str:
    """Span-level audit report as JSON or a self-contained HTML page."""
    if format not in ("json", "html"):
        raise ValidationError(f"unknown audit format {format!r}")
    for flag in flags:
        if not (0 <= flag.start <= flag.end <= len(summary)):
            raise ValidationError(
                f"flag span ({flag.start}, {flag.end}) out of range for summary"
            )

    if format == "json":
        return (
            json.dumps(
                {"summary": summary, "flags": [f.as_dict() for f in flags]},
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )

    merged = merge_overlapping_flags(flags)
    pieces = []
    pos = 0
    for span in merged:
        pieces.append(html.escape(summary[pos : span["start"]]))
        color = _FLAG_COLORS.get(span["kinds"][0], "#eeeeee")
        title = html.escape("; ".join(span["details"]))
        kinds = html.escape(",".join(sorted(set(span["kinds"]))))
        pieces.append(
            f'<mark data-kinds="{kinds}" title="{title}" '
            f'style="background:{color}">'
            + html.escape(summary[span["start"] : span["end"]])
            + "</mark>"
        )
        pos = span["end"]
    pieces.append(html.escape(summary[pos:]))
    body = "".join(pieces)

    index_items = "".join(
        f"<li><code>{html.escape(f.kind)}</code> [{f.start},{f.end}] "
        f"{html.escape(f.detail)} (severity {f.severity:.2f})</li>"
        for f in flags
    )
    return (
        "<!DOCTYPE html><html><head><meta charset='utf-8'>"
        "<title>Summary audit</title></head><body>"
        f"<div style='white-space:pre-wrap;font-family:serif'>{body}</div>"
        f"<h3>Flags ({len(flags)})</h3><ul>{index_items}</ul>"
        "</body></html>\n"
    )


def render_figures(results, out_dir):
    """Bar charts of aggregate metrics per model, written as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written = []

    def _bar_chart(columns, results_subset, filename, title):
        if not results_subset:
            return
        labels = [label for label, _ in columns]
        x = range(len(labels))
        width = 0.8 / max(1, len(results_subset))
        fig, ax = plt.subplots(figsize=(10, 4.5))
        for i, result in enumerate(results_subset):
            values = [result.aggregates[key] for _, key in columns]
            offsets = [xi + i * width for xi in x]
            ax.bar(offsets, values, width=width, label=result.model_name)
        ax.set_xticks([xi + 0.4 - width / 2 for xi in x])
        ax.set_xticklabels(labels, rotation=30, ha="right")
        ax.set_title(title)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, filename)
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    # BLEU is on a 0-100 scale; plot it scaled to [0,1] with the others
    scaled = []
    for result in results:
        clone = type(result)(
            model_name=result.model_name,
            family=result.family,
            cards=result.cards,
            aggregates=dict(result.aggregates),
            significance=dict(result.significance),
        )
        clone.aggregates["bleu_percent"] = clone.aggregates["bleu_percent"] / 100.0
        scaled.append(clone)

    _bar_chart(MATCH_COLUMNS, scaled, "report_match_metrics.png", "Match with gold summaries")
    _bar_chart(
        CONSISTENCY_COLUMNS,
        [r for r in results if r.family != "extractive"],
        "report_consistency.png",
        "Consistency with source documents",
    )
    return written
