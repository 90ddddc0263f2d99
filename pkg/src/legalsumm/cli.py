"""Command-line entry point.

Subcommands: ``stats``, ``summarize``, ``evaluate``, ``audit``, ``report``.
All are driven by a YAML config file; every setting can be overridden on
the command line. Exit codes: 0 success, 1 configuration/data error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import yaml

from . import backends, consistency, corpus, evalrunner, report
from .chunker import BudgetParams
from .errors import ConfigError, InputError, LegalsummError, ValidationError


@dataclass
class RunConfig:
    corpus_path: str | None = None
    out_dir: str = "runs/default"
    models: list = field(default_factory=list)
    chunk_words: int = 1024
    chunk_mode: str = "hard"
    budget: str = "gold_ratio"  # or "fixed:<ratio>"
    scorer_url: str | None = None
    nli_threshold: float = 0.5
    extractive_weights: tuple = (0.2, 0.2, 0.2)
    workers: int = 1
    force: bool = False

    def validate(self):
        if self.chunk_words < 1:
            raise ConfigError("chunk_words must be >= 1", field="chunk_words")
        if self.chunk_mode not in ("hard", "sentence_aligned"):
            raise ConfigError(f"unknown chunk_mode {self.chunk_mode!r}", field="chunk_mode")
        if not 0 <= self.nli_threshold <= 1:
            raise ConfigError("nli_threshold must be in [0, 1]", field="nli_threshold")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", field="workers")
        if self.budget != "gold_ratio":
            if not self.budget.startswith("fixed:"):
                raise ConfigError(f"unknown budget mode {self.budget!r}", field="budget")
            try:
                ratio = float(self.budget.split(":", 1)[1])
            except ValueError as exc:
                raise ConfigError("fixed budget ratio must be a number", field="budget") from exc
            if not 0 < ratio <= 1:
                raise ConfigError("fixed budget ratio must be in (0, 1]", field="budget")


def load_config(path) -> RunConfig:
    if not os.path.isfile(path):
        raise InputError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    cfg = RunConfig()
    cfg.corpus_path = data.get("corpus", cfg.corpus_path)
    cfg.out_dir = data.get("out", cfg.out_dir)
    cfg.chunk_words = int(data.get("chunk_words", cfg.chunk_words))
    cfg.chunk_mode = data.get("chunk_mode", cfg.chunk_mode)
    cfg.budget = str(data.get("budget", cfg.budget))
    cfg.scorer_url = data.get("scorer_url", cfg.scorer_url)
    cfg.nli_threshold = float(data.get("nli_threshold", cfg.nli_threshold))
    cfg.workers = int(data.get("workers", cfg.workers))
    weights = data.get("extractive_weights")
    if weights:
        cfg.extractive_weights = (
            float(weights.get("entity", 0.2)),
            float(weights.get("date", 0.2)),
            float(weights.get("heading", 0.2)),
        )
    for entry in data.get("models", []):
        if "name" not in entry:
            raise ConfigError("every model entry needs a name", field="models")
        kwargs = {k: v for k, v in entry.items() if k != "extractive_weights"}
        if "command" in kwargs and isinstance(kwargs["command"], str):
            kwargs["command"] = kwargs["command"].split()
        kwargs.setdefault("extractive_weights", cfg.extractive_weights)
        cfg.models.append(backends.BackendConfig(**kwargs))
    return cfg


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.corpus:
        cfg.corpus_path = args.corpus
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "workers", None):
        cfg.workers = args.workers
    if getattr(args, "chunk_words", None):
        cfg.chunk_words = args.chunk_words
    if getattr(args, "chunk_mode", None):
        cfg.chunk_mode = args.chunk_mode
    if getattr(args, "budget", None):
        cfg.budget = args.budget
    if getattr(args, "scorer_url", None):
        cfg.scorer_url = args.scorer_url
    if getattr(args, "force", False):
        cfg.force = True
    cfg.validate()
    return cfg


def _selected_models(cfg, args):
    models = cfg.models
    if getattr(args, "model", None):
        models = [m for m in models if m.name in args.model]
        missing = set(args.model) - {m.name for m in models}
        if missing:
            raise ConfigError(f"unknown model(s): {sorted(missing)}", field="models")
    if not models:
        raise ConfigError("no models configured", field="models")
    return models


def _scorer(cfg):
    if cfg.scorer_url:
        return consistency.RemoteScorer(cfg.scorer_url)
    return consistency.LexicalOverlapScorer()


def _load_pairs(cfg):
    if not cfg.corpus_path:
        raise ConfigError("no corpus configured", field="corpus")
    return corpus.load_corpus(cfg.corpus_path)


def _gold_words_for(doc, gold, cfg):
    if cfg.budget == "gold_ratio":
        return gold.word_count
    ratio = float(cfg.budget.split(":", 1)[1])
    return max(1, round(ratio * doc.word_count))


def cmd_stats(cfg, args):
    pairs = _load_pairs(cfg)
    stats = corpus.corpus_stats(pairs)
    print(f"documents: {stats.n_docs}")
    print(f"avg document words: {stats.avg_doc_words:.2f}")
    print(f"avg summary words: {stats.avg_summary_words:.2f}")
    return 0


def _summaries_path(cfg, model_name):
    return os.path.join(cfg.out_dir, "summaries", f"{model_name}.jsonl")


def cmd_summarize(cfg, args):
    pairs = _load_pairs(cfg)
    models = _selected_models(cfg, args)
    summaries_dir = os.path.join(cfg.out_dir, "summaries")
    if os.path.isdir(summaries_dir) and os.listdir(summaries_dir) and not cfg.force:
        raise InputError(
            f"output directory {summaries_dir} already contains summaries; "
            "use --force to overwrite"
        )
    os.makedirs(summaries_dir, exist_ok=True)

    for model_cfg in models:
        backend = backends.create_backend(model_cfg)
        limiter = backends.RateLimiter(model_cfg.requests_per_minute)
        raw_dir = os.path.join(cfg.out_dir, "runs", model_cfg.name, "raw_responses")

        def one(pair):
            doc, gold = pair
            budget = BudgetParams(
                doc_words=doc.word_count,
                gold_words=_gold_words_for(doc, gold, cfg),
                chunk_words=cfg.chunk_words,
            )
            return backends.summarize_document(
                doc,
                budget.gold_words,
                model_cfg,
                budget=budget,
                chunk_mode=cfg.chunk_mode,
                backend=backend,
                limiter=limiter,
                raw_dir=raw_dir,
            )

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                generated = list(pool.map(one, pairs))
        else:
            generated = [one(p) for p in pairs]

        path = _summaries_path(cfg, model_cfg.name)
        with open(path, "w", encoding="utf-8") as fh:
            for summary in generated:
                fh.write(json.dumps(summary.as_dict(), sort_keys=True) + "\n")
        print(f"[{model_cfg.name}] wrote {len(generated)} summaries to {path}", file=sys.stderr)
    return 0


def _load_summaries(cfg, model_name):
    path = _summaries_path(cfg, model_name)
    if not os.path.isfile(path):
        raise InputError(f"summaries file not found: {path}")
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            out[record["doc_id"]] = record["text"]
    return out


def cmd_evaluate(cfg, args):
    pairs = _load_pairs(cfg)
    models = _selected_models(cfg, args)
    scorer = _scorer(cfg)
    for model_cfg in models:
        summaries = _load_summaries(cfg, model_cfg.name)
        result = evalrunner.evaluate_corpus(
            pairs, summaries, model_cfg.name, family=model_cfg.family, scorer=scorer
        )
        run_dir = os.path.join(cfg.out_dir, "runs", model_cfg.name)
        evalrunner.save_run(result, run_dir)
        print(f"[{model_cfg.name}] wrote score cards to {run_dir}", file=sys.stderr)
    return 0


def cmd_audit(cfg, args):
    pairs = _load_pairs(cfg)
    models = _selected_models(cfg, args)
    scorer = _scorer(cfg)
    audit_dir = os.path.join(cfg.out_dir, "audit")
    os.makedirs(audit_dir, exist_ok=True)
    for model_cfg in models:
        summaries = _load_summaries(cfg, model_cfg.name)
        for doc, _ in pairs:
            text = summaries.get(doc.id)
            if text is None:
                raise ValidationError(f"no summary for document {doc.id!r}")
            flags = consistency.audit_summary(
                text, doc.text, scorer=scorer, nli_threshold=cfg.nli_threshold
            )
            base = os.path.join(audit_dir, f"{doc.id}.{model_cfg.name}")
            with open(base + ".json", "w", encoding="utf-8") as fh:
                fh.write(report.render_audit(text, flags, "json"))
            with open(base + ".html", "w", encoding="utf-8") as fh:
                fh.write(report.render_audit(text, flags, "html"))
        print(f"[{model_cfg.name}] wrote audit reports to {audit_dir}", file=sys.stderr)
    return 0


def cmd_report(cfg, args):
    models = _selected_models(cfg, args)
    results = []
    for model_cfg in models:
        run_dir = os.path.join(cfg.out_dir, "runs", model_cfg.name)
        if not os.path.isfile(os.path.join(run_dir, "aggregates.json")):
            raise InputError(f"no evaluation results in {run_dir}; run evaluate first")
        results.append(evalrunner.load_run(run_dir))
    evalrunner.mark_significance(results)

    for fmt, ext in (("csv", "csv"), ("json", "json"), ("markdown", "md")):
        with open(os.path.join(cfg.out_dir, f"report.{ext}"), "w", encoding="utf-8") as fh:
            fh.write(report.render_table(results, fmt))
    if any(r.family != "extractive" for r in results):
        for fmt, ext in (("csv", "csv"), ("json", "json"), ("markdown", "md")):
            path = os.path.join(cfg.out_dir, f"report_consistency.{ext}")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(report.render_consistency_table(results, fmt))
    figures = report.render_figures(results, cfg.out_dir)
    print(
        f"wrote report tables and {len(figures)} figure(s) to {cfg.out_dir}",
        file=sys.stderr,
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="legalsumm",
        description="Evaluation harness for long legal judgement summarization",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "stats": cmd_stats,
        "summarize": cmd_summarize,
        "evaluate": cmd_evaluate,
        "audit": cmd_audit,
        "report": cmd_report,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--corpus", help="corpus JSONL file")
        p.add_argument("--model", action="append", help="restrict to named model(s)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int)
        p.add_argument("--chunk-words", type=int, dest="chunk_words")
        p.add_argument("--chunk-mode", dest="chunk_mode", choices=["hard", "sentence_aligned"])
        p.add_argument("--budget", help="gold_ratio or fixed:<ratio>")
        p.add_argument("--scorer-url", dest="scorer_url")
        p.add_argument("--force", action="store_true")
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_overrides(cfg, args)
        return args.fn(cfg, args)
    except ConfigError as exc:
        field_note = f" (field: {exc.field})" if exc.field else ""
        print(f"error: {exc}{field_note}", file=sys.stderr)
        return 1
    except LegalsummError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
