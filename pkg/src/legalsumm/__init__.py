"""Evaluation harness for long legal case-judgement summarization.

Chunked generation against pluggable backends, gold-standard match metrics
(ROUGE-2/L, METEOR, BLEU), faithfulness metrics (number/entity precision,
NLI-based consistency), and span-level hallucination audits.
"""

__version__ = "0.1.0"
