"""Scorer sidecar: NLI and NER over HTTP for consistency evaluation."""

__version__ = "0.1.0"
