"""Summarization backends behind a single contract.

Prompt construction for the four LLM variants, HTTP completion/chat
clients with retry and rate limiting, a local-command backend, the
built-in extractive baseline, and a deterministic mock for tests. One
orchestration path chunks a document, budgets each chunk, and reassembles.
"""

from __future__ import annotations

import datetime
import json
import os
import random
import subprocess
import threading
import time
from dataclasses import dataclass, field

import requests

from .chunker import BudgetParams, assemble_summary, chunk_document
from .errors import BackendError, ConfigError, ValidationError
from .extractive import DEFAULT_WEIGHTS, extract_summary_text

PROMPT_STYLES = ("tldr_suffix", "summ_suffix_words", "tldr_prefix", "summ_prefix_words")

# The four reference model variants and the prompt shape each one uses.
MODEL_STYLE = {
    "davinci-tldr": "tldr_suffix",
    "davinci-summ": "summ_suffix_words",
    "chatgpt-tldr": "tldr_prefix",
    "chatgpt-summ": "summ_prefix_words",
}

BACKEND_KINDS = ("http_completion", "http_chat", "local_command", "extractive_builtin", "mock")


def build_prompt(style: str, chunk_text: str, target_words: int | None = None) -> str:
    """Exact prompt template for a style; summ styles need a word target."""
    if style not in PROMPT_STYLES:
        raise ValidationError(f"unknown prompt style {style!r}")
    if not chunk_text:
        raise ValidationError("chunk_text must be non-empty")
    if style in ("summ_suffix_words", "summ_prefix_words"):
        if target_words is None or target_words < 1:
            raise ValidationError("summ prompt styles require target_words >= 1")
    if style == "tldr_suffix":
        return f"{chunk_text} Tl;Dr"
    if style == "tldr_prefix":
        return f"Tl;Dr {chunk_text}"
    if style == "summ_suffix_words":
        return f"{chunk_text} Summarize the document in {target_words} words"
    return f"Summarize the document in {target_words} words {chunk_text}"


@dataclass
class BackendConfig:
    name: str
    kind: str = "mock"
    endpoint: str | None = None
    model: str | None = None
    command: list[str] | None = None
    temperature: float = 0.7
    presence_penalty: float = 1.0
    frequency_penalty: float = 0.0
    max_retries: int = 3
    requests_per_minute: int = 0  # 0 = unthrottled
    timeout: float = 120.0
    api_key_env: str | None = None
    family: str = "llm"  # llm | abstractive | extractive
    prompt_style: str = "tldr_suffix"
    extractive_weights: tuple = DEFAULT_WEIGHTS

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ConfigError(f"unknown backend kind {self.kind!r}", field="kind")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0", field="temperature")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0", field="max_retries")
        if self.kind in ("http_completion", "http_chat") and not self.endpoint:
            raise ConfigError(f"backend {self.name!r} needs an endpoint", field="endpoint")
        if self.kind == "local_command" and not self.command:
            raise ConfigError(f"backend {self.name!r} needs a command", field="command")
        if self.kind == "extractive_builtin":
            self.family = "extractive"


@dataclass(frozen=True)
class GeneratedSummary:
    doc_id: str
    model_name: str
    text: str
    chunk_summaries: tuple[str, ...]
    prompt_style: str
    created_at: str
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self):
        return {
            "doc_id": self.doc_id,
            "model_name": self.model_name,
            "text": self.text,
            "chunk_summaries": list(self.chunk_summaries),
            "prompt_style": self.prompt_style,
            "created_at": self.created_at,
            "warnings": list(self.warnings),
        }


class RateLimiter:
    """Serializes request admission; shared per backend across workers."""

    def __init__(self, requests_per_minute: int):
        self.interval = 60.0 / requests_per_minute if requests_per_minute > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self):
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if wait > 0:
            time.sleep(wait)


class MockEchoBackend:
    """Echoes the first ``max_words`` words of the chunk text. Deterministic."""

    def __init__(self, cfg):
        self.cfg = cfg

    def summarize_chunk(self, prompt, chunk_text, max_words):
        return " ".join(chunk_text.split()[:max_words])


class ExtractiveBackend:
    """Built-in TF-IDF baseline run through the same chunked path."""

    def __init__(self, cfg):
        self.cfg = cfg

    def summarize_chunk(self, prompt, chunk_text, max_words):
        from .corpus import CaseDocument  # local import avoids a cycle

        doc = CaseDocument(id="chunk", text=chunk_text, word_count=len(chunk_text.split()))
        return extract_summary_text(doc, max_words, self.cfg.extractive_weights)


class _HttpBackend:
    def __init__(self, cfg, session=None):
        self.cfg = cfg
        self.session = session or requests.Session()

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key_env:
            key = os.environ.get(self.cfg.api_key_env)
            if not key:
                raise ConfigError(
                    f"environment variable {self.cfg.api_key_env} is not set",
                    field="api_key_env",
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, payload):
        resp = self.session.post(
            self.cfg.endpoint,
            headers=self._headers(),
            json=payload,
            timeout=self.cfg.timeout,
        )
        resp.raise_for_status()
        return resp.json()


class HttpCompletionBackend(_HttpBackend):
    """Completion-style JSON API: prompt in, generated text out."""

    def summarize_chunk(self, prompt, chunk_text, max_words):
        payload = {
            "model": self.cfg.model or self.cfg.name,
            "prompt": prompt,
            "max_tokens": max_words,
            "temperature": self.cfg.temperature,
            "presence_penalty": self.cfg.presence_penalty,
            "frequency_penalty": self.cfg.frequency_penalty,
        }
        data = self._post(payload)
        if "choices" in data:
            return data["choices"][0].get("text", "")
        return data.get("text", "")


class HttpChatBackend(_HttpBackend):
    """Chat-style JSON API: single user message in, message content out."""

    def summarize_chunk(self, prompt, chunk_text, max_words):
        payload = {
            "model": self.cfg.model or self.cfg.name,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": max_words,
            "temperature": self.cfg.temperature,
        }
        data = self._post(payload)
        if "choices" in data:
            return data["choices"][0].get("message", {}).get("content", "")
        return data.get("content", "")


class LocalCommandBackend:
    """Spawns an executable; prompt on stdin, summary on stdout."""

    def __init__(self, cfg):
        self.cfg = cfg

    def summarize_chunk(self, prompt, chunk_text, max_words):
        env = dict(os.environ, SUMMARY_MAX_WORDS=str(max_words))
        proc = subprocess.run(
            self.cfg.command,
            input=prompt,
            capture_output=True,
            text=True,
            env=env,
            timeout=self.cfg.timeout,
        )
        if proc.returncode != 0:
            raise RuntimeError(
                f"command {self.cfg.command!r} exited {proc.returncode}: "
                f"{proc.stderr.strip()[:500]}"
            )
        return proc.stdout.strip()


_BACKEND_CLASSES = {
    "mock": MockEchoBackend,
    "extractive_builtin": ExtractiveBackend,
    "http_completion": HttpCompletionBackend,
    "http_chat": HttpChatBackend,
    "local_command": LocalCommandBackend,
}


def create_backend(cfg: BackendConfig):
    return _BACKEND_CLASSES[cfg.kind](cfg)


def _call_with_retry(backend, cfg, limiter, prompt, chunk_text, max_words, chunk_index):
    attempts = cfg.max_retries + 1
    delay = 1.0
    for attempt in range(attempts):
        if limiter is not None:
            limiter.acquire()
        try:
            return backend.summarize_chunk(prompt, chunk_text, max_words)
        except Exception as exc:  # noqa: BLE001 - any backend failure is retriable
            if attempt == attempts - 1:
                raise BackendError(
                    f"backend {cfg.name!r} failed on chunk {chunk_index}: {exc}",
                    chunk_index=chunk_index,
                ) from exc
            time.sleep(delay * (0.5 + random.random()))
            delay = min(delay * 2, 30.0)
    raise AssertionError("unreachable")


def summarize_document(
    doc,
    gold_words: int,
    cfg: BackendConfig,
    style: str | None = None,
    budget: BudgetParams | None = None,
    chunk_mode: str = "hard",
    backend=None,
    limiter=None,
    raw_dir=None,
) -> GeneratedSummary:
    """Chunk, budget, summarize and reassemble one document.

    One backend call per chunk, in order; empty responses become empty
    chunk summaries with a warning; failures raise :class:`BackendError`
    carrying the chunk index.
    """
    style = style or cfg.prompt_style
    if budget is None:
        budget = BudgetParams(doc_words=doc.word_count, gold_words=gold_words)
    if cfg.kind == "extractive_builtin":
        # extractive selection has no input-length limit: whole doc, one pass
        budget = BudgetParams(
            doc_words=budget.doc_words,
            gold_words=budget.gold_words,
            chunk_words=max(budget.chunk_words, doc.word_count),
            token_limit=budget.token_limit,
        )
    backend = backend or create_backend(cfg)
    plan = chunk_document(doc, budget, mode=chunk_mode)

    chunk_summaries = []
    warnings = []
    for index, chunk in enumerate(plan.chunks):
        prompt = build_prompt(style, chunk.text, chunk.target_summary_words)
        text = _call_with_retry(
            backend, cfg, limiter, prompt, chunk.text, chunk.target_summary_words, index
        )
        if raw_dir is not None:
            os.makedirs(raw_dir, exist_ok=True)
            raw_path = os.path.join(raw_dir, f"{doc.id}.{cfg.name}.chunk{index}.json")
            with open(raw_path, "w", encoding="utf-8") as fh:
                json.dump({"doc_id": doc.id, "chunk": index, "response": text}, fh)
        if not text or not text.strip():
            warnings.append(f"chunk {index}: backend returned empty summary")
            text = ""
        chunk_summaries.append(text)

    text = assemble_summary(chunk_summaries)
    if not text:
        warnings.append("all chunk summaries empty")
    return GeneratedSummary(
        doc_id=doc.id,
        model_name=cfg.name,
        text=text,
        chunk_summaries=tuple(chunk_summaries),
        prompt_style=style,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        warnings=tuple(warnings),
    )
