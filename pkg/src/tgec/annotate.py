"""Batch client for LLM-based sentence correction.

Sends each source sentence to a chat-completion-style endpoint with a
correction prompt and collects parallel pairs. Completions are journaled
to an append-only checkpoint after each request, so a killed run resumes
where it stopped without re-requesting anything.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import requests
from concurrent.futures import ThreadPoolExecutor

log = logging.getLogger(__name__)

STATUSES = ("ok", "refused", "transport_error")

DEFAULT_PROMPT = (
    "Aşağıdaki Türkçe cümledeki yazım ve dil bilgisi hatalarını düzelt. "
    "Sadece düzeltilmiş cümleyi yaz; anlamı, etiketleri (#...) ve özel "
    "isimlerin büyük harflerini değiştirme.\n\n{sentence}"
)


class AnnotationConfigError(Exception):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str = "gpt-4"
    api_key_env: str = ""  # name of the env var holding the credential; "" = none
    timeout: float = 30.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_max: float = 30.0
    concurrency: int = 4


@dataclass(frozen=True)
class AnnotationJob:
    sentences: tuple[tuple[str, str], ...]  # (id, source), ids unique
    endpoint: EndpointConfig
    checkpoint_path: Path
    prompt_template: str = DEFAULT_PROMPT

    def validate(self) -> None:
        ids = [i for i, _ in self.sentences]
        if len(ids) != len(set(ids)):
            raise AnnotationConfigError("sentence ids are not unique")
        if self.prompt_template.count("{sentence}") != 1:
            raise AnnotationConfigError(
                "prompt template must contain exactly one {sentence} slot")


@dataclass(frozen=True)
class AnnotationRecord:
    id: str
    source: str
    corrected: str
    status: str  # ok | refused | transport_error
    attempts: int


@dataclass
class _Checkpoint:
    path: Path
    done: dict[str, tuple[str, str]] = field(default_factory=dict)  # id -> (status, corrected)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def open(cls, path: Path) -> "_Checkpoint":
        cp = cls(path)
        if path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    log.warning("skipping malformed checkpoint line: %r", line)
                    continue
                cp.done[parts[0]] = (parts[1], parts[2])
        return cp

    def append(self, record: AnnotationRecord) -> None:
        corrected = record.corrected.replace("\t", " ").replace("\n", " ")
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(f"{record.id}\t{record.status}\t{corrected}\n")
                handle.flush()
            self.done[record.id] = (record.status, corrected)


def _resolve_credential(config: EndpointConfig) -> Optional[str]:
    if not config.api_key_env:
        return None
    key = os.environ.get(config.api_key_env)
    if not key:
        raise AnnotationConfigError(
            f"credential environment variable {config.api_key_env} is not set")
    return key


def _request_once(config: EndpointConfig, prompt: str,
                  api_key: Optional[str]) -> tuple[str, str]:
    """One HTTP round trip. Returns (status, corrected); raises
    requests.RequestException on transport problems."""
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    response = requests.post(
        config.base_url,
        json={"model": config.model,
              "messages": [{"role": "user", "content": prompt}]},
        headers=headers,
        timeout=config.timeout,
    )
    if response.status_code in (408, 429) or response.status_code >= 500:
        raise requests.RequestException(f"transient status {response.status_code}")
    if response.status_code != 200:
        return "refused", ""
    try:
        content = response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError):
        return "refused", ""
    corrected = " ".join(str(content).split())
    if not corrected:
        return "refused", ""
    return "ok", corrected


def _annotate_one(job: AnnotationJob, sentence_id: str, source: str,
                  api_key: Optional[str]) -> AnnotationRecord:
    prompt = job.prompt_template.format(sentence=source)
    attempts = 0
    delay = job.endpoint.backoff_base
    while True:
        attempts += 1
        try:
            status, corrected = _request_once(job.endpoint, prompt, api_key)
            return AnnotationRecord(sentence_id, source, corrected, status, attempts)
        except requests.RequestException as exc:
            if attempts >= job.endpoint.max_attempts:
                log.warning("id %s failed after %d attempts: %s", sentence_id, attempts, exc)
                return AnnotationRecord(sentence_id, source, "", "transport_error", attempts)
            time.sleep(delay)
            delay = min(delay * 2, job.endpoint.backoff_max)


def annotate_batch(job: AnnotationJob) -> list[AnnotationRecord]:
    """Annotate every job sentence, skipping ids already in the checkpoint.
    Returns one record per input id, in input order."""
    job.validate()
    api_key = _resolve_credential(job.endpoint)
    checkpoint = _Checkpoint.open(job.checkpoint_path)

    pending = [(i, s) for i, s in job.sentences if i not in checkpoint.done]
    fresh: dict[str, AnnotationRecord] = {}
    if pending:
        def work(item: tuple[str, str]) -> AnnotationRecord:
            record = _annotate_one(job, item[0], item[1], api_key)
            checkpoint.append(record)
            return record

        with ThreadPoolExecutor(max_workers=job.endpoint.concurrency) as pool:
            for record in pool.map(work, pending):
                fresh[record.id] = record

    # Records replayed from the checkpoint carry attempts=0: the journal
    # stores outcomes, not retry counts.
    records = []
    for sentence_id, source in job.sentences:
        record = fresh.get(sentence_id)
        if record is None:
            status, corrected = checkpoint.done[sentence_id]
            record = AnnotationRecord(sentence_id, source, corrected, status, attempts=0)
        records.append(record)
    return records


def export_pairs(records: Sequence[AnnotationRecord], pairs_path: str | Path,
                 rejects_path: str | Path) -> tuple[int, int]:
    """Write ok records as source<TAB>corrected in input order; non-ok ids
    go to the rejects sidecar. Returns (exported, rejected) counts."""
    exported = rejected = 0
    with open(pairs_path, "w", encoding="utf-8") as pairs, \
            open(rejects_path, "w", encoding="utf-8") as rejects:
        for record in records:
            if record.status == "ok":
                pairs.write(f"{record.source}\t{record.corrected}\n")
                exported += 1
            else:
                rejects.write(f"{record.id}\n")
                rejected += 1
    return exported, rejected
