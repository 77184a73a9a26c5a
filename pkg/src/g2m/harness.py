"""End-to-end zero-shot evaluation: prompt, query, persist, parse, score.

Raw response text is persisted verbatim before any parsing, so a run
directory is a complete record: metrics can always be recomputed from
records.jsonl plus the dataset manifest, and a finished run can itself be
replayed as an adapter. Transport failures are kept out of the metric
denominator but reported alongside.
"""

from __future__ import annotations

import base64
import hashlib
import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from . import metrics, parsing, prompts
from .grid_gen import CANONICAL_PALETTE, DatasetManifest, Palette, load_manifest

API_KEY_ENV = "G2M_API_KEY"
API_BASE_ENV = "G2M_API_BASE"
DEFAULT_CONCURRENCY = 4
PROPRIETARY_EVAL_COUNT = 300

_RETRYABLE_STATUS = {408, 409, 429, 500, 502, 503, 504}


class TransportError(Exception):
    """Adapter could not produce a response (after retries, if any)."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class MissingResponseError(TransportError):
    """Replay source has no stored response for the requested id."""


@dataclass
class QueryResult:
    text: str
    attempts: int
    latency_s: float


class ReplayAdapter:
    """Serves previously captured raw responses keyed by sample id."""

    kind = "replay"

    def __init__(self, responses: dict[str, str], label: str = "replay"):
        self.responses = dict(responses)
        self.label = label

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayAdapter":
        """Load a replay source from JSON-lines with id/response fields
        (a run's records.jsonl works as-is)."""
        responses = {}
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("response") is not None:
                responses[obj["id"]] = obj["response"]
        return cls(responses, label=f"replay:{Path(path).name}")

    def query(self, sample_id: str, prompt: str, image_png: bytes | None,
              max_tokens: int) -> QueryResult:
        if sample_id not in self.responses:
            raise MissingResponseError(f"no stored response for id {sample_id!r}")
        return QueryResult(text=self.responses[sample_id], attempts=1, latency_s=0.0)


class HttpAdapter:
    """Chat-completions style HTTP adapter with retry/backoff.

    Sends the prompt plus the PNG as a base64 data URL at temperature 0.
    Rate-limit and server errors retry with exponential backoff and jitter;
    other HTTP errors fail immediately.
    """

    kind = "http"

    def __init__(self, endpoint: str, api_key: str = "", model: str = "default",
                 timeout: float = 120.0, max_retries: int = 4,
                 backoff_base: float = 1.0, min_interval: float = 0.0,
                 role: str = "user", session=None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.min_interval = min_interval
        self.role = role
        self.label = f"http:{model}"
        self._session = session or requests.Session()
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _throttle(self):
        if self.min_interval <= 0:
            return
        with self._lock:
            wait = self._last_request + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _payload(self, prompt: str, image_png: bytes, max_tokens: int) -> dict:
        data_url = "data:image/png;base64," + base64.b64encode(image_png).decode("ascii")
        return {
            "model": self.model,
            "temperature": 0,
            "max_tokens": max_tokens,
            "messages": [{
                "role": self.role,
                "content": [
                    {"type": "text", "text": prompt},
                    {"type": "image_url", "image_url": {"url": data_url}},
                ],
            }],
        }

    def query(self, sample_id: str, prompt: str, image_png: bytes,
              max_tokens: int) -> QueryResult:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = self._payload(prompt, image_png, max_tokens)
        start = time.monotonic()
        last_error = None
        for attempt in range(1, self.max_retries + 1):
            self._throttle()
            try:
                resp = self._session.post(self.endpoint, json=payload,
                                          headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = TransportError(f"request failed: {exc}")
            else:
                if resp.status_code == 200:
                    body = resp.json()
                    text = body["choices"][0]["message"]["content"]
                    return QueryResult(text=text, attempts=attempt,
                                       latency_s=time.monotonic() - start)
                if resp.status_code not in _RETRYABLE_STATUS:
                    raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}",
                                         status=resp.status_code)
                last_error = TransportError(f"HTTP {resp.status_code}",
                                            status=resp.status_code)
            if attempt < self.max_retries:
                delay = self.backoff_base * (2 ** (attempt - 1))
                time.sleep(delay + random.uniform(0, delay / 4))
        raise TransportError(f"retries exhausted: {last_error}",
                             status=getattr(last_error, "status", None))


def _record_for_sample(rec, manifest: DatasetManifest, adapter,
                       palette: Palette, role_note: str | None = None) -> dict:
    mapping = prompts.ColorMapping.from_palette(rec.c, palette)
    prompt = prompts.build_prompt(rec.n, rec.n, mapping)
    budget = prompts.max_tokens(rec.n, rec.n)
    image_png = None
    if adapter.kind == "http":
        image_png = manifest.image_path(rec).read_bytes()
    base = {"id": rec.id,
            "prompt_sha256": hashlib.sha256(prompt.encode()).hexdigest()}
    try:
        result = adapter.query(rec.id, prompt, image_png, budget)
    except TransportError as exc:
        base.update({"response": None, "outcome": None, "exact_match": False,
                     "cell_accuracy": 0.0, "latency_s": 0.0, "attempts": 0,
                     "transport_error": str(exc)})
        return base
    outcome = parsing.check_tokens(
        parsing.parse_cascade(result.text, rec.n, rec.n), rec.c)
    pred = outcome.rows() if outcome.ok else None
    base.update({
        "response": result.text,
        "outcome": outcome.to_json(),
        "exact_match": metrics.exact_match(pred, rec.matrix),
        "cell_accuracy": metrics.cell_accuracy(pred, rec.matrix),
        "latency_s": round(result.latency_s, 6),
        "attempts": result.attempts,
        "transport_error": None,
    })
    return base


def load_records(run_dir: str | Path) -> list[dict]:
    path = Path(run_dir) / "records.jsonl"
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def aggregate_records(records: list[dict], manifest: DatasetManifest,
                      palette: Palette = CANONICAL_PALETTE,
                      reparse: bool = False) -> dict:
    """Build aggregate metrics from persisted records via the metrics module.

    With reparse=True the stored outcomes are ignored and every raw response
    is pushed through the cascade again; the two paths must agree because
    raw text is stored verbatim.
    """
    truth_by_id = {rec.id: rec for rec in manifest.records}
    scored = []
    transport_failures = 0
    n = c = None
    for record in sorted(records, key=lambda r: r["id"]):
        rec = truth_by_id[record["id"]]
        n, c = rec.n, rec.c
        if record.get("transport_error"):
            transport_failures += 1
            continue
        if reparse:
            outcome = parsing.check_tokens(
                parsing.parse_cascade(record["response"], rec.n, rec.n), rec.c)
        else:
            outcome = parsing.ParseOutcome.from_json(record["outcome"])
        scored.append((outcome.rows() if outcome.ok else None, rec.matrix))
    if not scored:
        raise ValueError("no scoreable records")
    names = [palette.name(i) for i in range(c)]
    summary = metrics.summarize(scored, n, c, color_names=names)
    summary["transport_failures"] = transport_failures
    return summary


def _dump_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True))


def run_eval(manifest: str | Path | DatasetManifest, adapter,
             out_dir: str | Path, concurrency: int = DEFAULT_CONCURRENCY,
             palette: Palette = CANONICAL_PALETTE, limit: int | None = None) -> dict:
    """Evaluate an adapter over a manifest into a run directory.

    Resumable: samples already present in records.jsonl are skipped. Record
    persistence goes through this single writer thread; the aggregate is a
    pure function of the final record set.
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = load_manifest(manifest)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    done = {r["id"] for r in load_records(out_dir)}
    targets = manifest.records[:limit] if limit else manifest.records
    pending = [rec for rec in targets if rec.id not in done]

    with records_path.open("a") as sink:
        with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
            futures = [pool.submit(_record_for_sample, rec, manifest, adapter, palette)
                       for rec in pending]
            for fut in futures:
                sink.write(json.dumps(fut.result(), sort_keys=True) + "\n")
                sink.flush()

    records = load_records(out_dir)
    wanted = {rec.id for rec in targets}
    aggregate = aggregate_records([r for r in records if r["id"] in wanted], manifest,
                                  palette=palette)
    _dump_json(out_dir / "aggregate.json", aggregate)
    _dump_json(out_dir / "run.json", {
        "adapter": getattr(adapter, "label", adapter.kind),
        "adapter_kind": adapter.kind,
        "samples": len(targets),
        "concurrency": concurrency,
        "n": aggregate["n"],
        "c": aggregate["c"],
        "template_version": prompts.TEMPLATE_VERSION,
    })
    return aggregate
