"""Evaluator sessions against a pluggable backend.

Every call to :func:`evaluate_session` (and every retry inside it) is a fresh
session: the backend receives the full system prompt and payload each time
and no conversational state is carried between calls.
"""

from __future__ import annotations

import abc
import hashlib
import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .catalog import build_instructions, heuristic_catalog
from .errors import (
    BackendRefusalError,
    ConfigurationError,
    TransportError,
    TransportExhaustedError,
)
from .ingest import CorpusBundle, EvaluationPayload, package_payload

__all__ = [
    "API_KEY_ENV",
    "BASE_URL_ENV",
    "FAULT_MODES",
    "BackendResponse",
    "EvaluatorBackend",
    "HttpBackend",
    "MockBackend",
    "SessionConfig",
    "SessionRequest",
    "SiteRun",
    "evaluate_session",
    "mock_backend",
    "run_site",
]

log = logging.getLogger(__name__)

API_KEY_ENV = "HEURIKAPPA_API_KEY"
BASE_URL_ENV = "HEURIKAPPA_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com/v1"

FAULT_MODES = ("none", "malformed_severity", "duplicate_heuristic", "prose_wrapper", "non_json")


@dataclass(frozen=True)
class SessionConfig:
    model_name: str = "gpt-4o"
    temperature: float = 0.0
    max_retries: int = 3
    timeout: float = 120.0
    session_index: int = 1
    backoff_base: float = 1.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")
        if self.session_index < 1:
            raise ValueError("session_index starts at 1")


@dataclass(frozen=True)
class SessionRequest:
    """Everything a backend sees for one session; nothing else is shared."""

    system_prompt: str
    user_content: str
    site_id: str
    session_index: int
    model_name: str
    temperature: float
    timeout: float


@dataclass(frozen=True)
class BackendResponse:
    raw_text: str
    transport_metadata: dict = field(default_factory=dict)
    session_index: int = 1
    site_id: str = ""

    @property
    def attempts(self) -> int:
        return int(self.transport_metadata.get("attempts", "1"))


class EvaluatorBackend(abc.ABC):
    """Source of evaluation text. Implementations must tolerate concurrent calls."""

    @abc.abstractmethod
    def submit(self, request: SessionRequest) -> str:
        """Run one fresh session and return the verbatim reply text.

        Raise TransportError (or TimeoutError) for retryable failures.
        """


class HttpBackend(EvaluatorBackend):
    """Chat-completion client: system prompt plus user payload, one request per session."""

    def __init__(self, api_key: str | None = None, base_url: str | None = None,
                 audit_log: str | os.PathLike | None = None, session: requests.Session | None = None):
        api_key = api_key or os.environ.get(API_KEY_ENV)
        if not api_key:
            raise ConfigurationError(f"no API credential: set {API_KEY_ENV} or pass api_key")
        self.api_key = api_key
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL).rstrip("/")
        self.audit_log = Path(audit_log) if audit_log else None
        self._http = session or requests.Session()
        self._audit_lock = threading.Lock()

    def build_body(self, request: SessionRequest) -> dict:
        return {
            "model": request.model_name,
            "temperature": request.temperature,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_content},
            ],
        }

    def submit(self, request: SessionRequest) -> str:
        body = self.build_body(request)
        try:
            resp = self._http.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=request.timeout,
            )
        except requests.Timeout as exc:
            raise TimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._audit(request, body, resp.status_code, resp.text)
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"unexpected response body: {exc}") from exc

    def _audit(self, request, body, status, text):
        if self.audit_log is None:
            return
        record = {
            "site_id": request.site_id,
            "session_index": request.session_index,
            "request": body,
            "status": status,
            "response": text,
        }
        with self._audit_lock, open(self.audit_log, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


_PLACEHOLDER = "N/A"


class MockBackend(EvaluatorBackend):
    """Deterministic offline evaluator.

    Severities are a pure function of ``(seed, site_id, session_index)``:
    each site has a latent severity per heuristic and each session perturbs
    it slightly, so repeated sessions agree often but not always.

    ``severity_faults`` maps ``(site_id, session_index)`` to heuristic
    positions whose severity is emitted broken (alternating ``"high"`` and
    ``null``), which is how dataset-level fault injection is done.
    """

    def __init__(self, seed: int = 0, fault_mode: str = "none", severity_faults=None,
                 disagreement: float = 0.2):
        if fault_mode not in FAULT_MODES:
            raise ValueError(f"unknown fault_mode {fault_mode!r}; expected one of {FAULT_MODES}")
        self.seed = seed
        self.fault_mode = fault_mode
        self.severity_faults = {k: tuple(sorted(v)) for k, v in (severity_faults or {}).items()}
        self.disagreement = disagreement

    def _rng(self, *parts) -> random.Random:
        key = ":".join(str(p) for p in (self.seed, *parts))
        return random.Random(int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big"))

    def severities(self, site_id: str, session_index: int) -> list[int]:
        latent = self._rng("site", site_id)
        noise = self._rng("session", site_id, session_index)
        out = []
        for _ in heuristic_catalog():
            base = latent.choices(range(5), weights=(18, 28, 34, 17, 3))[0]
            if noise.random() < self.disagreement:
                base = min(4, max(0, base + noise.choice((-1, 1))))
            out.append(base)
        return out

    def entries(self, site_id: str, session_index: int) -> list[dict]:
        faults = set(self.severity_faults.get((site_id, session_index), ()))
        entries = []
        for pos, (h, sev) in enumerate(zip(heuristic_catalog(), self.severities(site_id, session_index))):
            issue = sev > 0
            entry = {
                "Heuristic": h.canonical_name,
                "SeverityRating": sev,
                "IssueFound": issue,
                "IssueDescription": f"Mock finding for {h.canonical_name.lower()}." if issue else _PLACEHOLDER,
                "CodeReference": "index.html: Line 1-10" if issue else _PLACEHOLDER,
                "CodeSnippet": "<body>...</body>" if issue else _PLACEHOLDER,
                "EvaluationAnswers": {"Rationale": f"Deterministic mock severity {sev}."},
                "Recommendation": "Address the finding." if issue else _PLACEHOLDER,
            }
            if pos in faults:
                entry["SeverityRating"] = "high" if (sorted(faults).index(pos) + session_index) % 2 else None
            entries.append(entry)

        pick = self._rng("fault", site_id, session_index).randrange(len(entries))
        if self.fault_mode == "malformed_severity":
            entries[pick]["SeverityRating"] = "high"
        elif self.fault_mode == "duplicate_heuristic":
            dup = dict(entries[pick])
            dup["SeverityRating"] = (dup["SeverityRating"] + 1) % 5
            dup["IssueFound"] = dup["SeverityRating"] > 0
            entries.insert(pick + 1, dup)
        return entries

    def render(self, site_id: str, session_index: int) -> str:
        text = json.dumps(self.entries(site_id, session_index), indent=2)
        if self.fault_mode == "prose_wrapper":
            return f"Here is the evaluation you asked for:\n\n```json\n{text}\n```\n\nLet me know if you need more detail."
        if self.fault_mode == "non_json":
            return "I reviewed the site. Overall the usability is reasonable, with a few minor issues in navigation."
        return text

    def submit(self, request: SessionRequest) -> str:
        return self.render(request.site_id, request.session_index)


def mock_backend(seed: int = 0, fault_mode: str = "none") -> MockBackend:
    return MockBackend(seed, fault_mode)


def evaluate_session(payload: EvaluationPayload, backend: EvaluatorBackend, config: SessionConfig,
                     sleep=time.sleep) -> BackendResponse:
    """Run one fresh evaluator session, retrying transport failures with exponential backoff."""
    if not payload.text:
        raise ValueError("payload is empty")
    request = SessionRequest(
        system_prompt=build_instructions(),
        user_content=payload.text,
        site_id=payload.site_id,
        session_index=config.session_index,
        model_name=config.model_name,
        temperature=config.temperature,
        timeout=config.timeout,
    )
    last: Exception | None = None
    for attempt in range(1, config.max_retries + 1):
        start = time.perf_counter()
        try:
            text = backend.submit(request)
        except (TransportError, TimeoutError, ConnectionError) as exc:
            last = exc
            log.warning("site %s session %d attempt %d failed: %s",
                        payload.site_id, config.session_index, attempt, exc)
            if attempt < config.max_retries:
                sleep(config.backoff_base * 2 ** (attempt - 1))
            continue
        if not text or not text.strip():
            raise BackendRefusalError(f"empty response for site {payload.site_id!r} session {config.session_index}")
        meta = {
            "status": "ok",
            "latency": f"{time.perf_counter() - start:.3f}",
            "attempts": str(attempt),
        }
        return BackendResponse(text, meta, config.session_index, payload.site_id)
    raise TransportExhaustedError(config.max_retries, last)


@dataclass(frozen=True)
class SiteRun:
    site_id: str
    responses: dict
    errors: dict

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def ordered(self) -> list[BackendResponse]:
        return [self.responses[k] for k in sorted(self.responses)]


def run_site(site: EvaluationPayload | CorpusBundle, backend: EvaluatorBackend, n_sessions: int = 3,
             base_config: SessionConfig | None = None, parallel: int = 3, sleep=time.sleep) -> SiteRun:
    """Run ``n_sessions`` independent sessions for one site.

    Failed sessions are reported in ``errors`` keyed by session index; the
    successful ones are kept. A bundle is packaged with default limits.
    """
    payload = package_payload(site) if isinstance(site, CorpusBundle) else site
    if n_sessions < 2:
        raise ValueError("n_sessions must be at least 2; agreement needs two raters")
    base = base_config or SessionConfig()
    configs = [
        SessionConfig(base.model_name, base.temperature, base.max_retries, base.timeout, k, base.backoff_base)
        for k in range(1, n_sessions + 1)
    ]

    def one(cfg):
        try:
            return cfg.session_index, evaluate_session(payload, backend, cfg, sleep), None
        except Exception as exc:  # attributed to the session, not raised
            return cfg.session_index, None, exc

    with ThreadPoolExecutor(max_workers=max(1, parallel)) as pool:
        results = list(pool.map(one, configs))
    responses = {k: r for k, r, e in results if e is None}
    errors = {k: e for k, r, e in results if e is not None}
    return SiteRun(payload.site_id, dict(sorted(responses.items())), dict(sorted(errors.items())))
