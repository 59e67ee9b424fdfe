"""Text-generation providers: an HTTP chat-completions client and a
deterministic mock.

The HTTP client speaks the common chat-completions JSON shape (single user
message carrying the assembled prompt) against a configurable base URL.
Transient failures (HTTP 429/5xx, timeouts) are retried with exponential
backoff and jitter; auth and validation failures are not.  The mock keys
scripted responses by request fingerprint or trial seed so runs are
reproducible, with a round-robin fallback.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import httpx

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4o-mini"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 1024

ENV_API_KEY = "TSLF_API_KEY"
ENV_BASE_URL = "TSLF_BASE_URL"
ENV_MODEL = "TSLF_MODEL"


class ProviderErrorKind:
    AUTH = "Auth"
    RATE_LIMITED = "RateLimited"
    TIMEOUT = "Timeout"
    MALFORMED = "Malformed"
    EXHAUSTED = "Exhausted"


_RETRYABLE = (ProviderErrorKind.RATE_LIMITED, ProviderErrorKind.TIMEOUT)


class ProviderError(Exception):
    def __init__(self, kind: str, detail: str):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}")


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    model: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    trial_seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass
class GenerationResult:
    text: str
    latency_ms: int
    provider_meta: dict = field(default_factory=dict)
    request_fingerprint: str = ""


def request_fingerprint(req: GenerationRequest) -> str:
    payload = json.dumps(
        {
            "prompt": req.prompt,
            "model": req.model,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "trial_seed": req.trial_seed,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Provider(Protocol):
    def complete(self, req: GenerationRequest) -> GenerationResult: ...


class MockProvider:
    """Scripted provider for tests and offline benchmark runs.

    Responses are chosen by exact request fingerprint when scripted that
    way; otherwise by `trial_seed` modulo the response list (stable across
    re-runs), falling back to round-robin for seedless requests.  A response
    entry may be a string or `{"error": <kind>}` to raise a ProviderError.
    """

    def __init__(
        self,
        responses: list | None = None,
        by_fingerprint: dict[str, str] | None = None,
    ):
        self.responses = list(responses or [])
        self.by_fingerprint = dict(by_fingerprint or {})
        self._calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_script(cls, doc: dict) -> "MockProvider":
        return cls(doc.get("responses"), doc.get("by_fingerprint"))

    @classmethod
    def from_file(cls, path) -> "MockProvider":
        with open(path, encoding="utf-8") as fh:
            return cls.from_script(json.load(fh))

    def complete(self, req: GenerationRequest) -> GenerationResult:
        fp = request_fingerprint(req)
        with self._lock:
            call_index = self._calls
            self._calls += 1
        entry = self.by_fingerprint.get(fp)
        index = None
        if entry is None:
            if not self.responses:
                raise ProviderError(
                    ProviderErrorKind.MALFORMED, "mock script has no responses"
                )
            index = (req.trial_seed if req.trial_seed is not None else call_index)
            index %= len(self.responses)
            entry = self.responses[index]
        if isinstance(entry, dict):
            raise ProviderError(
                entry.get("error", ProviderErrorKind.MALFORMED),
                entry.get("detail", "scripted failure"),
            )
        return GenerationResult(
            text=entry,
            latency_ms=0,
            provider_meta={"mock": True, "index": index},
            request_fingerprint=fp,
        )


class RateLimiter:
    """Serializes dispatch to at most `per_minute` requests per minute."""

    def __init__(self, per_minute: float):
        self.interval = 60.0 / per_minute
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self, now=time.monotonic, sleep=time.sleep) -> None:
        with self._lock:
            t = now()
            delay = self._next_at - t
            self._next_at = max(self._next_at, t) + self.interval
        if delay > 0:
            sleep(delay)


class HttpProvider:
    """Chat-completions client; one user message per request."""

    def __init__(
        self,
        api_key: str,
        base_url: str = DEFAULT_BASE_URL,
        timeout_s: float = 120.0,
        transport: httpx.BaseTransport | None = None,
        rate_limiter: RateLimiter | None = None,
    ):
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self.rate_limiter = rate_limiter
        self._client = httpx.Client(transport=transport, timeout=timeout_s)

    def complete(self, req: GenerationRequest) -> GenerationResult:
        if not self.api_key:
            raise ProviderError(ProviderErrorKind.AUTH, "no API key configured")
        body: dict = {
            "model": req.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.trial_seed is not None:
            body["seed"] = req.trial_seed
        if self.rate_limiter is not None:
            self.rate_limiter.wait()
        start = time.monotonic()
        try:
            resp = self._client.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self.api_key}"},
            )
        except httpx.TimeoutException as e:
            raise ProviderError(ProviderErrorKind.TIMEOUT, str(e)) from e
        except httpx.HTTPError as e:
            raise ProviderError(ProviderErrorKind.TIMEOUT, f"transport: {e}") from e
        latency_ms = int((time.monotonic() - start) * 1000)
        if resp.status_code in (401, 403):
            raise ProviderError(ProviderErrorKind.AUTH, f"HTTP {resp.status_code}")
        if resp.status_code == 429:
            raise ProviderError(ProviderErrorKind.RATE_LIMITED, "HTTP 429")
        if resp.status_code >= 500:
            # transient server failure: retried like a timeout
            raise ProviderError(
                ProviderErrorKind.TIMEOUT, f"HTTP {resp.status_code}"
            )
        if resp.status_code >= 400:
            raise ProviderError(
                ProviderErrorKind.MALFORMED, f"HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            doc = resp.json()
            text = doc["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ProviderError(
                ProviderErrorKind.MALFORMED, f"unexpected response shape: {e}"
            ) from e
        if not isinstance(text, str):
            raise ProviderError(ProviderErrorKind.MALFORMED, "content is not text")
        meta = {k: doc.get(k) for k in ("model", "usage") if k in doc}
        meta["status"] = resp.status_code
        return GenerationResult(
            text=text,
            latency_ms=latency_ms,
            provider_meta=meta,
            request_fingerprint=request_fingerprint(req),
        )


class RetryingProvider:
    """Retry wrapper: exponential backoff with jitter on transient errors.

    Defaults: base 1s, factor 2, at most 5 attempts, and a per-request
    wall-clock budget so the harness never blocks indefinitely.  Retryable
    kinds that persist surface as ProviderError(Exhausted); everything else
    (auth, malformed) is raised as-is on the first attempt.
    """

    def __init__(
        self,
        inner: Provider,
        max_attempts: int = 5,
        base_delay: float = 1.0,
        factor: float = 2.0,
        jitter: float = 0.1,
        budget_s: float = 120.0,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
        rng: random.Random | None = None,
    ):
        self.inner = inner
        self.max_attempts = max_attempts
        self.base_delay = base_delay
        self.factor = factor
        self.jitter = jitter
        self.budget_s = budget_s
        self.sleep = sleep
        self.clock = clock
        self.rng = rng or random.Random()

    def complete(self, req: GenerationRequest) -> GenerationResult:
        deadline = self.clock() + self.budget_s
        last: ProviderError | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                result = self.inner.complete(req)
            except ProviderError as e:
                if e.kind not in _RETRYABLE:
                    raise
                last = e
                if attempt == self.max_attempts or self.clock() >= deadline:
                    break
                delay = self.base_delay * self.factor ** (attempt - 1)
                delay *= 1.0 + self.rng.uniform(0.0, self.jitter)
                delay = min(delay, max(0.0, deadline - self.clock()))
                self.sleep(delay)
            else:
                result.provider_meta["attempts"] = attempt
                return result
        assert last is not None
        raise ProviderError(
            ProviderErrorKind.EXHAUSTED,
            f"gave up after {self.max_attempts} attempts; last: {last.detail}",
        )


def provider_from_env(
    env: dict | None = None, requests_per_minute: float | None = None
) -> RetryingProvider:
    """Production provider wired from TSLF_API_KEY / TSLF_BASE_URL."""
    env = os.environ if env is None else env
    limiter = RateLimiter(requests_per_minute) if requests_per_minute else None
    inner = HttpProvider(
        api_key=env.get(ENV_API_KEY, ""),
        base_url=env.get(ENV_BASE_URL, DEFAULT_BASE_URL),
        rate_limiter=limiter,
    )
    return RetryingProvider(inner)
