"""Provider-agnostic chat-completion client with deterministic record/replay.

Live mode performs one HTTP round-trip per request against an OpenAI-style
chat-completion endpoint; replay mode resolves responses from a cassette
directory and never touches the network. Cassette keys are a pure function of
(prompt fingerprint, model id, temperature), so equal requests always hit the
same recording.

Environment configuration: LLM_MODE (live|replay), LLM_API_KEY, LLM_BASE_URL,
LLM_MODEL, LLM_CASSETTE_DIR.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Union

import requests

from .prompt_engine import RenderedPrompt

log = logging.getLogger(__name__)

DEFAULT_MODEL = "gpt-4"
DEFAULT_TEMPERATURE = 0.2
DEFAULT_MAX_TOKENS = 1024
DEFAULT_BASE_URL = "https://api.openai.com/v1"
MAX_RETRIES = 3  # extra attempts on 429/5xx only; never to "improve" an answer

MODE_LIVE = "live"
MODE_REPLAY = "replay"


class ProviderError(Exception):
    """Transport or HTTP failure talking to the completion provider."""


class AuthError(ProviderError):
    """The provider rejected our credentials."""


class CassetteMissError(Exception):
    """Replay mode found no recording for this request."""


class IoError(Exception):
    """Cassette file could not be written or read."""


@dataclass(frozen=True)
class CompletionRequest:
    prompt: RenderedPrompt
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    provider_id: str = "openai-chat"
    model_id: str = DEFAULT_MODEL

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0,2], got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")


@dataclass(frozen=True)
class FeedbackArtifact:
    request: CompletionRequest
    response_text: str
    latency_ms: float
    timestamp: str
    cassette_key: str


@dataclass
class GatewayConfig:
    mode: str = MODE_REPLAY
    api_key: str = ""
    base_url: str = DEFAULT_BASE_URL
    model: str = DEFAULT_MODEL
    cassette_dir: Optional[Path] = None
    timeout_s: float = 60.0

    @classmethod
    def from_env(cls, env: Optional[dict] = None) -> "GatewayConfig":
        env = os.environ if env is None else env
        cassette_dir = env.get("LLM_CASSETTE_DIR")
        return cls(
            mode=env.get("LLM_MODE", MODE_REPLAY),
            api_key=env.get("LLM_API_KEY", ""),
            base_url=env.get("LLM_BASE_URL", DEFAULT_BASE_URL),
            model=env.get("LLM_MODEL", DEFAULT_MODEL),
            cassette_dir=Path(cassette_dir) if cassette_dir else None,
        )


def cassette_key(prompt_fingerprint: str, model_id: str, temperature: float) -> str:
    """Deterministic recording id for a (prompt, model, temperature) triple."""
    raw = f"{prompt_fingerprint}|{model_id}|{temperature:g}"
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:32]


class RateLimiter:
    """Token bucket guarding live calls; replay never consumes tokens."""

    def __init__(self, rate_per_s: float = 5.0, burst: int = 5, clock: Callable[[], float] = time.monotonic):
        self._rate = rate_per_s
        self._capacity = float(burst)
        self._tokens = float(burst)
        self._clock = clock
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        """Take one token, returning how long the caller should sleep first."""
        with self._lock:
            now = self._clock()
            self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
            self._last = now
            if self._tokens >= 1.0:
                self._tokens -= 1.0
                return 0.0
            wait = (1.0 - self._tokens) / self._rate
            self._tokens = 0.0
            return wait


class LlmGateway:
    """Chat-completion client; safe to share across threads.

    ``transport`` is the HTTP POST callable (defaults to ``requests.post``);
    tests inject stubs, including ones that fail loudly to prove replay mode
    performs no network activity.
    """

    def __init__(
        self,
        config: GatewayConfig,
        transport: Optional[Callable] = None,
        limiter: Optional[RateLimiter] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._transport = transport if transport is not None else requests.post
        self._limiter = limiter or RateLimiter()
        self._sleep = sleep

    def complete(self, req: CompletionRequest) -> FeedbackArtifact:
        """One completion per request: a single HTTP round-trip or a cassette lookup."""
        key = cassette_key(req.prompt.fingerprint, req.model_id, req.temperature)
        if self.config.mode == MODE_REPLAY:
            return self._replay(req, key)
        if self.config.mode == MODE_LIVE:
            return self._live(req, key)
        raise ValueError(f"unknown gateway mode {self.config.mode!r}")

    # -- replay ---------------------------------------------------------

    def _replay(self, req: CompletionRequest, key: str) -> FeedbackArtifact:
        if self.config.cassette_dir is None:
            raise CassetteMissError("replay mode needs a cassette directory")
        path = Path(self.config.cassette_dir) / f"{key}.json"
        if not path.exists():
            raise CassetteMissError(
                f"no cassette {key} for prompt {req.prompt.fingerprint[:12]}... "
                f"(model={req.model_id}, temperature={req.temperature:g})"
            )
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IoError(f"cannot read cassette {path}: {exc}") from exc
        return FeedbackArtifact(
            request=req,
            response_text=data["response_text"],
            latency_ms=float(data.get("latency_ms", 0.0)),
            timestamp=str(data.get("recorded_at", "")),
            cassette_key=key,
        )

    # -- live -----------------------------------------------------------

    def _live(self, req: CompletionRequest, key: str) -> FeedbackArtifact:
        wait = self._limiter.acquire()
        if wait > 0:
            self._sleep(wait)
        body = {
            "model": req.model_id,
            "messages": [{"role": "user", "content": req.prompt.text}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        url = self.config.base_url.rstrip("/") + "/chat/completions"

        attempt = 0
        started = time.monotonic()
        while True:
            attempt += 1
            try:
                resp = self._transport(url, headers=headers, json=body, timeout=self.config.timeout_s)
            except requests.RequestException as exc:
                raise ProviderError(f"transport failure: {exc}") from exc

            if resp.status_code in (401, 403):
                raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                if attempt > MAX_RETRIES:
                    raise ProviderError(f"HTTP {resp.status_code} after {attempt} attempts")
                self._sleep(_retry_after_seconds(resp, attempt))
                continue
            if resp.status_code != 200:
                raise ProviderError(f"HTTP {resp.status_code}: {getattr(resp, 'text', '')[:200]}")
            break

        latency_ms = (time.monotonic() - started) * 1000.0
        try:
            payload = resp.json()
            text = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        if not text:
            raise ProviderError("provider returned an empty completion")

        return FeedbackArtifact(
            request=req,
            response_text=text,
            latency_ms=latency_ms,
            timestamp=datetime.now(timezone.utc).isoformat(),
            cassette_key=key,
        )


def _retry_after_seconds(resp, attempt: int) -> float:
    header = None
    headers = getattr(resp, "headers", None)
    if headers:
        header = headers.get("Retry-After")
    if header:
        try:
            return max(0.0, float(header))
        except ValueError:
            pass
    return 0.5 * (2 ** (attempt - 1))


def record_cassette(artifact: FeedbackArtifact, directory: Union[str, Path]) -> str:
    """Persist one artifact as a replayable cassette; returns the stored key.

    Re-recording an existing key overwrites the file with a warning.
    """
    directory = Path(directory)
    req = artifact.request
    key = artifact.cassette_key or cassette_key(req.prompt.fingerprint, req.model_id, req.temperature)
    path = directory / f"{key}.json"
    data = {
        "key": key,
        "prompt_fingerprint": req.prompt.fingerprint,
        "template_id": req.prompt.template_id,
        "prompt_text": req.prompt.text,
        "provider_id": req.provider_id,
        "model_id": req.model_id,
        "temperature": req.temperature,
        "max_tokens": req.max_tokens,
        "response_text": artifact.response_text,
        "latency_ms": artifact.latency_ms,
        "recorded_at": artifact.timestamp,
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        if path.exists():
            log.warning("overwriting cassette %s", path)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write cassette {path}: {exc}") from exc
    return key
