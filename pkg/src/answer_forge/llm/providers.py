"""Answer providers: a seeded offline mock and a generic JSON-over-HTTP client."""

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import httpx
import numpy as np

from ..errors import ContractError, ParseError, ProviderError, ProviderParseError, ValidationError
from ..text import normalize_answer, tokenize
from .ngram import fluency_score

logger = logging.getLogger(__name__)

_STOPWORDS = frozenset(
    "a an the of on in at to and or is are was were with for by from this that it its".split()
)


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"
    endpoint: str = None
    model_name: str = "mock"
    timeout: float = 30.0
    max_candidates: int = 5
    seed: int = 0
    in_flight: int = 4

    def __post_init__(self):
        if self.kind not in ("mock", "http"):
            raise ValidationError(f"unknown provider kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ValidationError("http provider requires an endpoint")
        if self.max_candidates < 1:
            raise ValidationError("max_candidates must be >= 1")
        if self.in_flight < 1:
            raise ValidationError("in_flight must be >= 1")


@dataclass(frozen=True)
class LLMCandidate:
    answer: str
    confidence: float
    fluency: float = 0.0
    source_prompt_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ContractError(f"confidence {self.confidence} outside [0, 1]")
        if not (math.isfinite(self.fluency) and self.fluency <= 0.0):
            raise ContractError(f"fluency must be finite and <= 0, got {self.fluency}")


def _parse_candidates(items, where):
    """Validate a list of ``{"text": str, "confidence": float}`` objects."""
    if not isinstance(items, list):
        raise ProviderParseError(f"{where}: candidates must be a list")
    out = []
    for item in items:
        if not isinstance(item, dict) or not isinstance(item.get("text"), str):
            raise ProviderParseError(f"{where}: candidate without a text field: {item!r}")
        conf = item.get("confidence")
        if conf is not None:
            if isinstance(conf, bool) or not isinstance(conf, (int, float)) or not math.isfinite(conf):
                raise ProviderParseError(f"{where}: bad confidence {conf!r}")
            conf = float(conf)
        out.append((item["text"], conf))
    return out


class MockProvider:
    """Offline provider that is a pure function of ``(seed, prompt)``.

    Fixture rules ``{"pattern": substring, "candidates": [...]}`` are tried
    in order and the first whose pattern occurs in the prompt answers it.
    Unmatched prompts get words from their context line, drawn with a
    generator seeded from a hash of the seed and the prompt text.
    """

    def __init__(self, config, fixture=()):
        self.config = config
        self.rules = []
        for i, rule in enumerate(fixture):
            if not isinstance(rule, dict) or not isinstance(rule.get("pattern"), str):
                raise ParseError(f"mock fixture rule {i} needs a string pattern")
            self.rules.append((rule["pattern"], _parse_candidates(rule.get("candidates"), f"rule {i}")))

    @classmethod
    def from_file(cls, config, path):
        path = Path(path)
        try:
            fixture = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), line=exc.lineno, path=path) from None
        if not isinstance(fixture, list):
            raise ParseError("mock fixture must be a JSON list", path=path)
        return cls(config, fixture)

    def complete(self, prompt, index=0):
        for pattern, candidates in self.rules:
            if pattern in prompt:
                return list(candidates)
        digest = hashlib.sha256(f"{self.config.seed}\x00{prompt}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        context = prompt.split("\n", 1)[0].removeprefix("Context:")
        words = list(dict.fromkeys(w for w in tokenize(context) if len(w) > 2 and w not in _STOPWORDS))
        if not words:
            return []
        n = min(len(words), self.config.max_candidates)
        picked = rng.choice(len(words), size=n, replace=False)
        conf = rng.dirichlet(np.ones(n))
        return [(words[i], float(c)) for i, c in zip(picked, conf)]


class HttpProvider:
    """POSTs ``{"model", "prompt", "max_candidates"}`` and reads ``{"candidates": [...]}``."""

    def __init__(self, config, transport=None):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout, transport=transport)

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def complete(self, prompt, index=0):
        payload = {
            "model": self.config.model_name,
            "prompt": prompt,
            "max_candidates": self.config.max_candidates,
        }
        try:
            resp = self._client.post(
                self.config.endpoint, json=payload, headers={"Content-Type": "application/json"}
            )
        except httpx.TimeoutException as exc:
            raise ProviderError(f"timeout after {self.config.timeout}s ({exc})", index) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"request failed: {exc}", index) from exc
        if not 200 <= resp.status_code < 300:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:200]}", index)
        try:
            body = resp.json()
        except ValueError as exc:
            raise ProviderParseError(f"response is not JSON ({exc})", index) from None
        if not isinstance(body, dict) or "candidates" not in body:
            raise ProviderParseError("response has no candidates field", index)
        try:
            return _parse_candidates(body["candidates"], "response")
        except ProviderParseError as exc:
            raise ProviderParseError(str(exc), index) from None


def make_provider(config, fixture_path=None):
    if config.kind == "mock":
        if fixture_path is None:
            return MockProvider(config)
        return MockProvider.from_file(config, fixture_path)
    return HttpProvider(config)


def generate_candidates(provider, prompts, lm=None, in_flight=None):
    """Query ``provider`` for every prompt and merge the answers.

    Each prompt contributes at most ``max_candidates`` answers; missing
    confidences become uniform over that prompt's answers.  Duplicate
    answers keep their highest confidence (earliest prompt on ties).  If
    ``lm`` is given the fluency of every surviving answer is filled in.
    """
    if not prompts:
        raise ContractError("no prompts")
    cfg = provider.config
    workers = in_flight or cfg.in_flight
    if workers > 1 and len(prompts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(provider.complete, prompts, range(len(prompts))))
    else:
        results = [provider.complete(p, i) for i, p in enumerate(prompts)]

    best = {}
    for index, raw in enumerate(results):
        raw = raw[: cfg.max_candidates]
        for text, conf in raw:
            if conf is None:
                conf = 1.0 / len(raw)
            conf = min(max(conf, 0.0), 1.0)
            answer = normalize_answer(text)
            if not answer:
                continue
            prev = best.get(answer)
            if prev is None or conf > prev[0]:
                best[answer] = (conf, index)
    out = []
    for answer, (conf, index) in best.items():
        fluency = fluency_score(answer, lm) if lm is not None else 0.0
        out.append(LLMCandidate(answer, conf, fluency, index))
    logger.debug("%d prompts -> %d candidates", len(prompts), len(out))
    return out
