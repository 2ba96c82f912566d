"""Flat ``key = value`` pipeline configuration."""

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ContractError, ParseError, ValidationError
from .llm.providers import ProviderConfig
from .pso import SwarmConfig
from .qsearch import QSConfig
from .scoring import ScoreConfig


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_int(text):
    return None if text.strip().lower() in ("", "none") else int(text)


# key -> (parser, default); None default with a path parser means required
SCHEMA = {
    "paths.embeddings": (Path, None),
    "paths.triples": (Path, None),
    "paths.dataset": (Path, None),
    "paths.splits": (Path, None),
    "paths.mock_fixture": (Path, ""),
    "paths.lm_corpus": (Path, ""),
    "qs.mu": (float, 0.7),
    "qs.delta_word": (float, 0.5),
    "qs.k_neighbors": (int, 3),
    "qs.fluency_margin": (float, 2.0),
    "qs.alpha": (float, 0.01),
    "kg.delta": (float, 0.5),
    "score.beta": (float, 0.5),
    "score.penalty_b": (float, 1.0),
    "score.lambda_index": (int, 1),
    "pso.particle_num": (int, 20),
    "pso.iterations": (int, 30),
    "pso.w": (float, 0.729),
    "pso.c1": (float, 1.494),
    "pso.c2": (float, 1.494),
    "pso.K": (int, 3),
    "pso.inner_steps": (int, 10),
    "pso.seed": (_optional_int, None),
    "pso.workers": (int, 1),
    "provider.kind": (str, "mock"),
    "provider.endpoint": (str, ""),
    "provider.model_name": (str, "mock"),
    "provider.timeout": (float, 30.0),
    "provider.max_candidates": (int, 5),
    "provider.in_flight": (int, 4),
    "lm.alpha": (float, 0.1),
    "training.steps": (int, 5),
    "training.lr": (float, 0.05),
    "training.negatives": (int, 16),
    "training.shared_dim": (_optional_int, None),
    "tau": (float, 0.01),
    "k_captions": (int, 5),
    "epochs": (int, 10),
    "eval.mode": (str, "zsl"),
    "answer_vocab_size": (int, 500),
    "image_dim": (_optional_int, None),
    "figures": (_bool, True),
    "seed": (int, 0),
}
REQUIRED = tuple(k for k, (_, default) in SCHEMA.items() if default is None and k.startswith("paths."))


@dataclass
class PipelineConfig:
    values: dict
    source: Path = None

    def __getitem__(self, key):
        return self.values[key]

    def path(self, key):
        p = self.values[key]
        return None if p in ("", None) else Path(p)

    @property
    def seed(self):
        return self.values["seed"]

    def qs(self):
        return QSConfig(self["qs.mu"], self["qs.delta_word"], self["qs.k_neighbors"])

    def score(self):
        return ScoreConfig(self["score.beta"], self["score.penalty_b"], self["score.lambda_index"])

    def swarm(self):
        seed = self["pso.seed"]
        return SwarmConfig(
            particle_num=self["pso.particle_num"],
            iterations=self["pso.iterations"],
            w=self["pso.w"],
            c1=self["pso.c1"],
            c2=self["pso.c2"],
            stagnation_K=self["pso.K"],
            seed=self.seed if seed is None else seed,
            workers=self["pso.workers"],
        )

    def provider(self):
        return ProviderConfig(
            kind=self["provider.kind"],
            endpoint=self["provider.endpoint"] or None,
            model_name=self["provider.model_name"],
            timeout=self["provider.timeout"],
            max_candidates=self["provider.max_candidates"],
            seed=self.seed,
            in_flight=self["provider.in_flight"],
        )

    def with_overrides(self, **kwargs):
        values = dict(self.values)
        for key, value in kwargs.items():
            if value is not None:
                values[key] = value
        cfg = PipelineConfig(values, self.source)
        validate(cfg)
        return cfg


def parse_config_text(text, base_dir=None, source=None):
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", line=lineno, path=source)
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in SCHEMA:
            valid = ", ".join(sorted(SCHEMA))
            raise ValidationError(f"unknown config key {key!r} (line {lineno}); valid keys: {valid}")
        parser = SCHEMA[key][0]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", line=lineno, path=source) from None
        if parser is Path:
            parsed = "" if not value else (parsed if parsed.is_absolute() else base_dir / parsed)
        raw[key] = parsed
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ValidationError(f"missing required config keys: {', '.join(missing)}")
    values = {k: raw.get(k, default) for k, (_, default) in SCHEMA.items()}
    cfg = PipelineConfig(values, source)
    validate(cfg)
    return cfg


def load_config(path):
    """Read and validate a config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, base_dir=path.parent, source=path)


def validate(cfg):
    v = cfg.values
    for key in [k for k in SCHEMA if k.startswith("paths.")]:
        p = cfg.path(key)
        if p is not None and not p.is_file():
            raise ValidationError(f"{key}: file not found: {p}")
    if not (math.isfinite(v["tau"]) and v["tau"] > 0):
        raise ValidationError(f"tau must be positive, got {v['tau']}")
    for key in ("epochs", "k_captions", "answer_vocab_size", "pso.inner_steps", "training.negatives"):
        if v[key] < (0 if key in ("pso.inner_steps", "training.negatives") else 1):
            raise ValidationError(f"{key} out of range: {v[key]}")
    if v["training.steps"] < 0:
        raise ValidationError("training.steps must be >= 0")
    if not v["training.lr"] > 0:
        raise ValidationError("training.lr must be positive")
    if v["eval.mode"].lower() not in ("zsl", "gzsl"):
        raise ValidationError(f"eval.mode must be zsl or gzsl, got {v['eval.mode']!r}")
    v["eval.mode"] = v["eval.mode"].lower()
    try:
        cfg.qs()
        cfg.score()
        cfg.swarm()
        cfg.provider()
    except ContractError as exc:
        raise ValidationError(str(exc)) from None
    return cfg
