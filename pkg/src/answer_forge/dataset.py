"""JSON-lines samples and the TSV split file."""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .text import normalize_answer, tokenize

REQUIRED_KEYS = ("sample_id", "question", "answer", "captions", "objects", "image_feature")
ROLES = ("train", "val", "test")


@dataclass(frozen=True)
class Sample:
    sample_id: str
    question: tuple
    answer: str
    captions: tuple
    objects: tuple
    image_feature: np.ndarray
    fact: tuple = None


def _sample_from_obj(obj, lineno, path, image_dim):
    if not isinstance(obj, dict):
        raise ParseError("sample must be a JSON object", line=lineno, path=path)
    missing = [k for k in REQUIRED_KEYS if k not in obj]
    if missing:
        raise ParseError(f"missing keys: {', '.join(missing)}", line=lineno, path=path)
    q = obj["question"]
    if isinstance(q, str):
        question = tuple(tokenize(q))
    elif isinstance(q, list) and all(isinstance(t, str) for t in q):
        question = tuple(t for t in (tokenize(" ".join(q))) if t)
    else:
        raise ParseError("question must be a string or a list of strings", line=lineno, path=path)
    if not question:
        raise ParseError("empty question", line=lineno, path=path)
    if not isinstance(obj["answer"], str) or not normalize_answer(obj["answer"]):
        raise ParseError("answer must be a non-empty string", line=lineno, path=path)
    for key in ("captions", "objects"):
        if not isinstance(obj[key], list) or not all(isinstance(x, str) for x in obj[key]):
            raise ParseError(f"{key} must be a list of strings", line=lineno, path=path)
    feat = obj["image_feature"]
    if not isinstance(feat, list) or not feat or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in feat
    ):
        raise ParseError("image_feature must be a non-empty list of finite numbers", line=lineno, path=path)
    if image_dim is not None and len(feat) != image_dim:
        raise ValidationError(f"{path}:line {lineno}: image_feature has {len(feat)} components, expected {image_dim}")
    fact = obj.get("fact")
    if fact is not None:
        if not (isinstance(fact, list) and len(fact) == 3 and all(isinstance(x, str) and x.strip() for x in fact)):
            raise ParseError("fact must be [entity, relation, answer]", line=lineno, path=path)
        fact = tuple(normalize_answer(x) for x in fact)
    return Sample(
        sample_id=str(obj["sample_id"]),
        question=question,
        answer=normalize_answer(obj["answer"]),
        captions=tuple(obj["captions"]),
        objects=tuple(t for t in (tokenize(" ".join(obj["objects"]))) if t),
        image_feature=np.asarray(feat, dtype=np.float64),
        fact=fact,
    )


def load_dataset(path, image_dim=None):
    """One JSON object per line with the keys in ``REQUIRED_KEYS``.

    An optional ``fact`` key names the supporting ``[entity, relation,
    answer]`` triple.  All feature vectors must share one length, which
    must equal ``image_dim`` when given.
    """
    path = Path(path)
    samples = []
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno, path=path) from None
            sample = _sample_from_obj(obj, lineno, path, image_dim)
            if sample.sample_id in seen:
                raise ParseError(f"duplicate sample_id {sample.sample_id!r}", line=lineno, path=path)
            seen.add(sample.sample_id)
            if image_dim is None:
                image_dim = sample.image_feature.shape[0]
            samples.append(sample)
    if not samples:
        raise ValidationError(f"{path}: dataset is empty")
    return samples


def load_splits(path, sample_ids=None):
    """Read ``split_id<TAB>sample_id<TAB>role`` rows.

    Returns ``{split_id: {role: [sample_id, ...]}}`` in file order.  A
    leading header row starting with ``split_id`` is skipped.
    """
    path = Path(path)
    splits = {}
    known = None if sample_ids is None else set(sample_ids)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = [f.strip() for f in line.split("\t")]
            if lineno == 1 and fields[0] == "split_id":
                continue
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", line=lineno, path=path)
            split_id, sample_id, role = fields
            role = role.lower()
            if role not in ROLES:
                raise ParseError(f"role must be one of {ROLES}, got {role!r}", line=lineno, path=path)
            if known is not None and sample_id not in known:
                raise ValidationError(f"{path}:line {lineno}: unknown sample_id {sample_id!r}")
            splits.setdefault(split_id, {r: [] for r in ROLES})[role].append(sample_id)
    if not splits:
        raise ValidationError(f"{path}: no splits defined")
    for split_id, roles in splits.items():
        if not roles["train"] or not roles["test"]:
            raise ValidationError(f"split {split_id!r} needs train and test samples")
    return splits
