"""Ranking metrics (Hit@k, MRR, MR) and ZSL/GZSL answer pools."""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

from .errors import AbsentTruthWarning, ContractError, ValidationError

ZSL = "zsl"
GZSL = "gzsl"
METRIC_KEYS = ("hit1", "hit3", "hit10", "mrr", "mr", "n_samples")


@dataclass(frozen=True)
class SplitSpec:
    mode: str
    seen_answers: frozenset = frozenset()
    unseen_answers: frozenset = frozenset()

    def __post_init__(self):
        mode = self.mode.lower()
        if mode not in (ZSL, GZSL):
            raise ValidationError(f"unknown evaluation mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "seen_answers", frozenset(self.seen_answers))
        object.__setattr__(self, "unseen_answers", frozenset(self.unseen_answers))
        overlap = self.seen_answers & self.unseen_answers
        if overlap:
            raise ValidationError(f"seen and unseen answers overlap: {sorted(overlap)[:5]}")


def candidate_pool(split):
    """Unseen answers for ZSL, seen plus unseen for GZSL (sorted)."""
    pool = split.unseen_answers
    if split.mode == GZSL:
        pool = pool | split.seen_answers
    return sorted(pool)


def rank_of_truth(ranking, truth):
    """1-based position of ``truth``; ``len(ranking) + 1`` with a warning if absent."""
    try:
        return list(ranking).index(truth) + 1
    except ValueError:
        warnings.warn(f"ground truth {truth!r} not in the ranked pool", AbsentTruthWarning, stacklevel=2)
        return len(ranking) + 1


@dataclass
class EvalReport:
    hit1: float
    hit3: float
    hit10: float
    mrr: float
    mr: float
    n_samples: int
    per_sample: list = field(default_factory=list)

    def metrics(self):
        return {k: getattr(self, k) for k in METRIC_KEYS}

    def to_dict(self):
        d = self.metrics()
        d["per_sample"] = [{"sample_id": sid, "rank": r} for sid, r in self.per_sample]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(METRIC_KEYS)
        writer.writerow([self.metrics()[k] for k in METRIC_KEYS])
        return buf.getvalue()


def hit_at(ranks, k):
    return 100.0 * sum(1 for r in ranks if r <= k) / len(ranks)


def aggregate(ranks, ks=(1, 3, 10), sample_ids=None):
    """Fold per-sample ranks into an :class:`EvalReport`.

    ``ks`` must contain 1, 3 and 10.
    """
    ranks = [int(r) for r in ranks]
    if not ranks:
        raise ContractError("no ranks to aggregate")
    if any(r < 1 for r in ranks):
        raise ContractError("ranks are 1-based")
    if not {1, 3, 10} <= set(ks):
        raise ContractError("ks must include 1, 3 and 10")
    if sample_ids is None:
        sample_ids = [str(i) for i in range(len(ranks))]
    n = len(ranks)
    return EvalReport(
        hit1=hit_at(ranks, 1),
        hit3=hit_at(ranks, 3),
        hit10=hit_at(ranks, 10),
        mrr=math.fsum(1.0 / r for r in ranks) / n,
        mr=math.fsum(ranks) / n,
        n_samples=n,
        per_sample=list(zip(sample_ids, ranks)),
    )
