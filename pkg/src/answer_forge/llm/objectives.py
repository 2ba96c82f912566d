"""LLM-side loss and score terms."""

import math

from ..qsearch import QuestionSet


def llm_loss(candidates):
    """Confidence-weighted sum of candidate fluencies."""
    return math.fsum(c.confidence * c.fluency for c in candidates)


def s_llm(candidate, lambda1):
    return lambda1 * candidate.confidence * candidate.fluency


def filter_variants_by_fluency(qset, lm, margin=2.0):
    """Drop variants scoring more than ``margin`` nats below the original."""
    if not qset.variants:
        return qset
    floor = lm.logprob(qset.original) - margin
    keep = [(v, p) for v, p in zip(qset.variants, qset.replace_probs) if lm.logprob(v) >= floor]
    return QuestionSet(
        original=qset.original,
        variants=tuple(v for v, _ in keep),
        replaced_index=qset.replaced_index if keep else None,
        replace_probs=tuple(p for _, p in keep),
        relevance=qset.relevance,
    )
