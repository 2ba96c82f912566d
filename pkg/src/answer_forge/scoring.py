"""Fusion of LLM and KG candidates and the piecewise answer score."""

from dataclasses import dataclass, replace

from .errors import ContractError
from .kg.retrieval import answer_score
from .text import normalize_answer

LLM_ONLY = "llm"
KG_ONLY = "kg"
BOTH = "both"
NEITHER = "other"


@dataclass(frozen=True)
class ScoreConfig:
    beta: float = 0.5
    penalty_b: float = 1.0
    lambda_index: int = 1

    def __post_init__(self):
        if self.beta < 0 or self.penalty_b < 0:
            raise ContractError("beta and penalty_b must be >= 0")
        if not 1 <= self.lambda_index <= 5:
            raise ContractError("lambda_index must be in 1..5")


@dataclass(frozen=True)
class ScoredCandidate:
    answer: str
    in_llm: bool = False
    in_kg: bool = False
    confidence: float = None
    fluency: float = None
    sims: tuple = None
    s_llm: float = None
    s_g: float = None
    final: float = None

    @property
    def branch(self):
        if self.in_llm and self.in_kg:
            return BOTH
        if self.in_llm:
            return LLM_ONLY
        if self.in_kg:
            return KG_ONLY
        return NEITHER


@dataclass
class ScoringContext:
    """Everything :func:`rank_candidate_pool` needs for one sample."""

    fused: object
    heads: object
    table: object
    config: ScoreConfig
    lambda1: float
    llm: dict
    kg: dict


def s_g(answer, fused, sims, heads, table, beta):
    """Projected answer/feature agreement plus ``beta`` times the KG similarities."""
    sim_e, sim_r = sims
    return answer_score(answer, fused, heads, table) + beta * (sim_e + sim_r)


def fuse_candidates(llm, kg):
    """Union of LLM and KG answers keyed by normalized answer.

    LLM answers come first in their given order, then KG-only answers.
    """
    out = {}
    for c in llm:
        key = normalize_answer(c.answer)
        out[key] = ScoredCandidate(key, in_llm=True, confidence=c.confidence, fluency=c.fluency)
    for answer, sims in kg.items():
        key = normalize_answer(answer)
        prev = out.get(key)
        if prev is None:
            out[key] = ScoredCandidate(key, in_kg=True, sims=tuple(sims))
        else:
            out[key] = replace(prev, in_kg=True, sims=tuple(sims))
    return list(out.values())


def score_answer(c, fused, heads, table, cfg, lambda1):
    """Fill in ``s_llm``, ``s_g`` and ``final`` for one candidate skeleton."""
    sl = sg = None
    if c.in_llm:
        sl = lambda1 * c.confidence * c.fluency
    if c.in_kg:
        sg = s_g(c.answer, fused, c.sims, heads, table, cfg.beta)
    if c.in_llm and c.in_kg:
        final = sl + sg
    elif c.in_llm:
        final = sl
    elif c.in_kg:
        final = sg
    else:
        final = answer_score(c.answer, fused, heads, table) - cfg.penalty_b
    return replace(c, s_llm=sl, s_g=sg, final=final)


def skeleton(answer, llm, kg):
    key = normalize_answer(answer)
    cand = llm.get(key)
    sims = kg.get(key)
    return ScoredCandidate(
        key,
        in_llm=cand is not None,
        in_kg=sims is not None,
        confidence=None if cand is None else cand.confidence,
        fluency=None if cand is None else cand.fluency,
        sims=None if sims is None else tuple(sims),
    )


def score_one(answer, ctx):
    c = skeleton(answer, ctx.llm, ctx.kg)
    return score_answer(c, ctx.fused, ctx.heads, ctx.table, ctx.config, ctx.lambda1)


def rank_candidate_pool(pool, ctx):
    """Score every pool answer and sort by final score, ties by answer."""
    if not pool:
        raise ContractError("empty answer pool")
    scored = [score_one(a, ctx) for a in dict.fromkeys(normalize_answer(a) for a in pool)]
    scored.sort(key=lambda c: (-c.final, c.answer))
    return scored


def update_best(current, best):
    return max(current, best)
