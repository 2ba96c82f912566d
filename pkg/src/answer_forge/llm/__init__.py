"""Language-model side: captions, prompts, providers and fluency scoring."""

from .captions import PROMPT_TEMPLATE, CaptionSet, build_prompts, curate_captions
from .ngram import NgramLM, fluency_score
from .objectives import filter_variants_by_fluency, llm_loss, s_llm
from .providers import (
    HttpProvider,
    LLMCandidate,
    MockProvider,
    ProviderConfig,
    generate_candidates,
    make_provider,
)

__all__ = [
    "PROMPT_TEMPLATE",
    "CaptionSet",
    "HttpProvider",
    "LLMCandidate",
    "MockProvider",
    "NgramLM",
    "ProviderConfig",
    "build_prompts",
    "curate_captions",
    "filter_variants_by_fluency",
    "fluency_score",
    "generate_candidates",
    "llm_loss",
    "make_provider",
    "s_llm",
]
