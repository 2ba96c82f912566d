"""Caption curation and prompt rendering."""

from dataclasses import dataclass

from ..errors import ContractError, EmptyResultError
from ..text import normalize_sentence

PROMPT_TEMPLATE = "Context: {caption}\nQuestion: {question}\nAnswer:"


@dataclass(frozen=True)
class CaptionSet:
    image_id: str
    captions: tuple

    def __post_init__(self):
        if not self.captions:
            raise ContractError("caption set is empty")
        if len(set(self.captions)) != len(self.captions):
            raise ContractError("captions must be distinct")


def curate_captions(raw, k_captions, image_id=""):
    """Normalize, drop duplicates (first occurrence wins) and keep ``k_captions``."""
    if k_captions < 1:
        raise ContractError("k_captions must be >= 1")
    if not raw:
        raise ContractError("no captions given")
    kept = dict.fromkeys(c for c in (normalize_sentence(r) for r in raw) if c)
    if not kept:
        raise EmptyResultError("every caption is empty after normalization")
    return CaptionSet(image_id=image_id, captions=tuple(kept)[:k_captions])


def build_prompts(captions, questions):
    """Caption-major product of captions and (original + variant) questions."""
    qs = [" ".join(q) for q in questions.questions]
    return [PROMPT_TEMPLATE.format(caption=c, question=q) for c in captions.captions for q in qs]
