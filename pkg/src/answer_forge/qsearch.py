"""Question search: single-word substitution of the most image-relevant word."""

import math
from collections import Counter
from dataclasses import dataclass

from .embeddings import cosine_sim, nearest_neighbors
from .errors import ContractError, EmptyResultError


@dataclass(frozen=True)
class QSConfig:
    mu: float = 0.7
    delta_word: float = 0.5
    k_neighbors: int = 3

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ContractError(f"mu must be in [0, 1], got {self.mu}")
        if not 0.0 <= self.delta_word <= 1.0:
            raise ContractError(f"delta_word must be in [0, 1], got {self.delta_word}")
        if self.k_neighbors < 1:
            raise ContractError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class QuestionSet:
    original: tuple
    variants: tuple = ()
    replaced_index: int = None
    replace_probs: tuple = ()
    relevance: float = None

    def __post_init__(self):
        n = len(self.original)
        for v in self.variants:
            diff = [i for i in range(n) if len(v) == n and v[i] != self.original[i]]
            if len(v) != n or diff != [self.replaced_index]:
                raise ContractError(f"variant {v!r} must differ from the original only at {self.replaced_index}")
        if len(self.replace_probs) != len(self.variants):
            raise ContractError("one replace probability per variant is required")

    @property
    def questions(self):
        """Original first, then the variants."""
        return (self.original,) + self.variants


def word_relevance(word, objects, table):
    """Best cosine between ``word`` and any detected object, with the object.

    Ties go to the lexicographically smaller object token.
    """
    wvec = table[word]
    best = None
    for obj in objects:
        ovec = table.get(obj)
        if ovec is None:
            continue
        s = cosine_sim(wvec, ovec)
        if best is None or s > best[0] or (s == best[0] and obj < best[1]):
            best = (s, obj)
    if best is None:
        raise EmptyResultError(f"no in-vocabulary object among {list(objects)!r}")
    return best


def expand_question(question, objects, cfg, table):
    """Build the question set for one sample.

    The question word most relevant to the detected objects is chosen
    (earliest on ties).  If its relevance is strictly above ``cfg.mu``,
    each of its top ``cfg.k_neighbors`` neighbours with similarity strictly
    above ``cfg.delta_word`` produces one variant.
    """
    question = tuple(question)
    if not question:
        raise ContractError("empty question")
    best = None
    for pos, word in enumerate(question):
        if word not in table:
            continue
        try:
            score, _ = word_relevance(word, objects, table)
        except EmptyResultError:
            break
        if best is None or score > best[0]:
            best = (score, pos)
    if best is None:
        return QuestionSet(original=question)
    relevance, pos = best
    if not relevance > cfg.mu:
        return QuestionSet(original=question, relevance=relevance)
    variants = []
    for neighbor, sim in nearest_neighbors(question[pos], cfg.k_neighbors, table):
        if sim > cfg.delta_word:
            variants.append(question[:pos] + (neighbor,) + question[pos + 1 :])
    return QuestionSet(
        original=question,
        variants=tuple(variants),
        replaced_index=pos if variants else None,
        replace_probs=(relevance,) * len(variants),
        relevance=relevance,
    )


def smoothed_unigrams(original, variant, alpha=0.01):
    """Add-alpha unigram distributions of two token lists over their union."""
    if alpha <= 0:
        raise ContractError("alpha must be positive")
    support = sorted(set(original) | set(variant))
    out = []
    for tokens in (original, variant):
        counts = Counter(tokens)
        total = len(tokens) + alpha * len(support)
        out.append({t: (counts[t] + alpha) / total for t in support})
    return out[0], out[1]


def diversity_loss(p_orig, q_gen, replace_probs):
    """Weighted, negated KL(p_orig || q_gen).

    ``p_orig`` and ``q_gen`` map tokens to probabilities over the same
    support.  The result is ``-sum(replace_probs) * KL`` and is never
    positive for non-negative weights.
    """
    if set(p_orig) != set(q_gen):
        raise ContractError("distributions have different supports")
    for name, dist in (("p_orig", p_orig), ("q_gen", q_gen)):
        if abs(math.fsum(dist.values()) - 1.0) > 1e-9:
            raise ContractError(f"{name} does not sum to 1")
        if any(not p > 0 for p in dist.values()):
            raise ContractError(f"{name} has a zero probability")
    kl = math.fsum(p * math.log(p / q_gen[t]) for t, p in p_orig.items())
    return -math.fsum(w * kl for w in replace_probs)


def question_set_loss(qset, alpha=0.01):
    """Diversity loss of one sample, summed over its variants.

    Each variant is compared with the original through its own smoothed
    unigram distribution and weighted by its replacement probability.
    """
    total = 0.0
    for variant, prob in zip(qset.variants, qset.replace_probs):
        p, q = smoothed_unigrams(qset.original, variant, alpha)
        total += diversity_loss(p, q, [prob])
    return total
