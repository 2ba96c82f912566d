"""Add-alpha bigram language model used as the fluency scorer."""

import math
from collections import Counter

from ..errors import ContractError
from ..text import tokenize

BOS = "<s>"
UNK = "<unk>"


class NgramLM:
    """Bigram model with add-alpha smoothing.

    ``P(w | c) = (count(c, w) + alpha) / (count(c) + alpha * |V|)`` where
    ``count(c)`` is the number of bigrams starting with ``c`` and ``V``
    holds every training token plus ``<unk>``.  Each conditional
    distribution therefore sums to one over ``V``.
    """

    order = 2

    def __init__(self, sentences=(), alpha=0.1, extra_vocab=()):
        if not alpha > 0:
            raise ContractError("smoothing alpha must be positive")
        self.smoothing_alpha = float(alpha)
        self.bigrams = Counter()
        self.context_counts = Counter()
        self.unigrams = Counter()
        vocab = set(extra_vocab)
        for sentence in sentences:
            tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
            self.unigrams.update(tokens)
            vocab.update(tokens)
            for prev, cur in zip([BOS] + tokens, tokens):
                self.bigrams[prev, cur] += 1
                self.context_counts[prev] += 1
        vocab.add(UNK)
        self.vocab = frozenset(vocab)

    @property
    def vocab_size(self):
        return len(self.vocab)

    def _word(self, w):
        return w if w in self.vocab else UNK

    def prob(self, word, context):
        word = self._word(word)
        if context != BOS:
            context = self._word(context)
        num = self.bigrams[context, word] + self.smoothing_alpha
        return num / (self.context_counts[context] + self.smoothing_alpha * self.vocab_size)

    def logprob(self, tokens):
        tokens = list(tokens)
        return math.fsum(math.log(self.prob(w, c)) for c, w in zip([BOS] + tokens, tokens))


def fluency_score(answer, lm):
    """Log-probability of the answer's tokens under ``lm``; never positive."""
    tokens = tokenize(answer) if isinstance(answer, str) else list(answer)
    if not tokens:
        raise ContractError(f"answer {answer!r} has no tokens")
    return lm.logprob(tokens)
