"""Token, answer and sentence normalization rules."""

import re
import string

_WS = re.compile(r"\s+")
_EDGE_PUNCT = string.punctuation


def normalize_token(token):
    """Lowercase, trim and strip punctuation at the word edges."""
    return token.strip().lower().strip(_EDGE_PUNCT)


def normalize_answer(text):
    """Lowercase, trim and collapse internal whitespace."""
    return _WS.sub(" ", text.strip().lower())


def normalize_sentence(text):
    """Normalize every whitespace-separated token, dropping empty ones."""
    return " ".join(tokenize(text))


def tokenize(text):
    tokens = (normalize_token(t) for t in text.split())
    return [t for t in tokens if t]
