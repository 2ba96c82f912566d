"""Frozen word vectors with cosine similarity and neighbour search.

The text format is the usual GloVe layout, one ``token f1 ... fd`` entry
per line.  Question encodings are the mean of the in-vocabulary token
vectors.
"""

import logging
import math
import warnings
from pathlib import Path

import numpy as np

from .errors import ContractError, EmptyResultError, NotFoundError, ParseError, ZeroVectorWarning
from .text import normalize_token

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """Immutable token -> vector map.

    Parameters
    ----------
    entries : mapping of str to sequence of float
        Tokens are normalized on insertion; a later duplicate replaces an
        earlier one.
    dim : int, optional
        Expected vector length.  Inferred from the first entry if omitted.
    """

    def __init__(self, entries, dim=None):
        index = {}
        rows = []
        for token, vec in entries.items() if hasattr(entries, "items") else entries:
            key = normalize_token(token)
            arr = np.asarray(vec, dtype=np.float64)
            if dim is None:
                dim = arr.shape[0]
            if arr.shape != (dim,):
                raise ContractError(f"vector for {token!r} has {arr.size} components, expected {dim}")
            if not np.all(np.isfinite(arr)):
                raise ContractError(f"vector for {token!r} has non-finite components")
            if key in index:
                rows[index[key]] = arr
            else:
                index[key] = len(rows)
                rows.append(arr)
        if not rows:
            raise EmptyResultError("embedding table is empty")
        matrix = np.vstack(rows)
        matrix.setflags(write=False)
        self._index = index
        self._tokens = tuple(index)
        self._matrix = matrix
        norms = np.linalg.norm(matrix, axis=1)
        norms.setflags(write=False)
        self._norms = norms
        self.dim = int(dim)

    @property
    def vocab_size(self):
        return len(self._tokens)

    @property
    def tokens(self):
        return self._tokens

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return normalize_token(token) in self._index

    def __getitem__(self, token):
        key = normalize_token(token)
        try:
            return self._matrix[self._index[key]]
        except KeyError:
            raise NotFoundError(f"token {token!r} not in embedding table") from None

    def get(self, token, default=None):
        key = normalize_token(token)
        i = self._index.get(key)
        return default if i is None else self._matrix[i]

    def embed_text(self, text):
        """Vector for a possibly multi-word item, or None if nothing is known.

        A whole-string hit wins; otherwise the in-vocabulary words are
        averaged.
        """
        vec = self.get(text)
        if vec is not None:
            return vec
        words = [w for w in text.split() if w in self]
        if not words:
            return None
        return np.mean([self[w] for w in words], axis=0)


def load_embeddings(path, expected_dim=None):
    """Read a whitespace-separated word-vector file.

    Raises
    ------
    ParseError
        On a line with the wrong number of components or a non-numeric
        component.
    EmptyResultError
        If the file holds no entries.
    """
    path = Path(path)
    entries = []
    dim = expected_dim
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split(" ")
            token, raw = parts[0], parts[1:]
            if not normalize_token(token):
                raise ParseError(f"empty token after normalization: {token!r}", line=lineno, path=path)
            if dim is None:
                dim = len(raw)
                if dim == 0:
                    raise ParseError("entry has no components", line=lineno, path=path)
            if len(raw) != dim:
                raise ParseError(f"expected {dim} components, got {len(raw)}", line=lineno, path=path)
            try:
                vec = [float(x) for x in raw]
            except ValueError as exc:
                raise ParseError(f"non-numeric component ({exc})", line=lineno, path=path) from None
            if not all(math.isfinite(x) for x in vec):
                raise ParseError("non-finite component", line=lineno, path=path)
            entries.append((token, vec))
    if not entries:
        raise EmptyResultError(f"{path}: no embedding entries")
    table = EmbeddingTable(entries, dim=dim)
    logger.info("loaded %d vectors of dim %d from %s", table.vocab_size, table.dim, path)
    return table


def cosine_sim(u, v):
    """Cosine similarity in [-1, 1]; 0.0 with a warning if either side is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ContractError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        warnings.warn("cosine similarity of a zero vector, returning 0", ZeroVectorWarning, stacklevel=2)
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def nearest_neighbors(token, k, table):
    """The ``k`` most similar other tokens, best first, ties by token."""
    if k < 1:
        raise ContractError("k must be >= 1")
    query = table[token]
    key = normalize_token(token)
    qn = np.linalg.norm(query)
    denom = table._norms * qn
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = np.where(denom > 0, table._matrix @ query / denom, 0.0)
    sims = np.clip(sims, -1.0, 1.0)
    scored = [(-float(s), t) for t, s in zip(table.tokens, sims) if t != key]
    scored.sort()
    return [(t, -s) for s, t in scored[:k]]


def pool_question(tokens, table):
    """Mean of the vectors of the in-vocabulary tokens."""
    vecs = [table[t] for t in tokens if t in table]
    if not vecs:
        raise EmptyResultError(f"no in-vocabulary tokens in {list(tokens)!r}")
    return np.mean(vecs, axis=0)
