"""Linear projection heads with L2-normalized outputs."""

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractError, ParseError, ZeroVectorWarning


class ProjectionHead:
    """``x -> normalize(W x + b)``.

    ``weight`` has shape ``(out_dim, in_dim)``.
    """

    def __init__(self, weight, bias):
        weight = np.array(weight, dtype=np.float64, ndmin=2)
        bias = np.array(bias, dtype=np.float64).reshape(-1)
        if bias.shape[0] != weight.shape[0]:
            raise ContractError(f"bias length {bias.shape[0]} does not match out_dim {weight.shape[0]}")
        if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
            raise ContractError("non-finite head parameters")
        self.weight = weight
        self.bias = bias

    @property
    def in_dim(self):
        return self.weight.shape[1]

    @property
    def out_dim(self):
        return self.weight.shape[0]

    @classmethod
    def random(cls, in_dim, out_dim, rng):
        bound = 1.0 / np.sqrt(in_dim)
        weight = rng.uniform(-bound, bound, size=(out_dim, in_dim))
        bias = rng.uniform(-bound, bound, size=out_dim)
        return cls(weight, bias)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), np.zeros(dim))

    def copy(self):
        return ProjectionHead(self.weight.copy(), self.bias.copy())

    def __call__(self, v):
        return project(self, v)

    def __eq__(self, other):
        if not isinstance(other, ProjectionHead):
            return NotImplemented
        return np.array_equal(self.weight, other.weight) and np.array_equal(self.bias, other.bias)

    def __repr__(self):
        return f"ProjectionHead(in_dim={self.in_dim}, out_dim={self.out_dim})"


def project(head, v):
    """Normalized affine map.  A zero pre-activation maps to the zero vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (head.in_dim,):
        raise ContractError(f"expected input of length {head.in_dim}, got shape {v.shape}")
    z = head.weight @ v + head.bias
    n = np.linalg.norm(z)
    if n == 0.0:
        warnings.warn("projection pre-activation is zero", ZeroVectorWarning, stacklevel=2)
        return z
    return z / n


def project_many(head, X):
    """Row-wise :func:`project` for a ``(n, in_dim)`` matrix.

    Returns the normalized outputs together with the pre-activation norms
    needed by :func:`project_backward`.
    """
    Z = X @ head.weight.T + head.bias
    norms = np.linalg.norm(Z, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return Z / safe[:, None], norms


def project_backward(head, X, Y, norms, dY):
    """Gradients of a scalar loss w.r.t. ``head`` given ``dL/dY``.

    ``X`` are the inputs, ``Y`` the normalized outputs and ``norms`` the
    pre-activation norms from :func:`project_many`.  Rows with zero norm
    contribute nothing.
    """
    safe = np.where(norms > 0, norms, np.inf)
    dZ = (dY - Y * np.sum(Y * dY, axis=1, keepdims=True)) / safe[:, None]
    return dZ.T @ X, dZ.sum(axis=0)


@dataclass
class Heads:
    """The five heads mapping every modality into the shared space."""

    question: ProjectionHead
    entity: ProjectionHead
    relation: ProjectionHead
    answer: ProjectionHead
    fusion: ProjectionHead

    NAMES = ("question", "entity", "relation", "answer", "fusion")

    @classmethod
    def init(cls, text_dim, image_dim, shared_dim, rng):
        return cls(
            question=ProjectionHead.random(text_dim, shared_dim, rng),
            entity=ProjectionHead.random(text_dim, shared_dim, rng),
            relation=ProjectionHead.random(text_dim, shared_dim, rng),
            answer=ProjectionHead.random(text_dim, shared_dim, rng),
            fusion=ProjectionHead.random(text_dim + image_dim, shared_dim, rng),
        )

    @classmethod
    def identity(cls, text_dim, image_dim):
        fusion = np.zeros((text_dim, text_dim + image_dim))
        fusion[:, :text_dim] = np.eye(text_dim)
        return cls(
            question=ProjectionHead.identity(text_dim),
            entity=ProjectionHead.identity(text_dim),
            relation=ProjectionHead.identity(text_dim),
            answer=ProjectionHead.identity(text_dim),
            fusion=ProjectionHead(fusion, np.zeros(text_dim)),
        )

    def copy(self):
        return Heads(*(getattr(self, n).copy() for n in self.NAMES))

    def items(self):
        return [(n, getattr(self, n)) for n in self.NAMES]


def save_head(head, path):
    """Write ``in_dim out_dim``, then the row-major weights, then the bias."""
    lines = [f"{head.in_dim} {head.out_dim}"]
    lines.extend(" ".join(repr(float(x)) for x in row) for row in head.weight)
    lines.append(" ".join(repr(float(x)) for x in head.bias))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_head(path):
    path = Path(path)
    tokens = path.read_text(encoding="utf-8").split()
    if len(tokens) < 2:
        raise ParseError("missing header", path=path)
    try:
        in_dim, out_dim = int(tokens[0]), int(tokens[1])
        values = np.array([float(t) for t in tokens[2:]])
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from None
    expected = out_dim * in_dim + out_dim
    if values.size != expected:
        raise ParseError(f"expected {expected} values, got {values.size}", path=path)
    split = out_dim * in_dim
    return ProjectionHead(values[:split].reshape(out_dim, in_dim), values[split:])
