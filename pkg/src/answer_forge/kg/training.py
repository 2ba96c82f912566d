"""Full-batch gradient descent on the contrastive part of the objective."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, TrainingError
from .heads import project_backward, project_many
from .losses import _logsoftmax_loss, infonce_grad

logger = logging.getLogger(__name__)


@dataclass
class TrainingExample:
    """Raw (unprojected) inputs of one training sample.

    Each ``*_keys`` matrix holds the positive in row 0 followed by the
    negatives, or is ``None`` when the sample has no such supervision.
    """

    question: np.ndarray
    image: np.ndarray
    entity_keys: np.ndarray = None
    relation_keys: np.ndarray = None
    answer_keys: np.ndarray = None


def sample_negatives(pool, positive, n, rng, table):
    """Up to ``n`` embeddable items drawn without replacement, excluding the positive."""
    candidates = [x for x in pool if x != positive and table.embed_text(x) is not None]
    if len(candidates) <= n:
        return candidates
    idx = rng.choice(len(candidates), size=n, replace=False)
    return [candidates[i] for i in sorted(idx)]


def key_matrix(positive, negatives, table):
    pos = table.embed_text(positive)
    if pos is None:
        return None
    return np.vstack([pos] + [table.embed_text(n) for n in negatives])


def _grouped_forward(head, blocks):
    present = [b for b in blocks if b is not None]
    if not present:
        return None
    X = np.vstack(present)
    Y, norms = project_many(head, X)
    return X, Y, norms


def loss_and_grads(examples, heads, weights, tau, constant=0.0):
    """Objective value and per-head ``(dW, db)`` gradients.

    The objective is ``constant`` plus the mean over ``examples`` of the
    weighted entity, relation and answer InfoNCE losses.
    """
    if not tau > 0:
        raise ContractError(f"tau must be positive, got {tau}")
    if not examples:
        raise ContractError("no training examples")
    n = len(examples)
    _, _, lam_e, lam_r, lam_a = weights.as_list()

    q_in = np.vstack([ex.question for ex in examples])
    Yq, q_norms = project_many(heads.question, q_in)
    f_in = np.vstack([np.concatenate([ex.question, ex.image]) for ex in examples])
    Yf, f_norms = project_many(heads.fusion, f_in)
    dYq = np.zeros_like(Yq)
    dYf = np.zeros_like(Yf)

    grads = {}
    total = 0.0
    for attr, head_name, lam, queries, dqueries in (
        ("entity_keys", "entity", lam_e, Yq, dYq),
        ("relation_keys", "relation", lam_r, Yq, dYq),
        ("answer_keys", "answer", lam_a, Yf, dYf),
    ):
        head = getattr(heads, head_name)
        blocks = [getattr(ex, attr) for ex in examples]
        fwd = _grouped_forward(head, blocks)
        if fwd is None:
            continue
        X, Y, norms = fwd
        dY = np.zeros_like(Y)
        row = 0
        for i, block in enumerate(blocks):
            if block is None:
                continue
            keys = Y[row : row + len(block)]
            if lam != 0.0:
                loss, dq, dk = infonce_grad(queries[i], keys, tau)
                total += lam * loss / n
                dqueries[i] += lam * dq / n
                dY[row : row + len(block)] += lam * dk / n
            row += len(block)
        grads[head_name] = project_backward(head, X, Y, norms, dY)

    grads["question"] = project_backward(heads.question, q_in, Yq, q_norms, dYq)
    grads["fusion"] = project_backward(heads.fusion, f_in, Yf, f_norms, dYf)
    return constant + total, grads


def objective(examples, heads, weights, tau, constant=0.0):
    """Forward-only version of :func:`loss_and_grads`."""
    n = len(examples)
    _, _, lam_e, lam_r, lam_a = weights.as_list()
    total = 0.0
    for ex in examples:
        q, _ = project_many(heads.question, ex.question[None])
        f, _ = project_many(heads.fusion, np.concatenate([ex.question, ex.image])[None])
        for keys, head, lam, query in (
            (ex.entity_keys, heads.entity, lam_e, q[0]),
            (ex.relation_keys, heads.relation, lam_r, q[0]),
            (ex.answer_keys, heads.answer, lam_a, f[0]),
        ):
            if keys is None or lam == 0.0:
                continue
            K, _ = project_many(head, keys)
            total += lam * _logsoftmax_loss(K @ query / tau) / n
    return constant + total


def constant_terms(weights, l_se, l_llm):
    """Contribution of the two losses that do not depend on the heads."""
    return weights.lambda1 * l_se + weights.lambda2 * l_llm


def train_projections(examples, heads, weights, steps, lr, tau=0.01, constant=0.0):
    """Run ``steps`` full-batch gradient-descent steps on a copy of ``heads``.

    Returns the trained copy and the loss recorded before each step.

    Raises
    ------
    TrainingError
        If the objective becomes non-finite.
    """
    if steps < 0:
        raise ContractError("steps must be >= 0")
    if not lr > 0:
        raise ContractError("lr must be positive")
    heads = heads.copy()
    trace = []
    for step in range(steps):
        loss, grads = loss_and_grads(examples, heads, weights, tau, constant)
        if not math.isfinite(loss):
            raise TrainingError(f"non-finite loss {loss!r} at step {step}")
        trace.append(loss)
        for name, (dW, db) in grads.items():
            head = getattr(heads, name)
            head.weight -= lr * dW
            head.bias -= lr * db
            if not (np.all(np.isfinite(head.weight)) and np.all(np.isfinite(head.bias))):
                raise TrainingError(f"non-finite parameters in {name} head at step {step}")
    if trace:
        logger.debug("trained %d steps: loss %.6g -> %.6g", steps, trace[0], trace[-1])
    return heads, trace
