"""Contrastive losses over projected items and the combined objective."""

import math
from typing import NamedTuple

import numpy as np

from ..errors import ContractError, NotFoundError
from .heads import project


class LossParts(NamedTuple):
    l_se: float
    l_llm: float
    l_e: float
    l_r: float
    l_a: float


def _scores(query, positive, negatives):
    keys = np.vstack([positive] + list(negatives)) if len(negatives) else np.atleast_2d(positive)
    return keys @ query, keys


def _logsoftmax_loss(s):
    # -log softmax(s)[0]; log1p branch keeps tiny losses representable
    m = s.max()
    if m == s[0]:
        return float(math.log1p(np.exp(s[1:] - s[0]).sum())) if s.size > 1 else 0.0
    return float(m - s[0] + math.log(np.exp(s - m).sum()))


def infonce(query, positive, negatives, tau):
    """InfoNCE loss of one query against a positive and its negatives.

    The softmax runs over the positive plus every negative, so the loss is
    exactly 0 with no negatives.
    """
    if not tau > 0:
        raise ContractError(f"tau must be positive, got {tau}")
    query = np.asarray(query, dtype=np.float64)
    positive = np.asarray(positive, dtype=np.float64)
    negatives = [np.asarray(n, dtype=np.float64) for n in negatives]
    for v in [positive] + negatives:
        if v.shape != query.shape:
            raise ContractError(f"vector length mismatch: {v.shape} vs {query.shape}")
    s, _ = _scores(query, positive, negatives)
    return _logsoftmax_loss(s / tau)


def infonce_grad(query, keys, tau):
    """Loss and gradients w.r.t. the query and every key row.

    ``keys[0]`` is the positive.
    """
    s = keys @ query / tau
    loss = _logsoftmax_loss(s)
    p = np.exp(s - s.max())
    p /= p.sum()
    g = p.copy()
    g[0] -= 1.0
    g /= tau
    return loss, keys.T @ g, np.outer(g, query)


def _embed(item, table):
    vec = table.embed_text(item)
    if vec is None:
        raise NotFoundError(f"item {item!r} has no embedding")
    return vec


def _item_loss(query_vec, head, positive, negatives, table, tau):
    pos = project(head, _embed(positive, table))
    negs = [project(head, _embed(n, table)) for n in negatives]
    return infonce(query_vec, pos, negs, tau)


def entity_loss(question_vec, positive_entity, negative_entities, heads, table, tau=0.01):
    query = project(heads.question, question_vec)
    return _item_loss(query, heads.entity, positive_entity, negative_entities, table, tau)


def relation_loss(question_vec, positive_relation, negative_relations, heads, table, tau=0.01):
    query = project(heads.question, question_vec)
    return _item_loss(query, heads.relation, positive_relation, negative_relations, table, tau)


def fuse_features(question_vec, image_feature, fusion_head):
    """Shared image-question feature: the projected concatenation."""
    x = np.concatenate([np.asarray(question_vec, float), np.asarray(image_feature, float)])
    if x.shape[0] != fusion_head.in_dim:
        raise ContractError(f"fusion head expects {fusion_head.in_dim} inputs, got {x.shape[0]}")
    return project(fusion_head, x)


def answer_loss(fused, positive_answer, negative_answers, heads, table, tau=0.01):
    return _item_loss(fused, heads.answer, positive_answer, negative_answers, table, tau)


def combined_loss(parts, w):
    """Weighted sum of the five losses."""
    parts = LossParts(**parts) if isinstance(parts, dict) else LossParts(*parts)
    return math.fsum(lam * part for lam, part in zip(w.as_list(), parts))
