"""Knowledge-graph retrieval: triple store, projection heads, contrastive losses."""

from .heads import Heads, ProjectionHead, load_head, project, save_head
from .losses import (
    LossParts,
    answer_loss,
    combined_loss,
    entity_loss,
    fuse_features,
    infonce,
    relation_loss,
)
from .retrieval import answer_score, initial_answer_scores, kg_candidates, kg_similarity
from .store import Triple, TripleStore, load_triples
from .training import TrainingExample, loss_and_grads, train_projections

__all__ = [
    "Heads",
    "LossParts",
    "ProjectionHead",
    "TrainingExample",
    "Triple",
    "TripleStore",
    "answer_loss",
    "answer_score",
    "combined_loss",
    "entity_loss",
    "fuse_features",
    "infonce",
    "initial_answer_scores",
    "kg_candidates",
    "kg_similarity",
    "load_head",
    "load_triples",
    "loss_and_grads",
    "project",
    "relation_loss",
    "save_head",
    "train_projections",
]
