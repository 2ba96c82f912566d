"""Zero-shot VQA answer ranking: LLM and knowledge-graph candidates fused
and scored, with loss weights tuned by simplex-constrained PSO."""

from .embeddings import EmbeddingTable, cosine_sim, load_embeddings, nearest_neighbors, pool_question
from .metrics import EvalReport, SplitSpec, aggregate, candidate_pool, rank_of_truth
from .pso import SwarmConfig, optimize_weights, project_simplex, stagnation_gate
from .qsearch import QSConfig, QuestionSet, diversity_loss, expand_question, word_relevance
from .scoring import ScoreConfig, ScoredCandidate, fuse_candidates, rank_candidate_pool, score_answer
from .weights import LossWeights

__version__ = "0.1.0"

__all__ = [
    "EmbeddingTable",
    "EvalReport",
    "LossWeights",
    "QSConfig",
    "QuestionSet",
    "ScoreConfig",
    "ScoredCandidate",
    "SplitSpec",
    "SwarmConfig",
    "aggregate",
    "candidate_pool",
    "cosine_sim",
    "diversity_loss",
    "expand_question",
    "fuse_candidates",
    "load_embeddings",
    "nearest_neighbors",
    "optimize_weights",
    "pool_question",
    "project_simplex",
    "rank_candidate_pool",
    "rank_of_truth",
    "score_answer",
    "stagnation_gate",
    "word_relevance",
]
