"""End-to-end training/evaluation loop with stagnation-triggered weight search."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import load_dataset, load_splits
from .embeddings import load_embeddings, pool_question
from .errors import EmptyResultError, ValidationError
from .kg.heads import Heads, project
from .kg.losses import fuse_features
from .kg.retrieval import EmbeddedStore, kg_candidates_batch
from .kg.store import load_triples
from .kg.training import (
    TrainingExample,
    constant_terms,
    key_matrix,
    sample_negatives,
    train_projections,
)
from .llm.captions import build_prompts, curate_captions
from .llm.ngram import NgramLM
from .llm.objectives import filter_variants_by_fluency, llm_loss
from .llm.providers import generate_candidates, make_provider
from .metrics import SplitSpec, aggregate, candidate_pool, rank_of_truth
from .pso import optimize_weights, stagnation_gate
from .qsearch import expand_question, question_set_loss
from .scoring import ScoringContext, rank_candidate_pool, score_one
from .weights import LossWeights

logger = logging.getLogger(__name__)


@dataclass
class SampleContext:
    """Per-sample quantities that do not depend on the projection heads."""

    sample: object
    question_vec: np.ndarray
    qset: object
    prompts: list
    llm: dict
    l_se: float
    l_llm: float


@dataclass
class RunState:
    heads: Heads
    weights: LossWeights
    s_best: float = -math.inf
    epoch: int = 0
    scores: list = field(default_factory=list)
    weight_trace: list = field(default_factory=list)
    triggers: list = field(default_factory=list)
    pso_history: list = field(default_factory=list)
    since_trigger: int = 0


class Resources:
    """Files shared by every split: vectors, triples, samples, LM, provider."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.table = load_embeddings(cfg.path("paths.embeddings"))
        self.store = load_triples(cfg.path("paths.triples"))
        if len(self.store) == 0:
            raise ValidationError("triple file holds no triples")
        self.embedded = EmbeddedStore(self.store, self.table)
        self.samples = load_dataset(cfg.path("paths.dataset"), cfg["image_dim"])
        self.by_id = {s.sample_id: s for s in self.samples}
        self.splits = load_splits(cfg.path("paths.splits"), self.by_id)
        self.image_dim = self.samples[0].image_feature.shape[0]
        corpus_path = cfg.path("paths.lm_corpus")
        if corpus_path is not None:
            corpus = corpus_path.read_text(encoding="utf-8").splitlines()
        else:
            corpus = [" ".join(s.question) for s in self.samples]
            corpus += [c for s in self.samples for c in s.captions]
        self.lm = NgramLM(corpus, alpha=cfg["lm.alpha"])
        self.provider = make_provider(cfg.provider(), cfg.path("paths.mock_fixture"))
        self._contexts = {}

    def context(self, sample):
        """Head-independent preprocessing, cached per sample."""
        ctx = self._contexts.get(sample.sample_id)
        if ctx is not None:
            return ctx
        cfg = self.cfg
        try:
            qvec = pool_question(sample.question, self.table)
        except EmptyResultError:
            logger.warning("sample %s: no in-vocabulary question token, using a zero encoding", sample.sample_id)
            qvec = np.zeros(self.table.dim)
        qset = expand_question(sample.question, sample.objects, cfg.qs(), self.table)
        qset = filter_variants_by_fluency(qset, self.lm, cfg["qs.fluency_margin"])
        captions = curate_captions(sample.captions or [" ".join(sample.question)], cfg["k_captions"], sample.sample_id)
        prompts = build_prompts(captions, qset)
        candidates = generate_candidates(self.provider, prompts, self.lm)
        ctx = SampleContext(
            sample=sample,
            question_vec=qvec,
            qset=qset,
            prompts=prompts,
            llm={c.answer: c for c in candidates},
            l_se=question_set_loss(qset, cfg["qs.alpha"]),
            l_llm=llm_loss(candidates),
        )
        self._contexts[sample.sample_id] = ctx
        return ctx


def answer_vocabulary(answers, size):
    """The ``size`` most frequent answers, ties broken lexicographically."""
    counts = Counter(answers)
    return sorted(counts, key=lambda a: (-counts[a], a))[:size]


class SplitRun:
    """One split's train/validation/test samples and derived training data."""

    def __init__(self, res, split_id, index):
        cfg = res.cfg
        self.res = res
        self.cfg = cfg
        self.split_id = split_id
        roles = res.splits[split_id]
        self.train_samples = [res.by_id[i] for i in roles["train"]]
        self.val_samples = [res.by_id[i] for i in roles["val"]] or self.train_samples
        self.test_samples = [res.by_id[i] for i in roles["test"]]
        seen = answer_vocabulary([s.answer for s in self.train_samples], cfg["answer_vocab_size"])
        self.split = SplitSpec(cfg["eval.mode"], seen, {s.answer for s in self.test_samples})
        self.pool = candidate_pool(self.split)
        self.seed_base = [cfg.seed, index]

        self.train_ctx = [res.context(s) for s in self.train_samples]
        self.val_ctx = [res.context(s) for s in self.val_samples]
        self.test_ctx = [res.context(s) for s in self.test_samples]
        self.l_se = float(np.mean([c.l_se for c in self.train_ctx]))
        self.l_llm = float(np.mean([c.l_llm for c in self.train_ctx]))
        self.examples = self._examples(seen)
        if not self.examples:
            raise ValidationError(f"split {split_id}: no usable training samples")

    def _examples(self, seen):
        res, cfg = self.res, self.cfg
        n_neg = cfg["training.negatives"]
        examples = []
        for i, ctx in enumerate(self.train_ctx):
            s = ctx.sample
            rng = np.random.default_rng(self.seed_base + [i])
            fact = s.fact
            if fact is None:
                facts = res.store.facts_for_answer(s.answer)
                fact = (facts[0].entity, facts[0].relation, facts[0].answer) if facts else None
            ent = rel = None
            if fact is not None:
                ent = key_matrix(fact[0], sample_negatives(res.store.entities, fact[0], n_neg, rng, res.table), res.table)
                rel = key_matrix(fact[1], sample_negatives(res.store.relations, fact[1], n_neg, rng, res.table), res.table)
            ans = key_matrix(s.answer, sample_negatives(seen, s.answer, n_neg, rng, res.table), res.table)
            if ent is None and rel is None and ans is None:
                continue
            examples.append(TrainingExample(ctx.question_vec, s.image_feature, ent, rel, ans))
        return examples

    def init_state(self):
        text_dim = self.res.table.dim
        shared = self.cfg["training.shared_dim"] or text_dim
        rng = np.random.default_rng(self.seed_base + [2**31])
        return RunState(Heads.init(text_dim, self.res.image_dim, shared, rng), LossWeights.uniform())

    def train(self, heads, weights, steps):
        cfg = self.cfg
        const = constant_terms(weights, self.l_se, self.l_llm)
        return train_projections(self.examples, heads, weights, steps, cfg["training.lr"], cfg["tau"], const)

    def scoring_contexts(self, contexts, heads, weights):
        table = self.res.table
        queries = [project(heads.question, c.question_vec) for c in contexts]
        kgs = kg_candidates_batch(queries, self.res.embedded, heads, self.cfg["kg.delta"])
        score_cfg = self.cfg.score()
        lam = weights[score_cfg.lambda_index]
        out = []
        for c, kg in zip(contexts, kgs):
            fused = fuse_features(c.question_vec, c.sample.image_feature, heads.fusion)
            out.append(ScoringContext(fused, heads, table, score_cfg, lam, c.llm, kg))
        return out

    def validation_score(self, heads, weights):
        """Sum over validation samples of the ground-truth answer's score."""
        ctxs = self.scoring_contexts(self.val_ctx, heads, weights)
        return math.fsum(score_one(c.sample.answer, s).final for c, s in zip(self.val_ctx, ctxs))

    def fitness(self, heads):
        steps = self.cfg["pso.inner_steps"]

        def fn(weights):
            trained, _ = self.train(heads, weights, steps)
            return self.validation_score(trained, weights)

        return fn

    def evaluate(self, state):
        ctxs = self.scoring_contexts(self.test_ctx, state.heads, state.weights)
        ranks, rows = [], []
        for c, sctx in zip(self.test_ctx, ctxs):
            ranking = rank_candidate_pool(self.pool, sctx)
            answers = [r.answer for r in ranking]
            rank = rank_of_truth(answers, c.sample.answer)
            ranks.append(rank)
            rows.append(
                {
                    "sample_id": c.sample.sample_id,
                    "truth": c.sample.answer,
                    "rank": rank,
                    "top10": [[r.answer, r.final, r.branch] for r in ranking[:10]],
                }
            )
        report = aggregate(ranks, sample_ids=[c.sample.sample_id for c in self.test_ctx])
        return report, rows


def run_epoch(run, state):
    """Train, score the validation batch, update the best, maybe search weights.

    Returns the state and the epoch's validation score.
    """
    cfg = run.cfg
    state.epoch += 1
    state.heads, _ = run.train(state.heads, state.weights, cfg["training.steps"])
    score = run.validation_score(state.heads, state.weights)
    state.scores.append(score)
    state.s_best = max(state.s_best, score)
    swarm = cfg.swarm()
    if stagnation_gate(state.scores[state.since_trigger :], state.s_best, swarm.stagnation_K):
        logger.info("epoch %d: score %.6g below best %.6g for %d epochs, searching weights",
                    state.epoch, score, state.s_best, swarm.stagnation_K)
        trigger_no = len(state.triggers)
        swarm_cfg = replace(swarm, seed=swarm.seed + trigger_no)
        result = optimize_weights(run.fitness(state.heads), swarm_cfg, incumbent=state.weights)
        state.triggers.append(
            {
                "epoch": state.epoch,
                "s_best": state.s_best,
                "score": score,
                "best_fitness": result.best_fitness,
                "weights": result.best.as_list(),
            }
        )
        for it, val in enumerate(result.history, start=1):
            state.pso_history.append({"epoch": state.epoch, "iteration": it, "best_fitness": val})
        state.weights = result.best
        state.heads, _ = run.train(state.heads, state.weights, cfg["pso.inner_steps"])
        state.since_trigger = state.epoch
    state.weight_trace.append(state.weights.as_list())
    return state, score


def run_split(run, epochs=None):
    state = run.init_state()
    for _ in range(epochs or run.cfg["epochs"]):
        state, score = run_epoch(run, state)
        logger.info("split %s epoch %d score %.6g best %.6g", run.split_id, state.epoch, score, state.s_best)
    report, rows = run.evaluate(state)
    return state, report, rows


def run_pipeline(cfg):
    """Run every split in the splits file.

    Returns a JSON-ready report dictionary.
    """
    res = Resources(cfg)
    splits = []
    for index, split_id in enumerate(res.splits):
        run = SplitRun(res, split_id, index)
        state, report, rows = run_split(run)
        splits.append(
            {
                "split_id": split_id,
                "mode": run.split.mode,
                "pool_size": len(run.pool),
                "metrics": report.metrics(),
                "per_sample": rows,
                "final_weights": state.weights.as_list(),
                "weight_trace": state.weight_trace,
                "score_trace": state.scores,
                "s_best": state.s_best,
                "pso_triggers": state.triggers,
                "pso_history": state.pso_history,
            }
        )
    return {
        "seed": cfg.seed,
        "mode": cfg["eval.mode"],
        "stagnation_K": cfg["pso.K"],
        "splits": splits,
    }
