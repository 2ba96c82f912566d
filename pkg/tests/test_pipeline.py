import itertools
import json

import numpy as np
import pytest

from answer_forge import pipeline
from answer_forge.config import load_config
from answer_forge.pso import PSOResult, replay_triggers
from answer_forge.scoring import rank_candidate_pool
from answer_forge.weights import LossWeights

from oracles import dot, linear_normed


@pytest.fixture
def cfg(fixture_config):
    return load_config(fixture_config)


@pytest.fixture
def split_run(cfg):
    res = pipeline.Resources(cfg)
    return pipeline.SplitRun(res, "0", 0)


def _scripted(monkeypatch, scores):
    """Replace the validation score with a fixed trace and stub the swarm."""
    it = iter(scores)
    monkeypatch.setattr(pipeline.SplitRun, "validation_score", lambda self, h, w: next(it))
    calls = []

    def fake_optimize(fitness, cfg, incumbent=None):
        calls.append(cfg.seed)
        return PSOResult(LossWeights.uniform(), 0.0, [0.0])

    monkeypatch.setattr(pipeline, "optimize_weights", fake_optimize)
    return calls


class TestEpochLoop:
    def test_zero_steps_keeps_heads(self, cfg, fixture_config):
        run = pipeline.SplitRun(pipeline.Resources(cfg.with_overrides(**{"training.steps": 0})), "0", 0)
        state = run.init_state()
        before = state.heads.copy()
        state, score = pipeline.run_epoch(run, state)
        for name, h in before.items():
            assert getattr(state.heads, name) == h
        assert state.scores == [score] and state.s_best == score

    def test_improving_never_triggers(self, split_run, monkeypatch):
        calls = _scripted(monkeypatch, itertools.count())
        state = split_run.init_state()
        for _ in range(8):
            state, _ = pipeline.run_epoch(split_run, state)
        assert calls == [] and state.triggers == []

    def test_constant_never_triggers(self, split_run, monkeypatch):
        calls = _scripted(monkeypatch, itertools.repeat(0.25))
        state = split_run.init_state()
        for _ in range(8):
            state, _ = pipeline.run_epoch(split_run, state)
        assert calls == []
        assert replay_triggers(state.scores, 2) == []

    def test_decreasing_triggers_every_epoch_with_k1(self, cfg, monkeypatch):
        run = pipeline.SplitRun(pipeline.Resources(cfg.with_overrides(**{"pso.K": 1})), "0", 0)
        calls = _scripted(monkeypatch, [5.0, 4.0, 3.0, 2.0])
        state = run.init_state()
        for _ in range(4):
            state, _ = pipeline.run_epoch(run, state)
        assert [t["epoch"] for t in state.triggers] == [2, 3, 4]
        # each trigger uses a fresh swarm seed
        assert calls == [7, 8, 9]
        assert all(t["s_best"] == 5.0 for t in state.triggers)

    def test_window_resets_after_trigger(self, split_run, monkeypatch):
        _scripted(monkeypatch, [3.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        state = split_run.init_state()
        for _ in range(6):
            state, _ = pipeline.run_epoch(split_run, state)
        assert [t["epoch"] for t in state.triggers] == [3, 5] == replay_triggers(state.scores, 2)


class TestEvaluation:
    def test_ranking_matches_straight_line(self, split_run):
        state = split_run.init_state()
        heads, w = state.heads, state.weights
        ctxs = split_run.scoring_contexts(split_run.test_ctx, heads, w)
        table = split_run.res.table
        for c, sctx in zip(split_run.test_ctx[:3], ctxs[:3]):
            fused = linear_normed(heads.fusion.weight, heads.fusion.bias,
                                  list(c.question_vec) + list(c.sample.image_feature))
            np.testing.assert_allclose(sctx.fused, fused, atol=1e-12)
            expected = {}
            for a in split_run.pool:
                vec = table.embed_text(a)
                s_a = 0.0 if vec is None else dot(linear_normed(heads.answer.weight, heads.answer.bias, list(vec)), fused)
                cand = sctx.llm.get(a)
                sims = sctx.kg.get(a)
                sl = None if cand is None else w[1] * cand.confidence * cand.fluency
                sg = None if sims is None else s_a + sctx.config.beta * sum(sims)
                if sl is not None and sg is not None:
                    expected[a] = sl + sg
                elif sl is not None:
                    expected[a] = sl
                elif sg is not None:
                    expected[a] = sg
                else:
                    expected[a] = s_a - sctx.config.penalty_b
            got = rank_candidate_pool(split_run.pool, sctx)
            assert [r.answer for r in got] == sorted(expected, key=lambda a: (-expected[a], a))

    def test_pool_is_gzsl_union(self, split_run):
        train = {s.answer for s in split_run.train_samples}
        test = {s.answer for s in split_run.test_samples}
        assert set(split_run.pool) == train | test


class TestRunPipeline:
    def test_report_shape_and_replay(self, cfg):
        report = pipeline.run_pipeline(cfg)
        assert report["seed"] == 7 and [s["split_id"] for s in report["splits"]] == ["0", "1"]
        for sp in report["splits"]:
            assert len(sp["score_trace"]) == cfg["epochs"] == len(sp["weight_trace"])
            logged = [t["epoch"] for t in sp["pso_triggers"]]
            assert logged == replay_triggers(sp["score_trace"], cfg["pso.K"])
            assert sum(sp["final_weights"]) == pytest.approx(1.0)
            assert sp["metrics"]["n_samples"] == len(sp["per_sample"])
            assert 1.0 <= sp["metrics"]["mr"] <= sp["pool_size"]

    def test_deterministic(self, cfg):
        a = json.dumps(pipeline.run_pipeline(cfg), sort_keys=True)
        b = json.dumps(pipeline.run_pipeline(cfg), sort_keys=True)
        assert a == b

    def test_answer_vocabulary(self):
        assert pipeline.answer_vocabulary(["b", "a", "b", "c", "a"], 2) == ["a", "b"]
