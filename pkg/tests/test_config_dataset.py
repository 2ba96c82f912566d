import json

import numpy as np
import pytest

from answer_forge.config import SCHEMA, load_config, parse_config_text
from answer_forge.dataset import load_dataset, load_splits
from answer_forge.errors import ParseError, ValidationError

from conftest import write_lines


def _base(tmp_path):
    for name in ("v.txt", "t.tsv", "d.jsonl", "s.tsv"):
        (tmp_path / name).write_text("x\n")
    return [
        "paths.embeddings = v.txt",
        "paths.triples = t.tsv",
        "paths.dataset = d.jsonl",
        "paths.splits = s.tsv",
    ]


class TestConfig:
    def test_fixture_loads(self, fixture_config):
        cfg = load_config(fixture_config)
        assert cfg.path("paths.embeddings").is_absolute()
        assert cfg["pso.K"] == 2 and cfg["eval.mode"] == "gzsl"
        assert cfg.swarm().seed == cfg.seed == 7
        assert cfg.path("paths.lm_corpus") is None

    def test_defaults(self, tmp_path):
        cfg = parse_config_text("\n".join(_base(tmp_path)), tmp_path)
        for key in ("qs.mu", "tau", "pso.particle_num", "pso.K", "epochs"):
            assert cfg[key] == SCHEMA[key][1]
        assert cfg.swarm().particle_num == 20

    def test_unknown_key_lists_valid(self, tmp_path):
        with pytest.raises(ValidationError, match="valid keys:.*qs.mu"):
            parse_config_text("\n".join(_base(tmp_path) + ["qs.muu = 0.3"]), tmp_path)

    def test_missing_required(self, tmp_path):
        with pytest.raises(ValidationError, match="paths.splits"):
            parse_config_text("\n".join(_base(tmp_path)[:3]), tmp_path)

    def test_missing_file(self, tmp_path):
        lines = _base(tmp_path)
        (tmp_path / "v.txt").unlink()
        with pytest.raises(ValidationError, match="not found"):
            parse_config_text("\n".join(lines), tmp_path)

    @pytest.mark.parametrize(
        "line", ["tau = 0", "eval.mode = fsl", "qs.mu = 1.5", "pso.particle_num = 0", "provider.kind = http", "epochs = 0"]
    )
    def test_invalid_values(self, tmp_path, line):
        with pytest.raises(ValidationError):
            parse_config_text("\n".join(_base(tmp_path) + [line]), tmp_path)

    def test_bad_syntax(self, tmp_path):
        with pytest.raises(ParseError):
            parse_config_text("\n".join(_base(tmp_path) + ["epochs"]), tmp_path)
        with pytest.raises(ParseError):
            parse_config_text("\n".join(_base(tmp_path) + ["epochs = many"]), tmp_path)

    def test_overrides(self, fixture_config):
        cfg = load_config(fixture_config).with_overrides(seed=11, **{"eval.mode": "ZSL"})
        assert cfg.seed == 11 and cfg["eval.mode"] == "zsl"
        with pytest.raises(ValidationError):
            cfg.with_overrides(tau=-1.0)

    def test_unreadable(self, tmp_path):
        with pytest.raises(ValidationError):
            load_config(tmp_path / "missing.txt")


def _row(**kw):
    row = {
        "sample_id": "a", "question": "What is it?", "answer": "Cat", "captions": ["c"],
        "objects": ["cat"], "image_feature": [0.1, 0.2],
    }
    row.update(kw)
    return json.dumps(row)


class TestDataset:
    def test_fixture(self, fixture_dir):
        samples = load_dataset(fixture_dir / "samples.jsonl")
        assert len(samples) == 16
        assert samples[0].question == ("what", "kind", "of", "animal", "is", "this")
        assert samples[0].fact == ("cat", "is-a", "mammal")
        assert samples[0].image_feature.shape == (4,)

    def test_normalization(self, tmp_path):
        (s,) = load_dataset(write_lines(tmp_path / "d.jsonl", [_row()]))
        assert s.question == ("what", "is", "it") and s.answer == "cat" and s.fact is None

    @pytest.mark.parametrize(
        "bad",
        ["{not json", _row(question=""), _row(answer=3), _row(image_feature=[]), _row(objects="cat"),
         _row(fact=["a", "b"]), json.dumps({"sample_id": "x"}), "[1, 2]"],
    )
    def test_parse_errors(self, tmp_path, bad):
        with pytest.raises(ParseError) as err:
            load_dataset(write_lines(tmp_path / "d.jsonl", [_row(sample_id="ok"), bad]))
        assert err.value.line == 2

    def test_dimension_mismatch(self, tmp_path):
        path = write_lines(tmp_path / "d.jsonl", [_row(), _row(sample_id="b", image_feature=[1.0])])
        with pytest.raises(ValidationError):
            load_dataset(path)
        with pytest.raises(ValidationError):
            load_dataset(write_lines(tmp_path / "e.jsonl", [_row()]), image_dim=3)

    def test_duplicate_id(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write_lines(tmp_path / "d.jsonl", [_row(), _row()]))

    def test_empty(self, tmp_path):
        with pytest.raises(ValidationError):
            load_dataset(write_lines(tmp_path / "d.jsonl", [""]))

    def test_image_feature_values(self, tmp_path):
        (s,) = load_dataset(write_lines(tmp_path / "d.jsonl", [_row(image_feature=[1, 2.5])]))
        np.testing.assert_array_equal(s.image_feature, [1.0, 2.5])


class TestSplits:
    def test_fixture(self, fixture_dir):
        splits = load_splits(fixture_dir / "splits.tsv")
        assert list(splits) == ["0", "1"]
        assert splits["0"]["val"] == ["s16"] and splits["1"]["val"] == []

    def test_unknown_sample(self, tmp_path):
        path = write_lines(tmp_path / "s.tsv", ["0\ta\ttrain", "0\tb\ttest"])
        with pytest.raises(ValidationError):
            load_splits(path, ["a"])

    def test_bad_role(self, tmp_path):
        with pytest.raises(ParseError):
            load_splits(write_lines(tmp_path / "s.tsv", ["0\ta\tdev"]))

    def test_needs_train_and_test(self, tmp_path):
        with pytest.raises(ValidationError):
            load_splits(write_lines(tmp_path / "s.tsv", ["0\ta\ttrain"]))
