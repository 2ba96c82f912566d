import json

import pytest

from answer_forge.cli import main


def test_run_writes_reports_and_figures(fixture_config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(fixture_config), "--out", str(out), "--mode", "zsl"]) == 0
    for name in ("report.json", "metrics.csv", "pso_history.csv", "ranks.csv", "score_trace.csv"):
        assert (out / name).is_file()
    for name in ("score_trace.png", "pso_history.png", "hits.png"):
        assert (out / "figures" / name).stat().st_size > 0
    report = json.loads((out / "report.json").read_text())
    assert report["mode"] == "zsl"
    assert "split 0 (zsl)" in capsys.readouterr().out


def test_no_figures(fixture_config, tmp_path):
    assert main(["run", "--config", str(fixture_config), "--out", str(tmp_path), "--no-figures"]) == 0
    assert not (tmp_path / "figures").exists()


def test_eval_round_trip(fixture_config, tmp_path, capsys):
    main(["run", "--config", str(fixture_config), "--out", str(tmp_path), "--no-figures"])
    report = json.loads((tmp_path / "report.json").read_text())
    capsys.readouterr()
    assert main(["eval", "--ranks", str(tmp_path / "ranks.csv")]) == 0
    out = json.loads(capsys.readouterr().out)
    for sp in report["splits"]:
        assert out[sp["split_id"]] == sp["metrics"]


def test_eval_plain_ranks(tmp_path, capsys):
    (tmp_path / "r.csv").write_text("rank\n1\n3\n")
    assert main(["eval", "--ranks", str(tmp_path / "r.csv")]) == 0
    m = json.loads(capsys.readouterr().out)["all"]
    assert m["hit1"] == 50.0 and m["mr"] == 2.0


@pytest.mark.parametrize("fn", ["sphere", "linear"])
def test_pso_bench(fn, capsys):
    assert main(["pso-bench", "--function", fn]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_validation_exit_code(tmp_path, capsys):
    (tmp_path / "c.txt").write_text("bogus.key = 1\n")
    assert main(["run", "--config", str(tmp_path / "c.txt"), "--out", str(tmp_path)]) == 1
    assert "unknown config key" in capsys.readouterr().err


def test_malformed_input_is_validation_error(tmp_path):
    (tmp_path / "r.csv").write_text("rank\nfoo\n")
    assert main(["eval", "--ranks", str(tmp_path / "r.csv")]) == 1


def test_runtime_exit_code(tmp_path):
    assert main(["eval", "--ranks", str(tmp_path / "missing.csv")]) == 2


def test_log_level_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("ANSWER_FORGE_LOG", "debug")
    (tmp_path / "r.csv").write_text("rank\n1\n")
    assert main(["eval", "--ranks", str(tmp_path / "r.csv")]) == 0
