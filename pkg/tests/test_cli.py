import json

from morreylab.cli import main


def test_counterexample_with_plot(tmp_path, capsys):
    assert main(["counterexample", "--out", str(tmp_path), "--plot"]) == 0
    assert (tmp_path / "counterexample.csv").exists()
    assert (tmp_path / "counterexample.svg").read_text().lstrip().startswith("<?xml")
    assert "counterexample: ok" in capsys.readouterr().out


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"presets": ["samko"], "lambdas": [0.5], "ps": [2.0]}))
    assert main(["ranges", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "ranges.json").exists()


def test_violations_exit_1(tmp_path):
    # a band no ratio can reach
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"presets": ["samko"], "lambdas": [0.5], "ps": [2.0]}))
    assert main(["norms", "--config", str(cfg), "--band", "100,200", "--refine", "2", "--out", str(tmp_path)]) == 1


def test_configuration_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"lambdas": [1.5]}')
    assert main(["ranges", "--config", str(bad)]) == 2
    assert main(["ranges", "--band", "3,1"]) == 2
    assert main(["ranges", "--band", "x"]) == 2
    assert main(["ranges", "--seed", "-4"]) == 2
    assert main(["nope"]) == 2
    assert main(["ranges", "--config", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "list.json").write_text("[1, 2]")
    assert main(["ranges", "--config", str(tmp_path / "list.json")]) == 2
