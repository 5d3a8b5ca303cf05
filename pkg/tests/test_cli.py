import json
from pathlib import Path

import pytest

from botforest.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
PARTITION = str(CONFIG_DIR / "partition_synth.json")


def write_synth_config(tmp_path, per_class=12, humans=60, seed=21):
    cfg = {
        "dataset_tag": "synth-default",
        "seed": seed,
        "humans": humans,
        "overlap": 0.25,
        "classes": [{"profile": name, "count": per_class} for name in (
            "simple_spambot", "social_spambot", "fake_follower",
            "self_declared", "astroturf")],
    }
    path = tmp_path / "synth.json"
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = write_synth_config(tmp)
    corpus = str(tmp / "corpus.jsonl")
    model = str(tmp / "model.json")
    assert main(["synth", "--config", cfg, "--out", corpus]) == 0
    code = main(["--seed", "3", "train", "--data", corpus, "--partition", PARTITION,
                 "--out", model, "--trees", "10"])
    assert code == 0
    return {"tmp": tmp, "cfg": cfg, "corpus": corpus, "model": model}


def test_pipeline_score_line_counts(pipeline, capsys):
    out = str(pipeline["tmp"] / "scores.jsonl")
    assert main(["score", "--model", pipeline["model"], "--input", pipeline["corpus"],
                 "--output", out]) == 0
    n_in = sum(1 for _ in open(pipeline["corpus"]))
    n_out = sum(1 for _ in open(out))
    assert n_in == n_out
    first = json.loads(open(out).readline())
    assert set(first) == {"user_id", "bot_score", "winning_class", "class_scores", "raw_scores"}


def test_train_digest_reproducible(pipeline, tmp_path, capsys):
    capsys.readouterr()
    model2 = str(tmp_path / "model2.json")
    assert main(["--seed", "3", "train", "--data", pipeline["corpus"], "--partition",
                 PARTITION, "--out", model2, "--trees", "10"]) == 0
    digest2 = capsys.readouterr().out.strip()
    model3 = str(tmp_path / "model3.json")
    assert main(["--seed", "3", "train", "--data", pipeline["corpus"], "--partition",
                 PARTITION, "--out", model3, "--trees", "10"]) == 0
    digest3 = capsys.readouterr().out.strip()
    assert digest2 == digest3
    assert digest2.startswith("model digest sha256:")
    assert open(model2).read() == open(model3).read()


def test_synth_deterministic_bytes(pipeline, tmp_path):
    out2 = str(tmp_path / "corpus2.jsonl")
    assert main(["synth", "--config", pipeline["cfg"], "--out", out2]) == 0
    assert open(pipeline["corpus"]).read() == open(out2).read()


def test_usage_error_exits_1_without_output(tmp_path):
    out = tmp_path / "model.json"
    code = main(["train", "--data", "x.jsonl", "--out", str(out)])  # no partition
    assert code == 1
    assert not out.exists()
    assert main(["definitely-not-a-command"]) == 1


def test_data_error_exits_2(tmp_path):
    code = main(["train", "--data", str(tmp_path / "missing.jsonl"),
                 "--partition", PARTITION, "--out", str(tmp_path / "m.json")])
    assert code == 2
    assert not (tmp_path / "m.json").exists()


def test_baseline_only_model_scores(pipeline, tmp_path, capsys):
    model = str(tmp_path / "baseline.json")
    assert main(["--seed", "3", "train", "--data", pipeline["corpus"], "--out", model,
                 "--baseline-only", "--trees", "10"]) == 0
    out = str(tmp_path / "scores.jsonl")
    assert main(["score", "--model", model, "--input", pipeline["corpus"],
                 "--output", out]) == 0
    first = json.loads(open(out).readline())
    assert first["class_scores"] == {}
    assert set(first["raw_scores"]) == {"human"}


def test_eval_loco_reports_held_class(pipeline, tmp_path, capsys):
    out = str(tmp_path / "loco.json")
    code = main(["--seed", "2", "eval", "loco", "--data", pipeline["corpus"],
                 "--partition", PARTITION, "--held-class", "fake_follower",
                 "--trees", "10", "--out", out])
    assert code == 0
    report = json.loads(open(out).read())
    assert report["held_class"] == "fake_follower"
    assert report["esc"]["experiment_meta"]["held_class"] == "fake_follower"
    assert "median_scores" in report


def test_eval_cv_reports_both_models(pipeline, tmp_path):
    out = str(tmp_path / "cv.json")
    code = main(["--seed", "2", "eval", "cv", "--data", pipeline["corpus"],
                 "--partition", PARTITION, "--trees", "10", "--out", out])
    assert code == 0
    report = json.loads(open(out).read())
    assert set(report) == {"monolithic", "esc", "score_agreement_spearman"}


def test_eval_matrix_csv_outputs(pipeline, tmp_path):
    prefix = str(tmp_path / "matrix")
    code = main(["--seed", "2", "eval", "matrix", "--data", pipeline["corpus"],
                 pipeline["corpus"], "--trainer", "monolithic", "--trees", "10",
                 "--out-prefix", prefix])
    assert code == 0
    for metric in ("precision", "recall", "f1", "auc"):
        assert (tmp_path / f"matrix.{metric}.csv").exists()


def test_eval_holdout(pipeline, tmp_path):
    out = str(tmp_path / "holdout.json")
    code = main(["--seed", "2", "eval", "holdout", "--train", pipeline["corpus"],
                 "--test", pipeline["corpus"], "--partition", PARTITION,
                 "--trees", "10", "--out", out])
    assert code == 0
    report = json.loads(open(out).read())
    assert set(report) == {"monolithic", "esc"}
    assert "ci" in report["esc"]


def test_adapt_writes_curve(pipeline, tmp_path):
    # a small new-domain corpus for one fresh class
    from botforest.accounts import write_corpus
    from botforest.synthgen import BOT_PROFILES, SynthConfig, generate_dataset

    hold = generate_dataset(SynthConfig(
        profiles=((BOT_PROFILES["astroturf"], 40),), humans_count=40,
        seed=31, dataset_tag="synth-holdout", overlap=0.25))
    hold_path = str(tmp_path / "new.jsonl")
    write_corpus(hold, hold_path)
    curve = str(tmp_path / "curve.csv")
    code = main(["--seed", "2", "adapt", "--model", pipeline["model"],
                 "--new-data", hold_path, "--class-name", "astroturf2",
                 "--step", "20", "--budget", "60", "--out-curve", curve])
    assert code == 0
    lines = open(curve).read().splitlines()
    assert lines[0] == "n_added,f1"
    assert len(lines) == 5  # 0, 20, 40, 60


def test_features_list(capsys):
    assert main(["features", "list"]) == 0
    registry = json.loads(capsys.readouterr().out)
    assert len(registry["features"]) == 44
    assert registry["features"][0]["index"] == 0
