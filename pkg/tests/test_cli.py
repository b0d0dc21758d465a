import json
import os

import numpy as np
import pytest

from ncage.cli import main
from ncage.checkpoint import load as load_checkpoint


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def graph_file(tmp_path):
    path = tmp_path / "g.edges"
    assert run("generate", "--topology", "sf", "--n", "30", "--seed", "3",
               "--out", str(path)) == 0
    return path


@pytest.fixture()
def trained_model(tmp_path):
    path = tmp_path / "model.ckpt"
    assert run("train", "--model", "s2v", "--centrality", "degree",
               "--steps", "200", "--batch-size", "64", "--embed-dim", "8",
               "--num-graphs", "3", "--min-nodes", "15", "--max-nodes", "25",
               "--out", str(path)) == 0
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--version")
    assert exc.value.code == 0
    assert "ncage" in capsys.readouterr().out


def test_no_command_is_usage_error():
    assert run() == 1


def test_unknown_flag_is_usage_error():
    assert run("generate", "--topology", "sf", "--n", "10", "--frobnicate") == 1


def test_generate_single(graph_file):
    text = graph_file.read_text()
    assert len(text.strip().split("\n")) > 10


def test_generate_needs_exactly_one_target(tmp_path):
    assert run("generate", "--topology", "sf", "--n", "10") == 1
    assert run("generate", "--topology", "sf", "--n", "10",
               "--out", str(tmp_path / "a"), "--out-dir", str(tmp_path)) == 1


def test_generate_corpus_manifest_idempotent(tmp_path):
    out = tmp_path / "corpus"
    args = ("generate", "--topology", "sf", "--count", "3", "--seed", "5",
            "--min-nodes", "12", "--max-nodes", "20", "--out-dir", str(out))
    assert run(*args) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["count"] == 3
    assert len(manifest["files"]) == 3
    for entry in manifest["files"]:
        assert (out / entry["name"]).exists()
        assert len(entry["sha256"]) == 64
    # second run verifies instead of rewriting
    before = (out / "manifest.json").read_bytes()
    assert run(*args) == 0
    assert (out / "manifest.json").read_bytes() == before


def test_generate_corpus_detects_drift(tmp_path):
    out = tmp_path / "corpus"
    args = ("generate", "--topology", "sf", "--count", "2", "--seed", "5",
            "--min-nodes", "12", "--max-nodes", "20", "--out-dir", str(out))
    assert run(*args) == 0
    # a different seed produces a different corpus; the manifest must object
    drifted = ("generate", "--topology", "sf", "--count", "2", "--seed", "6",
               "--min-nodes", "12", "--max-nodes", "20", "--out-dir", str(out))
    assert run(*drifted) == 2


def test_centrality_csv(tmp_path, graph_file):
    out = tmp_path / "c.csv"
    assert run("centrality", "--kind", "degree", "--in", str(graph_file),
               "--out", str(out)) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "node,value"
    assert len(lines) == 31
    out2 = tmp_path / "r.csv"
    assert run("centrality", "--kind", "degree", "--in", str(graph_file),
               "--out", str(out2), "--ranks") == 0
    ranks = [float(l.split(",")[1]) for l in out2.read_text().strip().split("\n")[1:]]
    assert min(ranks) >= 0.0 and max(ranks) <= 1.0


def test_centrality_missing_file(tmp_path):
    assert run("centrality", "--kind", "degree", "--in", str(tmp_path / "nope"),
               "--out", str(tmp_path / "c.csv")) == 2


def test_centrality_bad_edge_list(tmp_path):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\n2\n")
    assert run("centrality", "--kind", "degree", "--in", str(bad),
               "--out", str(tmp_path / "c.csv")) == 2


def test_closeness_on_disconnected_graph(tmp_path):
    path = tmp_path / "two.edges"
    path.write_text("0 1\n2 3\n")
    out = tmp_path / "c.csv"
    assert run("centrality", "--kind", "closeness", "--in", str(path),
               "--out", str(out)) == 2
    assert run("centrality", "--kind", "closeness", "--in", str(path),
               "--out", str(out), "--largest-component") == 0
    assert len(out.read_text().strip().split("\n")) == 3


def test_train_predict_evaluate_pipeline(tmp_path, trained_model, graph_file):
    ckpt = load_checkpoint(trained_model)
    assert ckpt.model_kind == "s2v" and ckpt.step == 200

    scores = tmp_path / "scores.csv"
    assert run("predict", "--model-file", str(trained_model),
               "--in", str(graph_file), "--out", str(scores)) == 0
    lines = scores.read_text().strip().split("\n")
    assert lines[0] == "node,score"
    assert len(lines) == 31

    report = tmp_path / "report.csv"
    assert run("evaluate", "--model-file", str(trained_model),
               "--sets", "sf", "--count", "2", "--min-nodes", "15",
               "--max-nodes", "25", "--out", str(report)) == 0
    rows = report.read_text().strip().split("\n")
    assert rows[0].startswith("set,topology,graph_id")
    assert len(rows) == 3


def test_evaluate_tau_floor_exit(tmp_path, trained_model):
    # an untrained-quality model cannot hit a floor of 0.999
    assert run("evaluate", "--model-file", str(trained_model),
               "--sets", "sf", "--count", "2", "--min-nodes", "15",
               "--max-nodes", "25", "--tau-floor", "0.999") == 3


def test_evaluate_kind_mismatch(tmp_path, trained_model):
    args = ("evaluate", "--model-file", str(trained_model),
            "--centrality", "closeness", "--sets", "sf", "--count", "1",
            "--min-nodes", "15", "--max-nodes", "25")
    assert run(*args) == 2
    assert run(*args, "--allow-kind-mismatch") == 0


def test_evaluate_unknown_set(trained_model):
    assert run("evaluate", "--model-file", str(trained_model),
               "--sets", "sf,lattice") == 1


def test_evaluate_missing_model(tmp_path):
    assert run("evaluate", "--model-file", str(tmp_path / "nope.ckpt")) == 2


def test_bench_ladder(tmp_path, trained_model):
    out = tmp_path / "bench.csv"
    assert run("bench", "--model-file", str(trained_model),
               "--edges", "100,200", "--repeats", "1", "--out", str(out)) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "edges,infer_s"
    assert len(lines) == 3
    assert run("bench", "--model-file", str(trained_model), "--edges", "ten") == 1


def test_train_resume_flag(tmp_path):
    ckdir = tmp_path / "ck"
    final1 = tmp_path / "m1.ckpt"
    base = ("train", "--model", "s2v", "--centrality", "degree",
            "--steps", "300", "--batch-size", "64", "--embed-dim", "8",
            "--num-graphs", "3", "--min-nodes", "15", "--max-nodes", "25")
    assert run(*base, "--checkpoint-interval", "128",
               "--checkpoint-dir", str(ckdir), "--out", str(final1)) == 0
    mids = sorted(os.listdir(ckdir))
    assert mids
    final2 = tmp_path / "m2.ckpt"
    assert run(*base, "--checkpoint-interval", "128",
               "--resume", str(ckdir / mids[0]), "--out", str(final2)) == 0
    a, b = load_checkpoint(final1), load_checkpoint(final2)
    for name in a.weights:
        assert np.array_equal(a.weights[name], b.weights[name])


def test_train_rejects_bad_arch(tmp_path):
    assert run("train", "--model", "baseline", "--centrality", "degree",
               "--steps", "10", "--embed-dim", "8",
               "--out", str(tmp_path / "m.ckpt")) == 1


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# corpus\ntopology=sf\nn=12\nseed=9\n")
    out = tmp_path / "g.edges"
    assert run("generate", "--topology", "sf", "--n", "12", "--seed", "9",
               "--out", str(out)) == 0
    want = out.read_text()
    out2 = tmp_path / "g2.edges"
    assert run("generate", "--topology", "sf", "--config", str(cfg),
               "--n", "12", "--out", str(out2)) == 0
    assert out2.read_text() == want


def test_config_file_cli_wins(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=9\nn=50\n")
    out = tmp_path / "g.edges"
    # explicit --n must beat the file's n=50
    assert run("generate", "--topology", "sf", "--config", str(cfg),
               "--n", "12", "--out", str(out)) == 0
    nodes = {int(t) for line in out.read_text().split("\n") if line
             for t in line.split()}
    assert max(nodes) < 12


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("volume=11\n")
    assert run("generate", "--topology", "sf", "--n", "10", "--config", str(cfg),
               "--out", str(tmp_path / "g.edges")) == 1


def test_config_file_bad_value(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=loud\n")
    assert run("generate", "--topology", "sf", "--n", "10", "--config", str(cfg),
               "--out", str(tmp_path / "g.edges")) == 1


def test_config_file_missing(tmp_path):
    assert run("generate", "--topology", "sf", "--n", "10",
               "--config", str(tmp_path / "nope.cfg"),
               "--out", str(tmp_path / "g.edges")) == 1


def test_config_env_var(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=9\n")
    monkeypatch.setenv("NCAGE_CONFIG", str(cfg))
    out = tmp_path / "g.edges"
    assert run("generate", "--topology", "sf", "--n", "12",
               "--out", str(out)) == 0
    want = tmp_path / "want.edges"
    monkeypatch.delenv("NCAGE_CONFIG")
    assert run("generate", "--topology", "sf", "--n", "12", "--seed", "9",
               "--out", str(want)) == 0
    assert out.read_text() == want.read_text()


def test_generate_sw_and_rnd(tmp_path):
    assert run("generate", "--topology", "sw", "--n", "20", "--k", "4",
               "--p", "0.1", "--out", str(tmp_path / "sw.edges")) == 0
    assert run("generate", "--topology", "rnd", "--n", "20", "--p", "0.3",
               "--seed", "1", "--largest-component",
               "--out", str(tmp_path / "rnd.edges")) == 0
