import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from synth import bt500_ratings, linear_labels, save_png, synth_pair
from uif.cli import main
from uif.features import FEATURE_NAMES
from uif.svr import load_model


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    """12 labeled pairs on disk, enough to train and score."""
    root = tmp_path_factory.mktemp("cli_data")
    feats = []
    pairs = []
    from uif.features import extract_features

    for i in range(12):
        rng = np.random.default_rng(9000 + i)
        orig, enh = synth_pair(rng, h=96, w=96, dial=(i % 6) / 5.0)
        save_png(orig, root / ("o%02d.png" % i))
        save_png(enh, root / ("e%02d.png" % i))
        pairs.append((orig, enh))
        feats.append(extract_features(orig, enh))
    labels, _ = linear_labels(np.array(feats), np.random.default_rng(1))
    lines = ["id,original,enhanced,mos"]
    for i in range(12):
        lines.append("p%02d,%s,%s,%.4f" % (i, root / ("o%02d.png" % i), root / ("e%02d.png" % i), labels[i]))
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")

    nomos = root / "manifest_nomos.csv"
    nomos.write_text(
        "\n".join(line.rsplit(",", 1)[0] for line in lines) + "\n", encoding="utf-8"
    )
    return {"root": root, "manifest": manifest, "manifest_nomos": nomos}


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_extract_writes_rows(small_dataset, tmp_path):
    out = tmp_path / "features.csv"
    code = main(["extract", "--manifest", str(small_dataset["manifest"]), "--out", str(out)])
    assert code == 0
    rows = _read_csv(out)
    assert rows[0] == list(FEATURE_NAMES) + ["mos"]
    assert len(rows) == 13


def test_extract_skips_unreadable_pair(small_dataset, tmp_path, capsys):
    bad = tmp_path / "bad_manifest.csv"
    lines = small_dataset["manifest"].read_text().splitlines()
    lines.insert(1, "broken,/nonexistent/a.png,/nonexistent/b.png,50.0")
    bad.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out = tmp_path / "features.csv"
    code = main(["extract", "--manifest", str(bad), "--out", str(out)])
    assert code == 2
    assert len(_read_csv(out)) == 13  # header + 12 good rows
    assert "skipped broken" in capsys.readouterr().err


def test_extract_empty_manifest(tmp_path):
    man = tmp_path / "empty.csv"
    man.write_text("id,original,enhanced\n", encoding="utf-8")
    out = tmp_path / "f.csv"
    assert main(["extract", "--manifest", str(man), "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows == [list(FEATURE_NAMES)]


def test_extract_directory_mode(small_dataset, tmp_path):
    root = small_dataset["root"]
    odir = tmp_path / "orig"
    edir = tmp_path / "enh"
    odir.mkdir()
    edir.mkdir()
    for i in range(3):
        (odir / ("img%d.png" % i)).write_bytes((root / ("o%02d.png" % i)).read_bytes())
        (edir / ("img%d.png" % i)).write_bytes((root / ("e%02d.png" % i)).read_bytes())
    out = tmp_path / "f.csv"
    code = main(["extract", "--original-dir", str(odir), "--enhanced-dir", str(edir), "--out", str(out)])
    assert code == 0
    assert len(_read_csv(out)) == 4


def test_train_and_score_roundtrip(small_dataset, tmp_path, capsys):
    model_path = tmp_path / "m.uifmodel"
    code = main(["train", "--manifest", str(small_dataset["manifest"]), "--out", str(model_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert model_path.exists()
    assert "train_srcc=" in out and "train_plcc=" in out

    model = load_model(model_path)
    assert model.params.c == 0.1
    assert model.params.epsilon == 0.01
    assert model.gamma == 1.0

    root = small_dataset["root"]
    code = main(["score", "--model", str(model_path), "--original", str(root / "o00.png"), "--enhanced", str(root / "e00.png")])
    printed = capsys.readouterr().out.strip()
    assert code == 0
    float(printed)
    assert len(printed.split(".")[-1]) == 4


def test_train_missing_mos_column_is_usage_error(small_dataset, tmp_path):
    code = main(["train", "--manifest", str(small_dataset["manifest_nomos"]), "--out", str(tmp_path / "m.uifmodel")])
    assert code == 64


def test_score_missing_model_exits_66(small_dataset):
    root = small_dataset["root"]
    code = main(["score", "--model", str(root / "absent.uifmodel"), "--original", str(root / "o00.png"), "--enhanced", str(root / "e00.png")])
    assert code == 66


def test_score_mismatched_sizes_exits_65(small_dataset, tmp_path, capsys):
    root = small_dataset["root"]
    model_path = tmp_path / "m.uifmodel"
    assert main(["train", "--manifest", str(small_dataset["manifest"]), "--out", str(model_path)]) == 0
    capsys.readouterr()

    rng = np.random.default_rng(0)
    orig, _ = synth_pair(rng, h=64, w=80)
    save_png(orig, tmp_path / "other.png")
    code = main(["score", "--model", str(model_path), "--original", str(tmp_path / "other.png"), "--enhanced", str(root / "e00.png")])
    assert code == 65


def test_evaluate_small_run(small_dataset, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main([
        "evaluate", "--manifest", str(small_dataset["manifest"]),
        "--k", "3", "--seed", "7", "--out", str(out),
        "-C", "10", "--gamma", "0.1",
    ])
    assert code == 0
    table = capsys.readouterr().out
    assert "pooled" in table
    report = json.loads(out.read_text())
    assert report["k"] == 3
    assert report["method"] == 7
    assert -1.0 <= report["pooled_srcc"] <= 1.0
    assert len(report["per_fold"]) == 3


def test_evaluate_k_one_is_usage_error(small_dataset):
    assert main(["evaluate", "--manifest", str(small_dataset["manifest"]), "--k", "1"]) == 64


def test_evaluate_mask_method_label(small_dataset, tmp_path):
    out = tmp_path / "r.json"
    code = main([
        "evaluate", "--manifest", str(small_dataset["manifest"]),
        "--k", "3", "--mask", "naturalness", "--out", str(out),
    ])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["method"] == 1
    assert report["method_label"] == "only naturalness"


def test_evaluate_bad_mask_is_usage_error(small_dataset):
    assert main(["evaluate", "--manifest", str(small_dataset["manifest"]), "--mask", "nonsense"]) == 64


def test_mos_identical_subjects(tmp_path, capsys):
    path = tmp_path / "r.csv"
    header = "subject," + ",".join("img%d" % j for j in range(10))
    row = ",".join("3" for _ in range(10))
    lines = [header] + ["s%d,%s" % (i, row) for i in range(5)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out = tmp_path / "mos.csv"
    code = main(["mos", "--ratings", str(path), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "mean_ncc=1.0000" in captured.out
    rows = _read_csv(out)
    assert rows[0] == ["id", "mos", "n_valid"]
    assert all(float(r[1]) == 50.0 for r in rows[1:])


def test_mos_rejects_planted_subject(tmp_path, capsys):
    rng = np.random.default_rng(55)
    scores = bt500_ratings(rng, n_subjects=16, n_images=100, aberrant={3})
    header = "subject," + ",".join("img%d" % j for j in range(100))
    lines = [header]
    for i in range(16):
        lines.append("rater%02d," % i + ",".join("%g" % v for v in scores[i]))
    path = tmp_path / "r.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code = main(["mos", "--ratings", str(path), "--out", str(tmp_path / "mos.csv")])
    captured = capsys.readouterr()
    assert code == 0
    assert "rejected subject rater03" in captured.err


def test_mos_empty_csv_is_usage_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    assert main(["mos", "--ratings", str(path), "--out", str(tmp_path / "m.csv")]) == 64


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "extract" in capsys.readouterr().out
    for sub in ("extract", "train", "score", "evaluate", "mos"):
        assert main([sub, "--help"]) == 0
        assert capsys.readouterr().out


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 64


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "uif.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "extract" in proc.stdout
    proc = subprocess.run(["uif", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("uif ")
