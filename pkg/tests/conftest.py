import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import linear_labels, save_png, synth_feature_dataset  # noqa: E402


@pytest.fixture(scope="session")
def synth_dataset(tmp_path_factory):
    """The 200-pair synthetic regression dataset shared by the end-to-end
    tests: images on disk, a labeled manifest, and the true feature matrix."""
    n = 200
    pairs, feats = synth_feature_dataset(n, seed=5000)
    labels, clean = linear_labels(feats, np.random.default_rng(424242))

    root = tmp_path_factory.mktemp("synthset")
    lines = ["id,original,enhanced,mos"]
    for i, (orig, enh) in enumerate(pairs):
        orig_path = root / ("orig_%03d.png" % i)
        enh_path = root / ("enh_%03d.png" % i)
        save_png(orig, orig_path)
        save_png(enh, enh_path)
        lines.append("p%03d,%s,%s,%r" % (i, orig_path, enh_path, float(labels[i])))
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")

    return {
        "n": n,
        "pairs": pairs,
        "features": feats,
        "labels": labels,
        "clean": clean,
        "manifest": manifest,
        "root": root,
    }
