import csv

import numpy as np
import pytest

from synth import random_rgb_image, synth_pair
from uif.errors import InsufficientData
from uif.features import (
    FEATURE_NAMES,
    FeatureScaler,
    extract_features,
    read_features_csv,
    write_features_csv,
)
from uif.naturalness import naturalness_features
from uif.sharpness import sharpness_features
from uif.structure import structure_features


def test_vector_is_concatenation_of_module_outputs():
    rng = np.random.default_rng(0)
    orig, enh = synth_pair(rng)
    vec = extract_features(orig, enh)
    parts = {}
    parts.update(naturalness_features(enh))
    parts.update(sharpness_features(enh))
    parts.update(structure_features(enh, orig))
    expected = np.array([parts[name] for name in FEATURE_NAMES])
    assert np.array_equal(vec, expected)


def test_identical_pair_structure_tail():
    img = random_rgb_image(np.random.default_rng(1))
    vec = extract_features(img, img)
    assert tuple(vec[8:]) == (1.0, 1.0, 1.0)


def test_extract_deterministic():
    rng = np.random.default_rng(2)
    orig, enh = synth_pair(rng)
    v1 = extract_features(orig, enh)
    v2 = extract_features(orig, enh)
    assert np.array_equal(v1, v2)


def test_vector_length_and_finiteness():
    rng = np.random.default_rng(3)
    orig, enh = synth_pair(rng)
    vec = extract_features(orig, enh)
    assert vec.shape == (11,)
    assert np.all(np.isfinite(vec))


def test_scaler_two_vectors_map_to_endpoints():
    a = np.zeros(11)
    b = np.zeros(11)
    b[4] = 2.0
    scaler = FeatureScaler.fit([a, b])
    assert scaler.transform(a)[4] == -1.0
    assert scaler.transform(b)[4] == 1.0


def test_scaler_constant_feature_maps_to_zero():
    vecs = np.ones((5, 11)) * 3.5
    scaler = FeatureScaler.fit(vecs)
    assert np.all(scaler.transform(vecs[0]) == 0.0)


def test_scaler_training_data_within_bounds():
    rng = np.random.default_rng(4)
    mat = rng.normal(size=(40, 11)) * 100
    scaler = FeatureScaler.fit(mat)
    scaled = scaler.transform(mat)
    assert scaled.min() >= -1.0 - 1e-12
    assert scaled.max() <= 1.0 + 1e-12


def test_scaler_roundtrip_identity():
    rng = np.random.default_rng(5)
    mat = rng.normal(size=(30, 11)) * 50
    scaler = FeatureScaler.fit(mat)
    probe = rng.normal(size=11) * 50
    back = scaler.inverse(scaler.transform(probe))
    assert np.allclose(back, probe, atol=1e-12, rtol=0)


def test_scaler_extrapolates_out_of_range():
    mat = np.vstack([np.zeros(11), np.ones(11)])
    scaler = FeatureScaler.fit(mat)
    assert np.all(scaler.transform(np.full(11, 2.0)) == 3.0)
    assert np.all(scaler.transform(np.full(11, -1.0)) == -3.0)


def test_scaler_identity_when_range_is_unit():
    mat = np.vstack([np.full(11, -1.0), np.ones(11)])
    scaler = FeatureScaler.fit(mat)
    probe = np.linspace(-1, 1, 11)
    assert np.allclose(scaler.transform(probe), probe, atol=1e-15)


def test_scaler_needs_two_vectors():
    with pytest.raises(InsufficientData):
        FeatureScaler.fit([np.zeros(11)])


def test_csv_golden_header(tmp_path):
    path = tmp_path / "f.csv"
    write_features_csv(path, [np.arange(11.0)])
    with open(path, newline="") as f:
        header = next(csv.reader(f))
    assert header == [
        "nu",
        "sigma2",
        "c_cie",
        "sigma_cie",
        "mu_dark",
        "contrast",
        "edge_contrast",
        "entropy",
        "s_sigma",
        "s_mu",
        "s_ibar",
    ]


def test_csv_roundtrip_with_mos(tmp_path):
    rng = np.random.default_rng(6)
    vecs = rng.normal(size=(7, 11))
    mos = rng.uniform(20, 80, size=7)
    path = tmp_path / "fm.csv"
    write_features_csv(path, vecs, mos=mos)
    back, labels = read_features_csv(path)
    assert np.array_equal(back, vecs)
    assert np.array_equal(labels, mos)


def test_csv_roundtrip_without_mos(tmp_path):
    rng = np.random.default_rng(7)
    vecs = rng.normal(size=(3, 11))
    path = tmp_path / "f0.csv"
    write_features_csv(path, vecs)
    back, labels = read_features_csv(path)
    assert np.array_equal(back, vecs)
    assert labels is None
