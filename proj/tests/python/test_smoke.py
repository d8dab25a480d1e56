# Copyright (C) 2026 attr-forge contributors
# SPDX-License-Identifier: Apache-2.0

import json
import math
import subprocess

import jsonschema
import numpy as np
import pytest

import attrforge


def test_alpha_bars_are_cumulative_products():
    betas = np.linspace(1e-4, 0.02, 50)
    expected = np.concatenate([[1.0], np.cumprod(1.0 - betas)])
    np.testing.assert_allclose(attrforge.alpha_bars(50), expected, rtol=1e-12)


def test_energy_score_is_logsumexp():
    logits = [0.3, -1.2, 2.0]
    assert attrforge.energy_score(logits) == pytest.approx(
        math.log(sum(math.exp(v) for v in logits)), rel=1e-12)
    assert attrforge.energy_score([0.0, 0.0]) == pytest.approx(math.log(2.0))


def test_gradnorm_equal_logits_is_zero():
    assert attrforge.gradnorm_from_head([0.0, 0.0], [1.0, 0.0]) == 0.0
    # p = (3/4, 1/4): sum |p - 1/2| = 1/2, sum |phi| = 1
    assert attrforge.gradnorm_from_head([math.log(3.0), 0.0], [1.0]) == pytest.approx(0.5)


def test_glcm_checkerboard_contrast():
    board = np.indices((8, 8)).sum(axis=0) % 2 * 2.0 - 1.0
    tex = attrforge.glcm_texture(board[:, :, None], levels=2)
    assert tex["contrast"] == pytest.approx(1.0)


def test_complexity_gradient_matches_finite_difference():
    rng = np.random.default_rng(3)
    image = rng.uniform(-1, 1, size=(8, 8, 1))
    grad = attrforge.complexity_gradient(image)
    h = 1e-6
    for (y, x) in [(0, 0), (3, 5), (7, 2)]:
        up, dn = image.copy(), image.copy()
        up[y, x, 0] += h
        dn[y, x, 0] -= h
        fd = (attrforge.complexity(up) - attrforge.complexity(dn)) / (2 * h)
        assert grad[y, x, 0] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_frechet_axioms():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(200, 3)).tolist()
    b = (rng.normal(size=(200, 3)) + 0.5).tolist()
    assert attrforge.frechet_distance(a, a) == pytest.approx(0.0, abs=1e-9)
    assert attrforge.frechet_distance(a, b) == pytest.approx(
        attrforge.frechet_distance(b, a), rel=1e-9)


def test_dropped_accuracy():
    assert attrforge.dropped_accuracy(0.9, 0.8) == pytest.approx(0.1)


def test_config_validation_raises():
    with pytest.raises(attrforge.AttrForgeError) as info:
        attrforge.config(overrides=["guidance.lambda=nan"])
    assert attrforge.error_kind(str(info.value)) == "Validation"
    assert attrforge.config(overrides=["schedule.T=60"])["steps"] == 60


def test_image_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    image = rng.integers(0, 256, size=(5, 7, 3)) / 127.5 - 1.0
    attrforge.write_image(tmp_path / "a.png", image)
    np.testing.assert_allclose(attrforge.read_image(tmp_path / "a.png"), image, atol=1e-12)


def test_generate_writes_schema_valid_manifest(dataset):
    s = dataset["summary"]
    assert s["entries"] == 12 and s["failed"] == 0
    assert s["written"] == 12 * len(attrforge.suite_variants())
    manifest = json.loads(s["manifest"].read_text())
    jsonschema.validate(manifest, attrforge.schema("manifest"))


def test_generate_rerun_keeps_files(dataset):
    again = attrforge.generate(dataset["list"], classifier=dataset["classifier"],
                               overrides=dataset["overrides"])
    assert again["written"] == 0


def test_evaluate_report(dataset):
    report = attrforge.evaluate(dataset["summary"]["manifest"], dataset["classifier"],
                                overrides=dataset["overrides"])
    jsonschema.validate(report, attrforge.schema("report"))
    names = [row["name"] for row in report["variants"]]
    assert names[1:] == attrforge.suite_variants()


def test_metrics_summary(dataset):
    summary = attrforge.metrics(dataset["summary"]["manifest"],
                                classifier=dataset["classifier"],
                                overrides=dataset["overrides"])
    assert "variants" in summary


def test_edit_returns_written_image(dataset, tmp_path):
    data = dataset["list"].parent
    spec = {"kind": "size", "size_mode": "scale", "scale": 1.2, "t0": 5}
    out = attrforge.edit(data / "images/scene_0000.png", data / "masks/scene_0000.png", spec,
                         tmp_path / "e.png", overrides=dataset["overrides"])
    assert out.shape == (32, 32, 3)
    assert np.all(np.abs(out) <= 1.0)
    sidecar = json.loads((tmp_path / "e.png.json").read_text())
    jsonschema.validate(sidecar["spec"], attrforge.schema("edit-spec"))


def test_cli_invalid_lambda_exits_2_without_output(cli, dataset, tmp_path):
    data = dataset["list"].parent
    out = tmp_path / "x.png"
    r = subprocess.run([cli, "edit", "--image", str(data / "images/scene_0000.png"),
                        "--mask", str(data / "masks/scene_0000.png"), "--kind", "background",
                        "--lambda", "nan", "-o", str(out)], capture_output=True, text=True)
    assert r.returncode == 2
    assert not out.exists()


def test_cli_missing_input_exits_3(cli, tmp_path):
    r = subprocess.run([cli, "edit", "--image", str(tmp_path / "missing.png"),
                        "--mask", str(tmp_path / "missing_mask.png"), "--kind", "background",
                        "-o", str(tmp_path / "y.png")], capture_output=True, text=True)
    assert r.returncode == 3


def test_cli_schema_is_json(cli):
    r = subprocess.run([cli, "schema", "all"], capture_output=True, text=True, check=True)
    doc = json.loads(r.stdout)
    assert set(doc) == {"manifest", "edit-spec", "report"}
    jsonschema.Draft202012Validator.check_schema(doc["manifest"])
