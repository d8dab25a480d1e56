# Copyright (C) 2026 attr-forge contributors
# SPDX-License-Identifier: Apache-2.0

import os
import shutil
from pathlib import Path

import pytest

import attrforge


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("ATTRFORGE_CLI") or shutil.which("attrforge")
    if not path:
        pytest.skip("attrforge executable not found (set ATTRFORGE_CLI)")
    return path


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    """Small toy set, a trained classifier and a generated suite."""
    root = tmp_path_factory.mktemp("toy")
    lst, backgrounds = attrforge.toy(root / "data", count=12, backgrounds=6, seed=5, classes=2)
    clf = root / "clf.bin"
    attrforge.train(lst, clf, epochs=60)
    out = root / "suite"
    overrides = [f"io.output={out}", f"denoiser.dataset={backgrounds}",
                 "schedule.T=20", "guidance.t0_background=10", "guidance.t0_object=5"]
    summary = attrforge.generate(lst, classifier=clf, overrides=overrides)
    return {"root": root, "list": Path(lst), "backgrounds": Path(backgrounds),
            "classifier": clf, "overrides": overrides, "summary": summary}
