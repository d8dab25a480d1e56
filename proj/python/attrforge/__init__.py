# Copyright (C) 2026 attr-forge contributors
# SPDX-License-Identifier: Apache-2.0
"""Attribute editing and evaluation for image classifiers.

Images cross the boundary as float64 arrays of shape (H, W, C) in [-1, 1].
JSON documents (edit specs, reports, schemas) cross as plain dicts.
"""

from ._attrforge import (
    AttrForgeError,
    alpha_bars,
    complexity,
    complexity_gradient,
    config,
    dropped_accuracy,
    edit,
    energy_score,
    error_kind,
    evaluate,
    frechet_distance,
    generate,
    glcm_texture,
    gradnorm_from_head,
    metrics,
    predict,
    read_image,
    schema,
    score_overlap,
    suite_variants,
    toy,
    train,
    write_image,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
