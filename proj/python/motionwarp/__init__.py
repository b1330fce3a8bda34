# Copyright (C) 2026 The motionwarp Authors
# SPDX-License-Identifier: Apache-2.0
"""Python front end for the motionwarp C++ core.

Array helpers are re-exported unchanged. Functions that return JSON text in
the extension return parsed dicts here.
"""

import json as _json

from . import _core
from ._core import (
    MotionwarpError,
    anchor_schedule,
    attention_weights,
    compose_next_frame,
    direction_delta,
    directions,
    fuse,
    iou,
    mask_center,
    motion_correctness,
    shift_latent,
    shift_mask,
)

__all__ = [
    "MotionwarpError",
    "anchor_schedule",
    "attention_weights",
    "compose_next_frame",
    "default_config",
    "direction_delta",
    "directions",
    "edit",
    "evaluate",
    "fuse",
    "generate",
    "iou",
    "mask_center",
    "motion_correctness",
    "parse_motion_plan",
    "shift_latent",
    "shift_mask",
    "skeleton",
]


def _dump(obj):
    return "" if obj is None else _json.dumps(obj)


def default_config():
    return _json.loads(_core.default_config())


def parse_motion_plan(text, frame_count=8):
    return _json.loads(_core.parse_motion_plan(text, frame_count))


def generate(prompt="", out_dir="", config=None, plan=None, slices=(), camera=""):
    """Run generation; returns the report. Nothing is written when out_dir is empty."""
    return _json.loads(_core.generate(prompt, str(out_dir), _dump(config), _dump(plan), list(slices), camera))


def edit(base_dir, out_dir, prompt, foreground=False, config=None):
    """Re-render a generated clip; returns the number of frames written."""
    return _core.edit(str(base_dir), str(out_dir), prompt, foreground, _dump(config))


def evaluate(mask_dir, plan_path, sigma=32):
    return _json.loads(_core.evaluate(str(mask_dir), str(plan_path), sigma))


def skeleton(prompt, out_dir, config=None):
    return _core.skeleton(prompt, str(out_dir), _dump(config))
