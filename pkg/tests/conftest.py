"""Shared fixtures: synthetic bar images and a small on-disk dataset."""

import json
import math

import numpy as np
import pytest

from bcosfire.imgio import save_binary, save_gray_u8


def draw_bar(shape, angle_deg, width, center=None, lo=0.2, hi=1.0, half=False):
    """Dark bar on a bright background, drawn analytically.

    The bar axis runs through `center` at `angle_deg` (measured like the
    filter angles: 90 is straight up the image). The edge fades over one
    pixel so rotated bars do not alias. With half=True only the side of the
    center the axis direction points to is drawn.
    """
    h, w = shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    if center is not None:
        cx, cy = center
    theta = math.radians(angle_deg)
    rr, cc = np.mgrid[0:h, 0:w].astype(np.float64)
    px = cc - cx
    py = rr - cy
    dist = np.abs(px * math.sin(theta) + py * math.cos(theta))
    cover = np.clip(width / 2.0 + 0.5 - dist, 0.0, 1.0)
    if half:
        along = px * math.cos(theta) - py * math.sin(theta)
        cover[along < 0.0] = 0.0
    return hi - (hi - lo) * cover


def bar_mask(shape, angle_deg, width, center=None):
    """Binary ground truth for draw_bar: pixels within width/2 of the axis."""
    h, w = shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    if center is not None:
        cx, cy = center
    theta = math.radians(angle_deg)
    rr, cc = np.mgrid[0:h, 0:w].astype(np.float64)
    dist = np.abs((cc - cx) * math.sin(theta) + (rr - cy) * math.cos(theta))
    return dist <= width / 2.0


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory):
    """Four noisy bar images with ground truth, manifest, and a small search space."""
    root = tmp_path_factory.mktemp("toy")
    rng = np.random.default_rng(20240817)
    shape = (48, 48)
    entries = []
    for i, angle in enumerate((90.0, 0.0, 45.0, 135.0)):
        clean = draw_bar(shape, angle, width=3.0)
        noisy = np.clip(clean + rng.normal(0.0, 0.04, shape), 0.0, 1.0)
        save_gray_u8(root / f"img{i}.png", noisy * 255.0)
        save_binary(root / f"gt{i}.png", bar_mask(shape, angle, width=3.0))
        save_binary(root / f"fov{i}.png", np.ones(shape, dtype=bool))
        entries.append({
            "name": f"img{i}",
            "image": f"img{i}.png",
            "gt": f"gt{i}.png",
            "fov": f"fov{i}.png",
        })
    manifest = root / "manifest.json"
    manifest.write_text(json.dumps({"name": "toy", "entries": entries}, indent=1))
    space = root / "space.json"
    space.write_text(json.dumps({
        "sigma": [1.6, 2.2],
        "rho_max": [4.0],
        "sigma0": [1.0],
        "alpha": [0.2],
        "asymmetric": {"sigma": [2.0], "rho_max": [4.0]},
    }))
    return {"root": root, "manifest": manifest, "space": space,
            "names": [e["name"] for e in entries]}
