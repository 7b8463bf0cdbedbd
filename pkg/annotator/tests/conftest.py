"""Fixtures: small deterministic image folders."""

from __future__ import annotations

import pytest
from PIL import Image


def write_images(folder, names, size=(64, 48)):
    folder.mkdir(parents=True, exist_ok=True)
    for i, name in enumerate(names):
        img = Image.new("RGB", size, color=((i * 40) % 256, 100, 50))
        img.save(folder / name)
    return folder


@pytest.fixture
def image_dir(tmp_path):
    names = [f"MJ-p1-{i:04d}.png" for i in range(3)] + [
        "DALLE-p1-0000.png",
        "DALLE-p2-0000.png",
    ]
    return write_images(tmp_path / "images", names)
