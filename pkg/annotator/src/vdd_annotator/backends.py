"""Inference backends: a deterministic mock for CI and a TorchScript adapter.

Both emit raw model outputs: unfiltered detection confidences and age as a
(min, max) range. Thresholding and age averaging belong to the engine, so
the numeric contract lives in one place.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

from PIL import Image

log = logging.getLogger(__name__)


class Backend(Protocol):
    def annotate_image(self, path: Path) -> dict:
        """Return the per-image payload: width, height, detections,
        sentiment, sentiment_grid. Raises on undecodable input."""


def _image_size(path: Path) -> tuple[int, int]:
    with Image.open(path) as img:
        img.load()
        return img.width, img.height


def _clamp01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True)
class MockBackend:
    """Synthesizes plausible annotations as a pure function of
    (filename, seed); reruns are byte-identical. No model downloads."""

    seed: int = 0

    def annotate_image(self, path: Path) -> dict:
        width, height = _image_size(path)
        digest = hashlib.sha256(f"{self.seed}:{path.name}".encode()).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))

        detections = []
        for _ in range(rng.randint(0, 6)):
            x0 = round(rng.uniform(0, width * 0.7), 2)
            y0 = round(rng.uniform(0, height * 0.7), 2)
            x1 = round(x0 + rng.uniform(1, width * 0.3 + 1), 2)
            y1 = round(y0 + rng.uniform(1, height * 0.3 + 1), 2)
            age_min = rng.randint(0, 75)
            detections.append(
                {
                    "bbox": [x0, y0, x1, y1],
                    "confidence": round(rng.uniform(0.3, 1.0), 6),
                    "gender": rng.choice(["female", "male"]),
                    "gender_confidence": round(rng.uniform(0.5, 1.0), 4),
                    "age_min": age_min,
                    "age_max": age_min + rng.randint(0, 24),
                }
            )
        return {
            "width": width,
            "height": height,
            "detections": detections,
            "sentiment": round(rng.random(), 6),
            "sentiment_grid": [
                [round(rng.random(), 6) for _ in range(8)] for _ in range(8)
            ],
        }


@dataclass(frozen=True)
class RealBackendConfig:
    """Local TorchScript checkpoints; nothing is downloaded.

    Module contracts (documented in the README):
      detector(img 3xHxW float [0,1]) -> (boxes Nx4, scores N, labels N)
      age_gender(crop 3x64x64) -> tensor [female_score, male_score, age_min, age_max]
      sentiment(img 3xHxW) -> tensor of 65 values [overall, 64 patch values]
    """

    detector_path: Path
    age_gender_path: Path
    sentiment_path: Path
    person_label: int = 1
    device: str = "cpu"


class RealBackend:
    """Adapter over user-supplied TorchScript modules."""

    def __init__(self, config: RealBackendConfig):
        self.config = config
        try:
            import torch
        except ImportError as e:
            raise RuntimeError(
                "the real backend needs torch; install vdd-annotator[real]"
            ) from e
        self._torch = torch
        for path in (config.detector_path, config.age_gender_path,
                     config.sentiment_path):
            if not Path(path).is_file():
                raise FileNotFoundError(f"checkpoint not found: {path}")
        self._detector = torch.jit.load(str(config.detector_path), map_location=config.device)
        self._age_gender = torch.jit.load(str(config.age_gender_path), map_location=config.device)
        self._sentiment = torch.jit.load(str(config.sentiment_path), map_location=config.device)

    def _to_tensor(self, img: Image.Image):
        import numpy as np

        arr = np.asarray(img.convert("RGB"), dtype="float32") / 255.0
        return self._torch.from_numpy(arr.transpose(2, 0, 1)).to(self.config.device)

    def annotate_image(self, path: Path) -> dict:
        torch = self._torch
        with Image.open(path) as img:
            img.load()
            width, height = img.width, img.height
            tensor = self._to_tensor(img)

        with torch.no_grad():
            boxes, scores, labels = self._detector(tensor)
            senti = self._sentiment(tensor).flatten()

        detections = []
        for box, score, label in zip(boxes.tolist(), scores.tolist(), labels.tolist()):
            if int(label) != self.config.person_label:
                continue
            x0, y0, x1, y1 = (float(v) for v in box)
            if not (x0 < x1 and y0 < y1):
                log.warning("%s: skipping degenerate box %s", path.name, box)
                continue
            crop = tensor[
                :,
                int(max(y0, 0)) : max(int(y1), int(y0) + 1),
                int(max(x0, 0)) : max(int(x1), int(x0) + 1),
            ]
            crop = torch.nn.functional.interpolate(
                crop.unsqueeze(0), size=(64, 64), mode="bilinear", align_corners=False
            ).squeeze(0)
            with torch.no_grad():
                out = self._age_gender(crop).flatten().tolist()
            female_score, male_score, age_min, age_max = out[:4]
            age_min = max(int(round(age_min)), 0)
            age_max = max(int(round(age_max)), age_min)
            gender = "female" if female_score >= male_score else "male"
            gender_conf = _clamp01(max(female_score, male_score))
            detections.append(
                {
                    "bbox": [x0, y0, x1, y1],
                    "confidence": _clamp01(score),
                    "gender": gender,
                    "gender_confidence": round(gender_conf, 6),
                    "age_min": age_min,
                    "age_max": age_max,
                }
            )

        values = [_clamp01(v) for v in senti.tolist()]
        if len(values) != 65:
            raise ValueError(
                f"sentiment module must return 65 values, got {len(values)}"
            )
        return {
            "width": width,
            "height": height,
            "detections": detections,
            "sentiment": values[0],
            "sentiment_grid": [values[1 + r * 8 : 1 + (r + 1) * 8] for r in range(8)],
        }


def make_backend(
    name: str,
    seed: int = 0,
    detector: Optional[str] = None,
    age_gender: Optional[str] = None,
    sentiment: Optional[str] = None,
    person_label: int = 1,
    device: str = "cpu",
):
    if name == "mock":
        return MockBackend(seed=seed)
    if name == "real":
        missing = [n for n, v in
                   (("--detector", detector), ("--age-gender", age_gender),
                    ("--sentiment", sentiment)) if not v]
        if missing:
            raise ValueError(f"real backend needs checkpoint paths: {', '.join(missing)}")
        return RealBackend(
            RealBackendConfig(
                detector_path=Path(detector),
                age_gender_path=Path(age_gender),
                sentiment_path=Path(sentiment),
                person_label=person_label,
                device=device,
            )
        )
    raise ValueError(f"unknown backend {name!r}; expected 'mock' or 'real'")
