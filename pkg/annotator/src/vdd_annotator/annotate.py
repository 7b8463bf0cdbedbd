"""Walk an image folder and write one annotation record per image.

Filenames carry the corpus keys in the pattern <GEN>-<PROMPT>-<seq>
(e.g. MJ-p4-0017.png); the stem becomes the image_id. Records go out in
sorted filename order, one JSON object per line, matching the engine's
ingestion schema byte for byte.
"""

from __future__ import annotations

import json
import logging
import re
from pathlib import Path

from PIL import UnidentifiedImageError

from .backends import Backend

log = logging.getLogger(__name__)

FILENAME_PATTERN = re.compile(r"^(?P<gen>[A-Za-z0-9]+)-(?P<prompt>[A-Za-z0-9]+)-(?P<seq>.+)$")


class AnnotateError(Exception):
    pass


def record_for_image(path: Path, backend: Backend) -> dict:
    match = FILENAME_PATTERN.match(path.stem)
    if match is None:
        raise AnnotateError(
            f"filename {path.name!r} does not match <GEN>-<PROMPT>-<seq>"
        )
    payload = backend.annotate_image(path)
    record = {
        "image_id": path.stem,
        "generator": match.group("gen"),
        "prompt": match.group("prompt"),
        "width": payload["width"],
        "height": payload["height"],
        "detections": payload["detections"],
        "sentiment": payload["sentiment"],
    }
    if payload.get("sentiment_grid") is not None:
        record["sentiment_grid"] = payload["sentiment_grid"]
    return record


def annotate(
    images_dir: Path,
    backend: Backend,
    out_path: Path,
    tau_report: float = 0.8,
) -> int:
    """Annotate every decodable image under images_dir into out_path.

    Undecodable files and non-conforming filenames are skipped with a
    warning; producing zero records is an error. tau_report only feeds the
    summary log line: records always carry raw confidences.
    """
    images_dir = Path(images_dir)
    if not images_dir.is_dir():
        raise AnnotateError(f"not a directory: {images_dir}")

    records = []
    for path in sorted(p for p in images_dir.iterdir() if p.is_file()):
        try:
            records.append(record_for_image(path, backend))
        except (UnidentifiedImageError, OSError) as e:
            log.warning("skipping %s: cannot decode image (%s)", path.name, e)
        except AnnotateError as e:
            log.warning("skipping %s: %s", path.name, e)
    if not records:
        raise AnnotateError(f"no images could be annotated under {images_dir}")

    lines = [json.dumps(r, ensure_ascii=False, separators=(",", ":")) for r in records]
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    total = sum(len(r["detections"]) for r in records)
    above = sum(
        1
        for r in records
        for d in r["detections"]
        if d["confidence"] >= tau_report
    )
    log.info(
        "wrote %d record(s) to %s: %d detection(s), %d at confidence >= %s",
        len(records), out_path, total, above, tau_report,
    )
    return len(records)


def extract_grid_csv(annotations_path: Path, image_id: str, out_path: Path) -> None:
    """Dump one record's 8x8 sentiment grid as 8 CSV rows of 8 values."""
    for line in Path(annotations_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("image_id") != image_id:
            continue
        grid = record.get("sentiment_grid")
        if grid is None:
            raise AnnotateError(f"record {image_id!r} has no sentiment grid")
        rows = "\n".join(",".join(repr(float(v)) for v in row) for row in grid)
        Path(out_path).write_text(rows + "\n", encoding="utf-8")
        return
    raise AnnotateError(f"no record with image_id {image_id!r} in {annotations_path}")
