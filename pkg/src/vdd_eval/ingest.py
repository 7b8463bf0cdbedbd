"""Parsing, validation, and indexing of annotation and base files.

Annotation files are UTF-8 JSON Lines: one self-contained record per
line, so large corpora stream without loading everything. Base files are
one JSON document keyed by prompt. Unknown fields warn rather than fail,
so annotators can evolve ahead of the engine; numeric ranges are strict
because all downstream normalization assumes them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

from .model import (
    AnnotationRecord,
    BaseReference,
    Gender,
    PaintingRef,
    PersonDetection,
    SchemaViolation,
    SentimentGrid,
    VddEvalError,
    _require,
)

log = logging.getLogger(__name__)

TextSource = Union[str, IO[str], Iterable[str]]


class MalformedLine(VddEvalError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class DuplicateImageId(VddEvalError):
    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"duplicate image_id {image_id!r}")


class EmptyBase(VddEvalError):
    def __init__(self, prompt_id: str):
        self.prompt_id = prompt_id
        super().__init__(f"base for prompt {prompt_id!r} lists no paintings")


@dataclass(frozen=True)
class CorpusSlice:
    """All annotations for one (generator, prompt) pair; the scoring unit."""

    generator_id: str
    prompt_id: str
    annotations: tuple[AnnotationRecord, ...]

    def __post_init__(self):
        _require(len(self.annotations) > 0, "annotations", "must be non-empty")
        for a in self.annotations:
            _require(
                a.generator_id == self.generator_id and a.prompt_id == self.prompt_id,
                "annotations",
                f"record {a.image_id!r} has keys ({a.generator_id}, {a.prompt_id}), "
                f"slice is ({self.generator_id}, {self.prompt_id})",
            )


_RECORD_FIELDS = {
    "image_id",
    "generator",
    "prompt",
    "width",
    "height",
    "detections",
    "sentiment",
    "sentiment_grid",
}
_DETECTION_FIELDS = {
    "bbox",
    "confidence",
    "gender",
    "gender_confidence",
    "age_min",
    "age_max",
}


def _get(obj: dict, field: str, kind, context: str = ""):
    name = f"{context}{field}"
    if field not in obj:
        raise SchemaViolation(name, "missing required field")
    value = obj[field]
    try:
        if kind is int:
            # JSON has no separate int type guarantee; 3.0 is accepted, 3.5 is not.
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if kind is str:
            if not isinstance(value, str):
                raise ValueError
            return value
        if kind is list:
            if not isinstance(value, list):
                raise ValueError
            return value
    except (TypeError, ValueError):
        raise SchemaViolation(
            name, f"expected {kind.__name__}, got {value!r}"
        ) from None
    raise AssertionError(f"unsupported kind {kind}")


def _detection_from_obj(obj: dict, unknown: set[str]) -> PersonDetection:
    if not isinstance(obj, dict):
        raise SchemaViolation("detections", f"each detection must be an object, got {obj!r}")
    unknown.update(k for k in obj if k not in _DETECTION_FIELDS)
    bbox = _get(obj, "bbox", list, "detections.")
    if len(bbox) != 4:
        raise SchemaViolation("detections.bbox", "must have exactly 4 numbers")
    gender_conf = None
    if obj.get("gender_confidence") is not None:
        gender_conf = _get(obj, "gender_confidence", float, "detections.")
    return PersonDetection(
        bbox=tuple(float(v) for v in bbox),
        confidence=_get(obj, "confidence", float, "detections."),
        gender=Gender.parse(_get(obj, "gender", str, "detections.")),
        gender_confidence=gender_conf,
        age_min=_get(obj, "age_min", int, "detections."),
        age_max=_get(obj, "age_max", int, "detections."),
    )


def record_from_obj(obj: dict, unknown: set[str] | None = None) -> AnnotationRecord:
    """Build one validated record from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise SchemaViolation("record", f"must be an object, got {type(obj).__name__}")
    if unknown is None:
        unknown = set()
    unknown.update(k for k in obj if k not in _RECORD_FIELDS)
    grid = None
    if obj.get("sentiment_grid") is not None:
        grid = SentimentGrid.from_rows(_get(obj, "sentiment_grid", list))
    return AnnotationRecord(
        image_id=_get(obj, "image_id", str),
        generator_id=_get(obj, "generator", str),
        prompt_id=_get(obj, "prompt", str),
        width=_get(obj, "width", int),
        height=_get(obj, "height", int),
        detections=tuple(
            _detection_from_obj(d, unknown) for d in _get(obj, "detections", list)
        ),
        sentiment=_get(obj, "sentiment", float),
        sentiment_grid=grid,
    )


def record_to_obj(record: AnnotationRecord) -> dict:
    """Inverse of record_from_obj; optional absent fields are omitted."""
    obj = {
        "image_id": record.image_id,
        "generator": record.generator_id,
        "prompt": record.prompt_id,
        "width": record.width,
        "height": record.height,
        "detections": [],
        "sentiment": record.sentiment,
    }
    for d in record.detections:
        det = {
            "bbox": list(d.bbox),
            "confidence": d.confidence,
            "gender": d.gender.value,
            "age_min": d.age_min,
            "age_max": d.age_max,
        }
        if d.gender_confidence is not None:
            det["gender_confidence"] = d.gender_confidence
        obj["detections"].append(det)
    if record.sentiment_grid is not None:
        obj["sentiment_grid"] = record.sentiment_grid.as_rows()
    return obj


def _iter_lines(source: TextSource) -> Iterator[str]:
    if isinstance(source, str):
        yield from source.splitlines()
    else:
        for line in source:
            yield line.rstrip("\n")


def iter_annotation_lines(
    source: TextSource,
) -> Iterator[tuple[int, AnnotationRecord | VddEvalError]]:
    """Yield (line_no, record-or-error) for every non-empty line.

    Duplicate image_ids surface as DuplicateImageId on the later line.
    Unknown field names are collected and warned once per call.
    """
    seen: set[str] = set()
    unknown: set[str] = set()
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            yield line_no, MalformedLine(line_no, f"invalid JSON ({e.msg})")
            continue
        try:
            record = record_from_obj(obj, unknown)
        except SchemaViolation as e:
            yield line_no, e
            continue
        if record.image_id in seen:
            yield line_no, DuplicateImageId(record.image_id)
            continue
        seen.add(record.image_id)
        yield line_no, record
    if unknown:
        log.warning("ignored unknown fields: %s", ", ".join(sorted(unknown)))


def parse_annotations(source: TextSource) -> list[AnnotationRecord]:
    """Parse a whole annotation stream strictly: first problem raises."""
    records = []
    for _line_no, item in iter_annotation_lines(source):
        if isinstance(item, VddEvalError):
            raise item
        records.append(item)
    return records


def scan_annotations(
    source: TextSource,
) -> tuple[list[AnnotationRecord], list[tuple[int, str]]]:
    """Lenient pass for diagnostics: collects every per-line problem."""
    records, issues = [], []
    for line_no, item in iter_annotation_lines(source):
        if isinstance(item, VddEvalError):
            issues.append((line_no, str(item)))
        else:
            records.append(item)
    return records, issues


def serialize_annotations(records: Iterable[AnnotationRecord]) -> str:
    """One record per line; parse(serialize(x)) == x."""
    lines = [
        json.dumps(record_to_obj(r), ensure_ascii=False, separators=(",", ":"))
        for r in records
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def group_slices(
    records: Iterable[AnnotationRecord],
) -> dict[tuple[str, str], CorpusSlice]:
    """Group records into slices, keyed and ordered by (generator, prompt)."""
    buckets: dict[tuple[str, str], list[AnnotationRecord]] = {}
    for r in records:
        buckets.setdefault((r.generator_id, r.prompt_id), []).append(r)
    return {
        key: CorpusSlice(key[0], key[1], tuple(buckets[key]))
        for key in sorted(buckets)
    }


def load_base(source: Union[str, IO[str]]) -> dict[str, BaseReference]:
    """Load the reference paintings, one BaseReference per prompt.

    A prompt with other than 5 paintings is accepted with a warning; the
    shipped corpus uses exactly five per prompt.
    """
    text = source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaViolation("base", f"invalid JSON ({e.msg})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("prompts"), dict):
        raise SchemaViolation("prompts", "base document must map prompt ids under 'prompts'")

    bases: dict[str, BaseReference] = {}
    for prompt_id in sorted(doc["prompts"]):
        entry = doc["prompts"][prompt_id]
        if not isinstance(entry, dict) or not isinstance(entry.get("paintings"), list):
            raise SchemaViolation(
                f"prompts.{prompt_id}.paintings", "must be an array of paintings"
            )
        paintings = []
        for p in entry["paintings"]:
            if not isinstance(p, dict):
                raise SchemaViolation(f"prompts.{prompt_id}.paintings", "entries must be objects")
            if "annotation" not in p:
                raise SchemaViolation(
                    f"prompts.{prompt_id}.paintings.annotation", "missing required field"
                )
            annotation = record_from_obj(p["annotation"])
            if annotation.prompt_id != prompt_id:
                raise SchemaViolation(
                    f"prompts.{prompt_id}.paintings.annotation.prompt",
                    f"painting annotation is for prompt {annotation.prompt_id!r}",
                )
            paintings.append(
                PaintingRef(
                    painter=_get(p, "painter", str),
                    title=_get(p, "title", str),
                    year=str(p.get("year", "")),
                    annotation=annotation,
                )
            )
        if not paintings:
            raise EmptyBase(prompt_id)
        if len(paintings) != 5:
            log.warning(
                "base for prompt %s has %d paintings (expected 5)",
                prompt_id,
                len(paintings),
            )
        bases[prompt_id] = BaseReference(prompt_id, tuple(paintings))
    return bases
