"""Domain types shared by every module of the engine.

All types are immutable after construction (frozen dataclasses holding
tuples) and value-comparable, so golden tests can compare whole records.
Constructing a value that violates an invariant raises SchemaViolation
naming the offending field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class VddEvalError(Exception):
    """Base class for every error this package raises on purpose."""


class SchemaViolation(VddEvalError):
    """A field failed validation; carries the field name and the reason."""

    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        self.reason = reason
        super().__init__(f"{field_name}: {reason}")


def _require(cond: bool, field_name: str, reason: str) -> None:
    if not cond:
        raise SchemaViolation(field_name, reason)


class Gender(str, Enum):
    FEMALE = "female"
    MALE = "male"

    @classmethod
    def parse(cls, value: str) -> "Gender":
        """Strict two-value parse; unknown labels are rejected, not coerced."""
        try:
            return cls(value)
        except ValueError:
            raise SchemaViolation(
                "gender", f"unknown label {value!r}; expected 'male' or 'female'"
            ) from None


class StdMode(str, Enum):
    PAIRWISE_DISTANCE = "pairwise_distance"
    RAW_COUNTS = "raw_counts"


class StdEstimator(str, Enum):
    SAMPLE = "sample"
    POPULATION = "population"


PROMPT_IDS = ("p1", "p2", "p3", "p4", "p5")

GENERATOR_FAMILIES = ("dalle", "midjourney", "stable-diffusion")

#: Names accepted in ScoringConfig.overall_components.
COMPONENT_NAMES = frozenset(
    {"count", "female", "male", "age", "sentiment", "patch_sentiment"}
)

#: Default decade bins: [0,10), [10,20), ..., [80,90), [90, inf).
DEFAULT_AGE_BIN_EDGES = (0, 10, 20, 30, 40, 50, 60, 70, 80, 90)


@dataclass(frozen=True)
class PromptSpec:
    """One of the five scripture passages used as a generation prompt."""

    id: str
    title: str
    full_text: str
    truncated_text: Optional[str] = None

    def __post_init__(self):
        _require(self.id in PROMPT_IDS, "id", f"must be one of {PROMPT_IDS}")
        _require(bool(self.full_text), "full_text", "must be non-empty")


@dataclass(frozen=True)
class GeneratorInfo:
    """Catalog entry for one text-to-image generator."""

    id: str
    family: str
    version: str
    declared_image_count: int

    def __post_init__(self):
        _require(bool(self.id), "id", "must be non-empty")
        _require(
            self.family in GENERATOR_FAMILIES,
            "family",
            f"must be one of {GENERATOR_FAMILIES}",
        )
        _require(
            self.declared_image_count >= 0,
            "declared_image_count",
            "must be >= 0",
        )


#: The nine generators the shipped corpus was produced with, in catalog order.
KNOWN_GENERATORS = (
    GeneratorInfo("DALLE", "dalle", "V1 beta", 500),
    GeneratorInfo("MJ", "midjourney", "V5.1", 616),
    GeneratorInfo("RW", "stable-diffusion", "V1.5", 1000),
    GeneratorInfo("CV", "stable-diffusion", "V1.4", 1000),
    GeneratorInfo("SAI", "stable-diffusion", "V2.1", 1000),
    GeneratorInfo("PH", "stable-diffusion", "V1.1", 1000),
    GeneratorInfo("SG", "stable-diffusion", "V1.4", 1000),
    GeneratorInfo("NS", "stable-diffusion", "V1.1", 500),
    GeneratorInfo("DA", "stable-diffusion", "V2.0", 500),
)


@dataclass(frozen=True)
class PersonDetection:
    """One detected human: box, detector confidence, gender, age range."""

    bbox: tuple[float, float, float, float]
    confidence: float
    gender: Gender
    age_min: int
    age_max: int
    gender_confidence: Optional[float] = None

    def __post_init__(self):
        _require(len(self.bbox) == 4, "bbox", "must have exactly 4 numbers")
        x0, y0, x1, y1 = self.bbox
        _require(x0 < x1, "bbox", f"x0 must be < x1 (got {x0} >= {x1})")
        _require(y0 < y1, "bbox", f"y0 must be < y1 (got {y0} >= {y1})")
        _require(
            0.0 <= self.confidence <= 1.0, "confidence", "must be in [0, 1]"
        )
        if self.gender_confidence is not None:
            _require(
                0.0 <= self.gender_confidence <= 1.0,
                "gender_confidence",
                "must be in [0, 1]",
            )
        _require(isinstance(self.gender, Gender), "gender", "must be a Gender")
        _require(self.age_min >= 0, "age_min", "must be >= 0")
        _require(
            self.age_max >= self.age_min, "age_max", "must be >= age_min"
        )


GRID_ROWS = 8
GRID_COLS = 8
GRID_SIZE = GRID_ROWS * GRID_COLS


@dataclass(frozen=True)
class SentimentGrid:
    """Fixed 8x8 map of per-patch sentiment values, row-major in [0, 1].

    Other grid sizes are a validation error, not a knob: pairwise patch
    comparison is only defined between grids of identical shape.
    """

    values: tuple[float, ...]

    rows = GRID_ROWS
    cols = GRID_COLS

    def __post_init__(self):
        _require(
            len(self.values) == GRID_SIZE,
            "values",
            f"must have exactly {GRID_SIZE} values (8x8), got {len(self.values)}",
        )
        for v in self.values:
            _require(
                0.0 <= v <= 1.0, "values", f"every value must be in [0, 1], got {v}"
            )

    @classmethod
    def from_rows(cls, rows: list) -> "SentimentGrid":
        _require(len(rows) == GRID_ROWS, "sentiment_grid", "must have 8 rows")
        flat: list[float] = []
        for r in rows:
            _require(
                len(r) == GRID_COLS, "sentiment_grid", "every row must have 8 values"
            )
            flat.extend(float(v) for v in r)
        return cls(tuple(flat))

    def as_rows(self) -> list[list[float]]:
        return [
            list(self.values[r * GRID_COLS : (r + 1) * GRID_COLS])
            for r in range(GRID_ROWS)
        ]


@dataclass(frozen=True)
class AnnotationRecord:
    """Everything the engine knows about one image.

    generator_id and prompt_id are opaque keys here; scoring only needs
    them to agree between slices and base references.
    """

    image_id: str
    generator_id: str
    prompt_id: str
    width: int
    height: int
    detections: tuple[PersonDetection, ...]
    sentiment: float
    sentiment_grid: Optional[SentimentGrid] = None

    def __post_init__(self):
        _require(bool(self.image_id), "image_id", "must be non-empty")
        _require(bool(self.generator_id), "generator", "must be non-empty")
        _require(bool(self.prompt_id), "prompt", "must be non-empty")
        _require(self.width > 0, "width", "must be > 0")
        _require(self.height > 0, "height", "must be > 0")
        _require(
            0.0 <= self.sentiment <= 1.0, "sentiment", "must be in [0, 1]"
        )


@dataclass(frozen=True)
class PaintingRef:
    """One reference painting with its metadata and annotation record."""

    painter: str
    title: str
    year: str
    annotation: AnnotationRecord


@dataclass(frozen=True)
class BaseReference:
    """The reference paintings for one prompt (the comparison base)."""

    prompt_id: str
    paintings: tuple[PaintingRef, ...]

    def __post_init__(self):
        _require(
            len(self.paintings) > 0, "paintings", "must list at least one painting"
        )

    def annotations(self) -> tuple[AnnotationRecord, ...]:
        return tuple(p.annotation for p in self.paintings)


@dataclass(frozen=True)
class ScoringConfig:
    """Every scoring knob in one place; defaults follow the shipped corpus.

    age_bin_edges are the ten ascending lower bounds of half-open decade
    bins [edge_k, edge_{k+1}); the last bin is open-ended, so the bins
    cover [0, inf). std estimates over fewer than two values are 0.
    """

    confidence_threshold: float = 0.8
    age_bin_edges: tuple[float, ...] = DEFAULT_AGE_BIN_EDGES
    std_mode: StdMode = StdMode.PAIRWISE_DISTANCE
    std_estimator: StdEstimator = StdEstimator.SAMPLE
    overall_components: frozenset[str] = field(default_factory=lambda: COMPONENT_NAMES)
    rounding: int = 4

    def __post_init__(self):
        _require(
            0.0 <= self.confidence_threshold <= 1.0,
            "confidence_threshold",
            "must be in [0, 1]",
        )
        edges = self.age_bin_edges
        _require(len(edges) == 10, "age_bin_edges", "must list exactly ten bins")
        _require(edges[0] == 0, "age_bin_edges", "first bin must start at 0")
        _require(
            all(a < b for a, b in zip(edges, edges[1:])),
            "age_bin_edges",
            "edges must be strictly increasing",
        )
        _require(isinstance(self.std_mode, StdMode), "std_mode", "must be a StdMode")
        _require(
            isinstance(self.std_estimator, StdEstimator),
            "std_estimator",
            "must be a StdEstimator",
        )
        comps = self.overall_components
        _require(len(comps) > 0, "overall_components", "must not be empty")
        unknown = set(comps) - COMPONENT_NAMES
        _require(
            not unknown,
            "overall_components",
            f"unknown component names: {sorted(unknown)}",
        )
        _require(self.rounding >= 0, "rounding", "must be >= 0")


def age_bin_labels(edges: tuple[float, ...]) -> list[str]:
    """Human-readable labels for the ten bins, e.g. '0-9', ..., '90+'."""

    def fmt(x: float) -> str:
        return str(int(x)) if float(x).is_integer() else str(x)

    labels = []
    for lo, hi in zip(edges, edges[1:]):
        hi_label = int(hi) - 1 if float(hi).is_integer() else hi
        labels.append(f"{fmt(lo)}-{fmt(hi_label)}")
    labels.append(f"{fmt(edges[-1])}+")
    return labels


@dataclass(frozen=True)
class SliceStats:
    """Raw-count statistics for one slice or base: people, males, females."""

    n_mean: float
    n_std: float
    m_mean: float
    m_std: float
    f_mean: float
    f_std: float

    def __post_init__(self):
        for name in ("n_mean", "n_std", "m_mean", "m_std", "f_mean", "f_std"):
            _require(getattr(self, name) >= 0, name, "must be >= 0")


@dataclass(frozen=True)
class UnifiedScores:
    """Normalized difference scores in [0, 1]; lower = closer to the base.

    s_patch is None when no compared pair carried a sentiment grid; the
    overall then averages the remaining configured components.
    """

    s_count: float
    s_female: float
    s_male: float
    s_age: float
    s_sentiment: float
    s_patch: Optional[float]
    overall: float

    def __post_init__(self):
        named = {
            "s_count": self.s_count,
            "s_female": self.s_female,
            "s_male": self.s_male,
            "s_age": self.s_age,
            "s_sentiment": self.s_sentiment,
            "overall": self.overall,
        }
        if self.s_patch is not None:
            named["s_patch"] = self.s_patch
        for name, value in named.items():
            _require(
                0.0 <= value <= 1.0 and math.isfinite(value),
                name,
                f"must be in [0, 1], got {value}",
            )


@dataclass(frozen=True)
class ScoreRow:
    """One (generator, prompt) cell of the score table."""

    generator_id: str
    prompt_id: str
    stats: SliceStats
    scores: UnifiedScores


@dataclass(frozen=True)
class BaseRow:
    """Raw-count statistics of the base paintings for one prompt."""

    prompt_id: str
    stats: SliceStats


@dataclass(frozen=True)
class OverallRow:
    """Per-generator mean of its per-prompt overall scores."""

    generator_id: str
    overall: float

    def __post_init__(self):
        _require(0.0 <= self.overall <= 1.0, "overall", "must be in [0, 1]")


@dataclass(frozen=True)
class ScoreTable:
    """All rows of one scoring run plus the config that produced them."""

    rows: tuple[ScoreRow, ...]
    base_rows: tuple[BaseRow, ...]
    overall_rows: tuple[OverallRow, ...]
    config: ScoringConfig

    def generators(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.generator_id not in seen:
                seen.append(row.generator_id)
        return seen

    def prompts(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.prompt_id not in seen:
                seen.append(row.prompt_id)
        return seen
