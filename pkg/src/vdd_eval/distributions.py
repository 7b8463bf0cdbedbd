"""Count-proportion histograms and gender-by-age population pyramids.

Pyramids accumulate every detection across a whole slice (or across the
base paintings), not per-image averages; histograms key on exact integer
counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .ingest import CorpusSlice
from .metrics import EmptySlice, age_bin_index, count_people, estimated_age
from .model import (
    AnnotationRecord,
    BaseReference,
    Gender,
    ScoringConfig,
    _require,
)

Source = Union[CorpusSlice, BaseReference]


@dataclass(frozen=True)
class CountHistogram:
    """Percentage of a slice's images per observed people count.

    proportions holds (count, percentage) pairs sorted by count; counts
    with zero occurrences are omitted, so percentages sum to 100.
    """

    generator_id: str
    prompt_id: str
    proportions: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.proportions:
            total = sum(p for _, p in self.proportions)
            _require(
                abs(total - 100.0) <= 1e-6,
                "proportions",
                f"must sum to 100, got {total!r}",
            )

    def as_dict(self) -> dict[int, float]:
        return dict(self.proportions)


@dataclass(frozen=True)
class PopulationPyramid:
    """Accumulated (female, male) detection counts per age bin."""

    generator_id: str
    prompt_id: str
    bins: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for female, male in self.bins:
            _require(female >= 0 and male >= 0, "bins", "counts must be >= 0")

    def total(self) -> int:
        return sum(f + m for f, m in self.bins)


def _source_parts(source: Source) -> tuple[str, str, tuple[AnnotationRecord, ...]]:
    if isinstance(source, BaseReference):
        return "base", source.prompt_id, source.annotations()
    return source.generator_id, source.prompt_id, source.annotations


def count_histogram(source: Source, cfg: ScoringConfig) -> CountHistogram:
    """Share of images per exact people count, in percent of the slice."""
    generator_id, prompt_id, annotations = _source_parts(source)
    if not annotations:
        raise EmptySlice()
    tally: dict[int, int] = {}
    for a in annotations:
        c = count_people(a, cfg.confidence_threshold)
        tally[c] = tally.get(c, 0) + 1
    n = len(annotations)
    proportions = tuple((c, 100.0 * tally[c] / n) for c in sorted(tally))
    return CountHistogram(generator_id, prompt_id, proportions)


def population_pyramid(source: Source, cfg: ScoringConfig) -> PopulationPyramid:
    """Each detection passing tau adds 1 to (its age bin, its gender)."""
    generator_id, prompt_id, annotations = _source_parts(source)
    if not annotations:
        raise EmptySlice()
    females = [0] * len(cfg.age_bin_edges)
    males = [0] * len(cfg.age_bin_edges)
    for a in annotations:
        for d in a.detections:
            if d.confidence < cfg.confidence_threshold:
                continue
            idx = age_bin_index(estimated_age(d), cfg.age_bin_edges)
            if d.gender is Gender.FEMALE:
                females[idx] += 1
            else:
                males[idx] += 1
    return PopulationPyramid(
        generator_id, prompt_id, tuple(zip(females, males))
    )
