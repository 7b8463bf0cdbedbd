"""Shared builders for records, slices, bases, and seeded random corpora."""

from __future__ import annotations

import itertools
import random

import pytest

from vdd_eval.ingest import CorpusSlice
from vdd_eval.model import (
    AnnotationRecord,
    BaseReference,
    Gender,
    PaintingRef,
    PersonDetection,
    ScoringConfig,
    SentimentGrid,
)

_ids = itertools.count()


def make_detection(
    confidence=0.9,
    gender=Gender.MALE,
    age_min=20,
    age_max=30,
    bbox=(0.0, 0.0, 10.0, 10.0),
    gender_confidence=None,
):
    return PersonDetection(
        bbox=bbox,
        confidence=confidence,
        gender=Gender(gender),
        age_min=age_min,
        age_max=age_max,
        gender_confidence=gender_confidence,
    )


def make_record(
    generator="MJ",
    prompt="p1",
    detections=(),
    sentiment=0.5,
    grid=None,
    image_id=None,
    width=512,
    height=512,
):
    if image_id is None:
        image_id = f"img-{next(_ids)}"
    if isinstance(grid, (int, float)):
        grid = SentimentGrid((float(grid),) * 64)
    return AnnotationRecord(
        image_id=image_id,
        generator_id=generator,
        prompt_id=prompt,
        width=width,
        height=height,
        detections=tuple(detections),
        sentiment=sentiment,
        sentiment_grid=grid,
    )


def record_with_counts(n_people, generator="MJ", prompt="p1", confidence=0.9, **kw):
    """A record with n_people same-confidence male detections."""
    return make_record(
        generator,
        prompt,
        [make_detection(confidence=confidence) for _ in range(n_people)],
        **kw,
    )


def make_slice(records):
    records = tuple(records)
    return CorpusSlice(records[0].generator_id, records[0].prompt_id, records)


def make_base(records, prompt=None):
    records = tuple(records)
    prompt = prompt or records[0].prompt_id
    return BaseReference(
        prompt,
        tuple(
            PaintingRef(f"painter {i}", f"title {i}", "1600", a)
            for i, a in enumerate(records)
        ),
    )


def random_detection(rng: random.Random, with_gender_conf=True):
    x0, y0 = rng.uniform(0, 400), rng.uniform(0, 400)
    age_min = rng.randint(0, 90)
    return make_detection(
        confidence=rng.choice([rng.random(), 0.8, 0.79, round(rng.random(), 2)]),
        gender=rng.choice([Gender.FEMALE, Gender.MALE]),
        age_min=age_min,
        age_max=age_min + rng.randint(0, 25),
        bbox=(x0, y0, x0 + rng.uniform(1, 100), y0 + rng.uniform(1, 100)),
        gender_confidence=rng.random() if with_gender_conf and rng.random() < 0.5 else None,
    )


def random_record(rng: random.Random, generator="MJ", prompt="p1", max_detections=6,
                  grid_chance=0.7):
    grid = None
    if rng.random() < grid_chance:
        grid = SentimentGrid(tuple(rng.random() for _ in range(64)))
    return make_record(
        generator,
        prompt,
        [random_detection(rng) for _ in range(rng.randint(0, max_detections))],
        sentiment=rng.random(),
        grid=grid,
    )


def random_slice(rng: random.Random, generator="MJ", prompt="p1", max_images=10,
                 grid_chance=0.7):
    n = rng.randint(1, max_images)
    return make_slice(
        random_record(rng, generator, prompt, grid_chance=grid_chance) for _ in range(n)
    )


def random_base(rng: random.Random, prompt="p1", max_paintings=5, grid_chance=0.7):
    n = rng.randint(1, max_paintings)
    return make_base(
        [random_record(rng, "base", prompt, grid_chance=grid_chance) for _ in range(n)],
        prompt=prompt,
    )


@pytest.fixture
def cfg():
    return ScoringConfig()
