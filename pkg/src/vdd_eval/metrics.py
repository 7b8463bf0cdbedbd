"""Difference measures between generated slices and the painting base.

Every measure compares a slice G (all generated images for one
(generator, prompt) pair) against the base B (the reference paintings for
that prompt) over the full cartesian pairing G x B, takes absolute
differences, and normalizes into [0, 1] by a per-prompt maximum computed
over G union B. Lower always means closer to the base.

Normalization choices that keep the [0, 1] contract:
  - count score: |mean(G) - mean(B)| / M with M the max per-image count;
  - gender score: mean pairwise |count difference| / max per-image count
    of that gender;
  - age score: the summed per-bin L1 difference of a pair can reach twice
    the larger head count (disjoint bins), so the denominator is 2 * maxN;
  - sentiment scores need no denominator (values already in [0, 1]).
An empty maximum (no people anywhere, or no members of a gender) yields
score 0: two empty corpora count as maximally similar.
"""

from __future__ import annotations

import logging
import math
import statistics
from bisect import bisect_right
from typing import Iterable, Mapping, Sequence

from .ingest import CorpusSlice, EmptyBase
from .model import (
    AnnotationRecord,
    BaseReference,
    BaseRow,
    Gender,
    OverallRow,
    PersonDetection,
    ScoreRow,
    ScoreTable,
    ScoringConfig,
    SliceStats,
    StdEstimator,
    StdMode,
    UnifiedScores,
    VddEvalError,
)

log = logging.getLogger(__name__)


class EmptySlice(VddEvalError):
    def __init__(self, detail: str = "slice has no annotations"):
        super().__init__(detail)


class NoComparablePairs(VddEvalError):
    def __init__(self):
        super().__init__("no pair of records has sentiment grids on both sides")


class MissingComponent(VddEvalError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"configured component {name!r} is not available")


class MissingBase(VddEvalError):
    def __init__(self, prompt_id: str):
        self.prompt_id = prompt_id
        super().__init__(f"no base reference for prompt {prompt_id!r}")


def count_people(a: AnnotationRecord, tau: float) -> int:
    """Detections with confidence at or above tau ('0.8 or higher' is inclusive)."""
    return sum(1 for d in a.detections if d.confidence >= tau)


def estimated_age(d: PersonDetection) -> float:
    """Point age for a detection: mean of its (min, max) range."""
    return (d.age_min + d.age_max) / 2


def gender_counts(a: AnnotationRecord, tau: float) -> tuple[int, int]:
    """(females, males) among detections passing tau."""
    females = sum(
        1 for d in a.detections if d.confidence >= tau and d.gender is Gender.FEMALE
    )
    males = sum(
        1 for d in a.detections if d.confidence >= tau and d.gender is Gender.MALE
    )
    return females, males


def age_bin_index(age: float, edges: Sequence[float]) -> int:
    """Index of the half-open bin [edge_k, edge_{k+1}) holding age; the
    last bin is open-ended."""
    return min(bisect_right(edges, age) - 1, len(edges) - 1)


def age_bins(a: AnnotationRecord, cfg: ScoringConfig) -> tuple[int, ...]:
    """Ten-bin histogram of estimated ages over detections passing tau."""
    bins = [0] * len(cfg.age_bin_edges)
    for d in a.detections:
        if d.confidence >= cfg.confidence_threshold:
            bins[age_bin_index(estimated_age(d), cfg.age_bin_edges)] += 1
    return tuple(bins)


def _std(values: Sequence[float], estimator: StdEstimator) -> float:
    """Std dev under the configured estimator; fewer than two values -> 0."""
    if len(values) < 2:
        return 0.0
    if estimator is StdEstimator.SAMPLE:
        return statistics.stdev(values)
    return statistics.pstdev(values)


def _gen_records(G: CorpusSlice) -> tuple[AnnotationRecord, ...]:
    if not G.annotations:
        raise EmptySlice()
    return G.annotations


def _base_records(B: BaseReference) -> tuple[AnnotationRecord, ...]:
    anns = B.annotations()
    if not anns:
        raise EmptyBase(B.prompt_id)
    return anns


def _count_vectors(
    records: Iterable[AnnotationRecord], tau: float
) -> tuple[list[int], list[int], list[int]]:
    """Per-record (people, males, females) counts."""
    n, m, f = [], [], []
    for a in records:
        fem, mal = gender_counts(a, tau)
        n.append(count_people(a, tau))
        m.append(mal)
        f.append(fem)
    return n, m, f


def slice_stats(G: CorpusSlice, B: BaseReference, cfg: ScoringConfig) -> SliceStats:
    """Raw-count means of G plus std columns for one table row.

    In pairwise_distance mode the std is taken over the |count(a) - count(b)|
    values of all pairs (a, b) in G x B: the spread of G's distances to the
    base. In raw_counts mode it is the std of G's own per-image counts.
    """
    tau = cfg.confidence_threshold
    gn, gm, gf = _count_vectors(_gen_records(G), tau)
    bn, bm, bf = _count_vectors(_base_records(B), tau)

    def std_of(g_counts: list[int], b_counts: list[int]) -> float:
        if cfg.std_mode is StdMode.PAIRWISE_DISTANCE:
            distances = [abs(x - y) for x in g_counts for y in b_counts]
            return _std(distances, cfg.std_estimator)
        return _std(g_counts, cfg.std_estimator)

    return SliceStats(
        n_mean=statistics.mean(gn),
        n_std=std_of(gn, bn),
        m_mean=statistics.mean(gm),
        m_std=std_of(gm, bm),
        f_mean=statistics.mean(gf),
        f_std=std_of(gf, bf),
    )


def base_stats(B: BaseReference, cfg: ScoringConfig) -> SliceStats:
    """Base rows always describe the paintings themselves (raw counts)."""
    tau = cfg.confidence_threshold
    bn, bm, bf = _count_vectors(_base_records(B), tau)
    return SliceStats(
        n_mean=statistics.mean(bn),
        n_std=_std(bn, cfg.std_estimator),
        m_mean=statistics.mean(bm),
        m_std=_std(bm, cfg.std_estimator),
        f_mean=statistics.mean(bf),
        f_std=_std(bf, cfg.std_estimator),
    )


def unified_count_score(
    G: CorpusSlice, B: BaseReference, cfg: ScoringConfig
) -> float:
    """|mean count of G - mean count of B|, both normalized by the maximum
    per-image count M over G union B. M = 0 (nobody anywhere) gives 0."""
    tau = cfg.confidence_threshold
    g_counts = [count_people(a, tau) for a in _gen_records(G)]
    b_counts = [count_people(a, tau) for a in _base_records(B)]
    m = max(g_counts + b_counts)
    if m == 0:
        return 0.0
    return abs(statistics.mean(g_counts) / m - statistics.mean(b_counts) / m)


def gender_score(
    G: CorpusSlice, B: BaseReference, cfg: ScoringConfig, which: Gender
) -> float:
    """Mean over all pairs of |per-image gender-count difference| / maxC,
    maxC being the largest per-image count of that gender in G union B."""
    which = Gender(which)
    tau = cfg.confidence_threshold
    idx = 0 if which is Gender.FEMALE else 1
    g = [gender_counts(a, tau)[idx] for a in _gen_records(G)]
    b = [gender_counts(a, tau)[idx] for a in _base_records(B)]
    max_c = max(g + b)
    if max_c == 0:
        return 0.0
    total = sum(abs(x - y) for x in g for y in b)  # exact: integer counts
    return total / (len(g) * len(b)) / max_c


def age_score(G: CorpusSlice, B: BaseReference, cfg: ScoringConfig) -> float:
    """Mean over pairs of the summed per-bin |difference|, normalized by
    2 * maxN so a pair with disjoint bins scores at most 1."""
    tau = cfg.confidence_threshold
    g_records = _gen_records(G)
    b_records = _base_records(B)
    max_n = max(count_people(a, tau) for a in g_records + b_records)
    if max_n == 0:
        return 0.0
    g_bins = [age_bins(a, cfg) for a in g_records]
    b_bins = [age_bins(a, cfg) for a in b_records]
    # fsum: correctly rounded, so results are independent of pair order
    total = math.fsum(
        sum(abs(x - y) for x, y in zip(ba, bb)) / (2 * max_n)
        for ba in g_bins
        for bb in b_bins
    )
    result = total / (len(g_bins) * len(b_bins))
    if result > 1.0:
        log.warning("age score %.6f exceeded 1 and was clamped", result)
    return min(max(result, 0.0), 1.0)


def sentiment_score(G: CorpusSlice, B: BaseReference) -> float:
    """Mean over all pairs of |sentiment difference|."""
    g = [a.sentiment for a in _gen_records(G)]
    b = [a.sentiment for a in _base_records(B)]
    return math.fsum(abs(x - y) for x in g for y in b) / (len(g) * len(b))


def patch_sentiment_score(G: CorpusSlice, B: BaseReference) -> float:
    """Mean over comparable pairs of the mean per-patch |difference| across
    the 64 grid positions. Pairs missing a grid on either side are skipped."""
    g_records = _gen_records(G)
    b_records = _base_records(B)
    per_pair, skipped = [], 0
    for a in g_records:
        for b in b_records:
            if a.sentiment_grid is None or b.sentiment_grid is None:
                skipped += 1
                continue
            va, vb = a.sentiment_grid.values, b.sentiment_grid.values
            per_pair.append(math.fsum(abs(x - y) for x, y in zip(va, vb)) / len(va))
    if skipped:
        log.warning(
            "patch sentiment for (%s, %s): skipped %d pair(s) without grids",
            G.generator_id,
            G.prompt_id,
            skipped,
        )
    if not per_pair:
        raise NoComparablePairs()
    return math.fsum(per_pair) / len(per_pair)


_COMPONENT_FIELDS = {
    "count": "s_count",
    "female": "s_female",
    "male": "s_male",
    "age": "s_age",
    "sentiment": "s_sentiment",
    "patch_sentiment": "s_patch",
}


def overall_score(u: UnifiedScores, cfg: ScoringConfig) -> float:
    """Unweighted mean of the configured component scores."""
    values = []
    for name in sorted(cfg.overall_components):
        value = getattr(u, _COMPONENT_FIELDS[name])
        if value is None:
            raise MissingComponent(name)
        values.append(value)
    return statistics.mean(values)


def unified_scores(
    G: CorpusSlice, B: BaseReference, cfg: ScoringConfig
) -> UnifiedScores:
    """All component scores plus their overall for one (generator, prompt) cell.

    When no pair carries grids, s_patch is None and the overall averages the
    remaining configured components (with a warning); annotation files may
    legitimately omit grids.
    """
    try:
        s_patch = patch_sentiment_score(G, B)
    except NoComparablePairs:
        s_patch = None

    components = {
        "count": unified_count_score(G, B, cfg),
        "female": gender_score(G, B, cfg, Gender.FEMALE),
        "male": gender_score(G, B, cfg, Gender.MALE),
        "age": age_score(G, B, cfg),
        "sentiment": sentiment_score(G, B),
        "patch_sentiment": s_patch,
    }
    chosen = sorted(cfg.overall_components)
    if s_patch is None and "patch_sentiment" in chosen:
        chosen = [c for c in chosen if c != "patch_sentiment"]
        log.warning(
            "(%s, %s): no sentiment grids; overall excludes patch_sentiment",
            G.generator_id,
            G.prompt_id,
        )
        if not chosen:
            raise MissingComponent("patch_sentiment")
    overall = statistics.mean(components[c] for c in chosen)
    return UnifiedScores(
        s_count=components["count"],
        s_female=components["female"],
        s_male=components["male"],
        s_age=components["age"],
        s_sentiment=components["sentiment"],
        s_patch=s_patch,
        overall=overall,
    )


def score_corpus(
    slices: Mapping[tuple[str, str], CorpusSlice],
    bases: Mapping[str, BaseReference],
    cfg: ScoringConfig,
) -> ScoreTable:
    """Assemble the full table: one row per (generator, prompt), one base
    row per prompt in use, and one overall row per generator (the mean of
    its per-prompt overall scores). Rows are ordered by sorted keys."""
    rows = []
    per_generator: dict[str, list[float]] = {}
    prompts_in_use: set[str] = set()
    for key in sorted(slices):
        G = slices[key]
        B = bases.get(G.prompt_id)
        if B is None:
            raise MissingBase(G.prompt_id)
        prompts_in_use.add(G.prompt_id)
        scores = unified_scores(G, B, cfg)
        rows.append(
            ScoreRow(
                generator_id=G.generator_id,
                prompt_id=G.prompt_id,
                stats=slice_stats(G, B, cfg),
                scores=scores,
            )
        )
        per_generator.setdefault(G.generator_id, []).append(scores.overall)

    base_rows = tuple(
        BaseRow(prompt_id=p, stats=base_stats(bases[p], cfg))
        for p in sorted(prompts_in_use)
    )
    overall_rows = tuple(
        OverallRow(generator_id=g, overall=statistics.mean(per_generator[g]))
        for g in sorted(per_generator)
    )
    return ScoreTable(
        rows=tuple(rows), base_rows=base_rows, overall_rows=overall_rows, config=cfg
    )
