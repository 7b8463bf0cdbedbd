"""Acceptance suite: one test per criterion, each printing a PASS line.

Criteria:
  1. count-score worked example (0.0925 internal, 0.34/0.09 displayed)
  2. oracle equivalence over >=100 seeded random corpora, within 1e-9
  3. invariant suite, >=200 cases per property
  4. std sanity (sample 0.8367 on [1,2,2,3,3]; population differs)
  5. golden reports, byte-identical
  6. prompt suite (five prompts; reductions clean and idempotent)
"""

import random
import statistics
import time

import pytest

import oracle
from conftest import (
    make_base,
    make_detection,
    make_record,
    make_slice,
    random_base,
    random_record,
    random_slice,
    record_with_counts,
)
from vdd_eval import distributions, metrics, prompts, report
from vdd_eval.model import (
    BaseRow,
    Gender,
    OverallRow,
    ScoreRow,
    ScoreTable,
    ScoringConfig,
    SliceStats,
    StdEstimator,
    StdMode,
    UnifiedScores,
)

TOL = 1e-9


def _passed(name):
    print(f"ACCEPTANCE[{name}]: PASS")


def test_worked_count_score_example(cfg):
    """50 images with mean count 5.4, max count 16 anywhere, base at 0.43:
    unified count score 0.0925, displayed 0.34 / 0.09 at 2 decimals."""
    start = time.perf_counter()
    G = make_slice(
        [record_with_counts(c, image_id=f"g{i}")
         for i, c in enumerate([5] * 48 + [14, 16])]
    )
    B = make_base(
        [record_with_counts(c, "base", image_id=f"b{i}")
         for i, c in enumerate([7] * 24 + [4])]
    )
    tau = cfg.confidence_threshold
    g_counts = [metrics.count_people(a, tau) for a in G.annotations]
    b_counts = [metrics.count_people(a, tau) for a in B.annotations()]
    assert statistics.mean(g_counts) == 5.4
    assert max(g_counts + b_counts) == 16
    assert statistics.mean(b_counts) / 16 == 0.43

    score = metrics.unified_count_score(G, B, cfg)
    assert abs(score - 0.0925) < TOL
    assert report.format_number(statistics.mean(g_counts) / 16, 2) == "0.34"
    assert report.format_number(score, 2) == "0.09"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"worked example took {elapsed:.3f}s"
    _passed("worked-example")


def test_oracle_equivalence():
    """Every measure matches the brute-force oracle on 100 seeded corpora."""
    start = time.perf_counter()
    for seed in range(100):
        rng = random.Random(1000 + seed)
        cfg = ScoringConfig(
            std_mode=rng.choice(list(StdMode)),
            std_estimator=rng.choice(list(StdEstimator)),
        )
        tau = cfg.confidence_threshold
        G = random_slice(rng)
        B = random_base(rng)
        g, b = G.annotations, B.annotations()

        for a in g + b:
            assert metrics.count_people(a, tau) == oracle.o_count(a, tau)
            assert metrics.gender_counts(a, tau) == (
                oracle.o_gender_count(a, tau, "female"),
                oracle.o_gender_count(a, tau, "male"),
            )
            assert metrics.age_bins(a, cfg) == tuple(
                oracle.o_age_bins(a, tau, cfg.age_bin_edges)
            )
            for d in a.detections:
                assert metrics.estimated_age(d) == oracle.o_age(d)

        pairwise = cfg.std_mode is StdMode.PAIRWISE_DISTANCE
        sample = cfg.std_estimator is StdEstimator.SAMPLE
        stats = metrics.slice_stats(G, B, cfg)
        expect = oracle.o_slice_stats(g, b, tau, pairwise, sample)
        got = (stats.n_mean, stats.n_std, stats.m_mean, stats.m_std,
               stats.f_mean, stats.f_std)
        for x, y in zip(got, expect):
            assert abs(x - y) < TOL

        bstats = metrics.base_stats(B, cfg)
        bexpect = oracle.o_slice_stats(b, b, tau, False, sample)
        for x, y in zip((bstats.n_mean, bstats.n_std, bstats.m_mean,
                         bstats.m_std, bstats.f_mean, bstats.f_std), bexpect):
            assert abs(x - y) < TOL

        components = {
            "count": oracle.o_count_score(g, b, tau),
            "female": oracle.o_gender_score(g, b, tau, "female"),
            "male": oracle.o_gender_score(g, b, tau, "male"),
            "age": oracle.o_age_score(g, b, tau, cfg.age_bin_edges),
            "sentiment": oracle.o_sentiment_score(g, b),
            "patch_sentiment": oracle.o_patch_score(g, b),
        }
        u = metrics.unified_scores(G, B, cfg)
        assert abs(u.s_count - components["count"]) < TOL
        assert abs(u.s_female - components["female"]) < TOL
        assert abs(u.s_male - components["male"]) < TOL
        assert abs(u.s_age - components["age"]) < TOL
        assert abs(u.s_sentiment - components["sentiment"]) < TOL
        if components["patch_sentiment"] is None:
            assert u.s_patch is None
            names = sorted(cfg.overall_components - {"patch_sentiment"})
        else:
            assert abs(u.s_patch - components["patch_sentiment"]) < TOL
            names = sorted(cfg.overall_components)
        assert abs(u.overall - oracle.o_overall(components, names)) < TOL

    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"oracle equivalence took {elapsed:.1f}s"
    _passed("oracle-equivalence")


def test_invariant_scores_in_range(cfg):
    for seed in range(200):
        rng = random.Random(2000 + seed)
        u = metrics.unified_scores(random_slice(rng), random_base(rng), cfg)
        for value in (u.s_count, u.s_female, u.s_male, u.s_age,
                      u.s_sentiment, u.s_patch, u.overall):
            assert value is None or 0.0 <= value <= 1.0
    _passed("invariant-range")


def test_invariant_identical_corpora_score_zero(cfg):
    for seed in range(200):
        rng = random.Random(3000 + seed)
        template = random_record(rng, grid_chance=1.0)

        def clone(generator, i):
            return make_record(
                generator, template.prompt_id, template.detections,
                sentiment=template.sentiment, grid=template.sentiment_grid,
                image_id=f"{generator}-{i}",
            )

        G = make_slice([clone("MJ", i) for i in range(rng.randint(1, 6))])
        B = make_base([clone("base", i) for i in range(rng.randint(1, 4))],
                      prompt=template.prompt_id)
        u = metrics.unified_scores(G, B, cfg)
        assert (u.s_count, u.s_female, u.s_male, u.s_age,
                u.s_sentiment, u.s_patch, u.overall) == (0, 0, 0, 0, 0, 0, 0)
    _passed("invariant-identity-zero")


def test_invariant_permutation(cfg):
    for seed in range(200):
        rng = random.Random(4000 + seed)
        G = random_slice(rng)
        B = random_base(rng)
        u1 = metrics.unified_scores(G, B, cfg)
        s1 = metrics.slice_stats(G, B, cfg)
        g_shuffled = list(G.annotations)
        rng.shuffle(g_shuffled)
        paintings = list(B.paintings)
        rng.shuffle(paintings)
        G2 = make_slice(g_shuffled)
        B2 = type(B)(B.prompt_id, tuple(paintings))
        assert metrics.unified_scores(G2, B2, cfg) == u1
        assert metrics.slice_stats(G2, B2, cfg) == s1
    _passed("invariant-permutation")


def test_invariant_threshold_inclusive(cfg):
    for seed in range(200):
        rng = random.Random(5000 + seed)
        base_dets = [random_detection_with_conf(rng, rng.random())
                     for _ in range(rng.randint(0, 4))]
        r = make_record(detections=base_dets)
        n = metrics.count_people(r, 0.8)
        with_at = make_record(
            detections=base_dets + [random_detection_with_conf(rng, 0.80)])
        with_below = make_record(
            detections=base_dets + [random_detection_with_conf(rng, 0.79)])
        assert metrics.count_people(with_at, 0.8) == n + 1
        assert metrics.count_people(with_below, 0.8) == n
    _passed("invariant-threshold-inclusive")


def random_detection_with_conf(rng, conf):
    age = rng.randint(0, 90)
    return make_detection(
        confidence=conf,
        gender=rng.choice([Gender.FEMALE, Gender.MALE]),
        age_min=age,
        age_max=age + rng.randint(0, 20),
    )


def test_invariant_subthreshold_insensitive(cfg):
    for seed in range(200):
        rng = random.Random(6000 + seed)
        G = random_slice(rng)
        B = random_base(rng)
        u1 = metrics.unified_scores(G, B, cfg)
        s1 = metrics.slice_stats(G, B, cfg)
        # add one detection strictly below tau to a random image of G
        idx = rng.randrange(len(G.annotations))
        extra = random_detection_with_conf(rng, rng.uniform(0.0, 0.75))
        changed = []
        for i, a in enumerate(G.annotations):
            if i != idx:
                changed.append(a)
                continue
            changed.append(
                make_record(
                    a.generator_id, a.prompt_id, a.detections + (extra,),
                    sentiment=a.sentiment, grid=a.sentiment_grid,
                    image_id=a.image_id + "-x",
                )
            )
        G2 = make_slice(changed)
        assert metrics.unified_scores(G2, B, cfg) == u1
        assert metrics.slice_stats(G2, B, cfg) == s1
    _passed("invariant-subthreshold")


def test_invariant_histogram_sums_and_pyramid_conservation(cfg):
    for seed in range(200):
        rng = random.Random(7000 + seed)
        G = random_slice(rng)
        hist = distributions.count_histogram(G, cfg)
        assert abs(sum(hist.as_dict().values()) - 100.0) <= 1e-6
        pyramid = distributions.population_pyramid(G, cfg)
        assert pyramid.total() == sum(
            metrics.count_people(a, cfg.confidence_threshold)
            for a in G.annotations
        )
    _passed("invariant-hist-pyramid")


def test_std_sanity():
    values = [1, 2, 2, 3, 3]
    B = make_base(
        [record_with_counts(c, "base", image_id=f"s{i}")
         for i, c in enumerate(values)]
    )
    sample = metrics.base_stats(B, ScoringConfig()).n_std
    assert report.format_number(sample, 4) == "0.8367"
    population = metrics.base_stats(
        B, ScoringConfig(std_estimator=StdEstimator.POPULATION)
    ).n_std
    assert abs(population - statistics.pstdev(values)) < TOL
    assert population != sample
    _passed("std-sanity")


GOLDEN_TABLE = ScoreTable(
    rows=(
        ScoreRow("MJ", "p1",
                 SliceStats(n_mean=2.5, n_std=0.5, m_mean=1.5, m_std=0.25,
                            f_mean=1.0, f_std=0.75),
                 UnifiedScores(0.125, 0.25, 0.0625, 0.5, 0.1, 0.2, 0.20625)),
        ScoreRow("DALLE", "p1",
                 SliceStats(n_mean=0.25, n_std=0.125, m_mean=0.125, m_std=0.0625,
                            f_mean=0.125, f_std=0.5),
                 UnifiedScores(0.5, 0.125, 0.25, 0.25, 0.3, 0.4,
                               0.30416666666666664)),
        ScoreRow("MJ", "p2",
                 SliceStats(n_mean=3.0, n_std=1.5, m_mean=2.0, m_std=1.0,
                            f_mean=1.0, f_std=0.5),
                 UnifiedScores(0.0625, 0.125, 0.5, 0.125, 0.2, 0.1,
                               0.18541666666666667)),
        ScoreRow("DALLE", "p2",
                 SliceStats(n_mean=0.5, n_std=0.25, m_mean=0.25, m_std=0.125,
                            f_mean=0.25, f_std=0.0625),
                 UnifiedScores(0.25, 0.0625, 0.125, 0.5, 0.4, 0.3,
                               0.27291666666666664)),
    ),
    base_rows=(
        BaseRow("p1", SliceStats(2.2, 0.8367, 1.4, 0.5477, 0.8, 0.8367)),
        BaseRow("p2", SliceStats(2.6, 2.7018, 0.6, 0.8944, 2.0, 2.9155)),
    ),
    overall_rows=(
        OverallRow("MJ", 0.19583333333333333),
        OverallRow("DALLE", 0.28854166666666664),
    ),
    config=ScoringConfig(),
)

GOLDEN_MD = """# Score table

## Prompt p1

| Measure | base | MJ | DALLE |
| --- | --- | --- | --- |
| M-STD | 0.5477 | **0.2500** | <u>0.0625</u> |
| M-Mean | 1.4000 | **1.5000** | <u>0.1250</u> |
| F-STD | 0.8367 | **0.7500** | <u>0.5000</u> |
| F-Mean | 0.8000 | **1.0000** | <u>0.1250</u> |
| N-STD | 0.8367 | **0.5000** | <u>0.1250</u> |
| N-Mean | 2.2000 | **2.5000** | <u>0.2500</u> |
| S-Count | - | <u>0.1250</u> | **0.5000** |
| S-Female | - | **0.2500** | <u>0.1250</u> |
| S-Male | - | <u>0.0625</u> | **0.2500** |
| S-Age | - | **0.5000** | <u>0.2500</u> |
| S-Sentiment | - | <u>0.1000</u> | **0.3000** |
| S-Patch | - | <u>0.2000</u> | **0.4000** |
| Overall | - | <u>0.2063</u> | **0.3042** |

## Prompt p2

| Measure | base | MJ | DALLE |
| --- | --- | --- | --- |
| M-STD | 0.8944 | **1.0000** | <u>0.1250</u> |
| M-Mean | 0.6000 | **2.0000** | <u>0.2500</u> |
| F-STD | 2.9155 | **0.5000** | <u>0.0625</u> |
| F-Mean | 2.0000 | **1.0000** | <u>0.2500</u> |
| N-STD | 2.7018 | **1.5000** | <u>0.2500</u> |
| N-Mean | 2.6000 | **3.0000** | <u>0.5000</u> |
| S-Count | - | <u>0.0625</u> | **0.2500** |
| S-Female | - | **0.1250** | <u>0.0625</u> |
| S-Male | - | **0.5000** | <u>0.1250</u> |
| S-Age | - | <u>0.1250</u> | **0.5000** |
| S-Sentiment | - | <u>0.2000</u> | **0.4000** |
| S-Patch | - | <u>0.1000</u> | **0.3000** |
| Overall | - | <u>0.1854</u> | **0.2729** |

## Overall across prompts

| Measure | MJ | DALLE |
| --- | --- | --- |
| Overall | <u>0.1958</u> | **0.2885** |
"""

GOLDEN_CSV = """prompt,generator,overall
p1,MJ,0.2063
p1,DALLE,0.3042
p2,MJ,0.1854
p2,DALLE,0.2729
overall,MJ,0.1958
overall,DALLE,0.2885
"""


def test_golden_reports():
    md = report.emit_score_table_md(GOLDEN_TABLE)
    csv_text = report.emit_overall_csv(GOLDEN_TABLE)
    assert md == GOLDEN_MD
    assert csv_text == GOLDEN_CSV
    # stable across repeated emission
    assert report.emit_score_table_md(GOLDEN_TABLE) == md
    assert report.emit_overall_csv(GOLDEN_TABLE) == csv_text
    for prompt_block in ("## Prompt p1", "## Prompt p2"):
        assert prompt_block in md
    for label in ("M-STD", "M-Mean", "F-STD", "F-Mean", "N-STD", "N-Mean"):
        assert md.count(f"| {label} |") == 2  # once per prompt block
    doc = report.emit_results_doc(GOLDEN_TABLE)
    assert report.emit_results_doc(GOLDEN_TABLE) == doc
    parsed, _, _ = report.parse_results_doc(doc)
    assert parsed == GOLDEN_TABLE
    _passed("golden-reports")


def test_prompt_suite():
    specs = prompts.list_prompts()
    assert len(specs) == 5
    sw = prompts.shipped_stopwords()
    for prompt_id in ("p2", "p4"):
        text = prompts.get_prompt(prompt_id).full_text
        limit = 400
        assert len(text) > limit  # these two need reduction at this limit
        out = prompts.truncate_prompt(text, limit, sw)
        assert len(out) <= limit
        assert all(token not in sw for token in out.split())
        assert prompts.truncate_prompt(out, limit, sw) == out
    _passed("prompt-suite")
