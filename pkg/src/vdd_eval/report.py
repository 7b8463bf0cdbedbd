"""Serialization of score tables and distributions: CSV, Markdown, and a
machine-readable results document.

Numbers are rounded half-up at presentation only; internal values keep
full precision. All emission is deterministic: fixed column orders, '.'
decimal separator, '\n' newlines.
"""

from __future__ import annotations

import csv
import io
import json
import re
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Optional, Sequence

from .distributions import CountHistogram, PopulationPyramid
from .model import (
    BaseRow,
    OverallRow,
    SchemaViolation,
    ScoreRow,
    ScoreTable,
    ScoringConfig,
    SliceStats,
    StdEstimator,
    StdMode,
    UnifiedScores,
    age_bin_labels,
)

RESULTS_SCHEMA_VERSION = 1

#: Column order of the published tables; unknown generator ids follow
#: alphabetically after these.
_DISPLAY_RANK = {
    "MJ": 0,
    "MIDJOURNEY": 0,
    "DALLE": 1,
    "DALLE2": 1,
    "CV": 2,
    "PH": 3,
    "SAI": 4,
    "DA": 5,
    "NS": 6,
    "SG": 7,
    "RW": 8,
}

_STAT_ROWS = (
    ("M-STD", "m_std"),
    ("M-Mean", "m_mean"),
    ("F-STD", "f_std"),
    ("F-Mean", "f_mean"),
    ("N-STD", "n_std"),
    ("N-Mean", "n_mean"),
)

_SCORE_ROWS = (
    ("S-Count", "s_count"),
    ("S-Female", "s_female"),
    ("S-Male", "s_male"),
    ("S-Age", "s_age"),
    ("S-Sentiment", "s_sentiment"),
    ("S-Patch", "s_patch"),
    ("Overall", "overall"),
)


def format_number(x: float, places: int) -> str:
    """Half-up decimal rounding of the float's shortest faithful decimal."""
    q = Decimal(1).scaleb(-places) if places > 0 else Decimal(1)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def generator_sort_key(generator_id: str) -> tuple[int, int, str]:
    norm = re.sub(r"[^A-Z0-9]", "", generator_id.upper())
    rank = _DISPLAY_RANK.get(norm)
    if rank is None:
        return (1, 0, generator_id)
    return (0, rank, generator_id)


def display_order(generator_ids: Iterable[str]) -> list[str]:
    return sorted(set(generator_ids), key=generator_sort_key)


def _mark_extremes(cells: list[Optional[float]], formatted: list[str]) -> list[str]:
    """Bold the max and underline the min among non-missing generator cells.

    Ties resolve to the first occurrence; when every value is equal the
    underline goes to the next column, and a lone column carries both marks.
    """
    present = [(v, i) for i, v in enumerate(cells) if v is not None]
    if not present:
        return formatted
    max_value = max(v for v, _ in present)
    min_value = min(v for v, _ in present)
    max_i = next(i for v, i in present if v == max_value)
    min_i = next(
        (i for v, i in present if v == min_value and i != max_i),
        max_i,
    )
    out = list(formatted)
    if min_i == max_i:
        out[max_i] = f"**<u>{out[max_i]}</u>**"
    else:
        out[max_i] = f"**{out[max_i]}**"
        out[min_i] = f"<u>{out[min_i]}</u>"
    return out


def emit_score_table_md(t: ScoreTable, cfg: ScoringConfig | None = None) -> str:
    """Markdown rendition of the score table: one block per prompt with the
    base column first, then generators in the published column order; per
    row the highest generator value is bold and the lowest underlined."""
    cfg = cfg or t.config
    places = cfg.rounding
    lines = ["# Score table", ""]
    generators = display_order(t.generators())
    by_cell = {(r.generator_id, r.prompt_id): r for r in t.rows}
    base_by_prompt = {b.prompt_id: b for b in t.base_rows}

    for prompt_id in sorted(t.prompts()):
        lines.append(f"## Prompt {prompt_id}")
        lines.append("")
        cols = [g for g in generators if (g, prompt_id) in by_cell]
        lines.append("| Measure | base | " + " | ".join(cols) + " |")
        lines.append("| --- " * (len(cols) + 2) + "|")
        base = base_by_prompt.get(prompt_id)

        def row_line(label: str, base_value: Optional[float], values: list[Optional[float]]):
            base_cell = format_number(base_value, places) if base_value is not None else "-"
            formatted = [
                format_number(v, places) if v is not None else "-" for v in values
            ]
            marked = _mark_extremes(values, formatted)
            lines.append(f"| {label} | {base_cell} | " + " | ".join(marked) + " |")

        for label, attr in _STAT_ROWS:
            base_value = getattr(base.stats, attr) if base else None
            row_line(
                label,
                base_value,
                [getattr(by_cell[(g, prompt_id)].stats, attr) for g in cols],
            )
        for label, attr in _SCORE_ROWS:
            row_line(
                label,
                None,
                [getattr(by_cell[(g, prompt_id)].scores, attr) for g in cols],
            )
        lines.append("")

    if t.overall_rows:
        lines.append("## Overall across prompts")
        lines.append("")
        by_gen = {r.generator_id: r.overall for r in t.overall_rows}
        cols = [g for g in generators if g in by_gen]
        lines.append("| Measure | " + " | ".join(cols) + " |")
        lines.append("| --- " * (len(cols) + 1) + "|")
        values = [by_gen[g] for g in cols]
        formatted = [format_number(v, places) for v in values]
        lines.append("| Overall | " + " | ".join(_mark_extremes(values, formatted)) + " |")
        lines.append("")
    return "\n".join(lines)


def emit_overall_csv(t: ScoreTable) -> str:
    """CSV of per-(prompt, generator) overall scores, closed by one
    'overall' block per generator."""
    places = t.config.rounding
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["prompt", "generator", "overall"])
    generators = display_order(t.generators())
    by_cell = {(r.generator_id, r.prompt_id): r for r in t.rows}
    for prompt_id in sorted(t.prompts()):
        for g in generators:
            row = by_cell.get((g, prompt_id))
            if row is not None:
                writer.writerow(
                    [prompt_id, g, format_number(row.scores.overall, places)]
                )
    by_gen = {r.generator_id: r.overall for r in t.overall_rows}
    for g in generators:
        if g in by_gen:
            writer.writerow(["overall", g, format_number(by_gen[g], places)])
    return buf.getvalue()


def emit_hist_csv(hists: Sequence[CountHistogram]) -> str:
    """Count histograms as CSV; percentages keep full precision so each
    slice's rows sum to 100."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["generator", "prompt", "count", "percentage"])
    for h in hists:
        for count, pct in h.proportions:
            writer.writerow([h.generator_id, h.prompt_id, count, repr(pct)])
    return buf.getvalue()


def emit_pyramid_csv(
    pyramids: Sequence[PopulationPyramid], cfg: ScoringConfig
) -> str:
    """Population pyramids as CSV, ten labeled bin rows per pyramid."""
    labels = age_bin_labels(cfg.age_bin_edges)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["generator", "prompt", "bin", "label", "female", "male"])
    for p in pyramids:
        for i, (female, male) in enumerate(p.bins):
            writer.writerow([p.generator_id, p.prompt_id, i, labels[i], female, male])
    return buf.getvalue()


def _config_to_obj(cfg: ScoringConfig) -> dict:
    return {
        "confidence_threshold": cfg.confidence_threshold,
        "age_bin_edges": list(cfg.age_bin_edges),
        "std_mode": cfg.std_mode.value,
        "std_estimator": cfg.std_estimator.value,
        "overall_components": sorted(cfg.overall_components),
        "rounding": cfg.rounding,
    }


def _config_from_obj(obj: dict) -> ScoringConfig:
    return ScoringConfig(
        confidence_threshold=obj["confidence_threshold"],
        age_bin_edges=tuple(obj["age_bin_edges"]),
        std_mode=StdMode(obj["std_mode"]),
        std_estimator=StdEstimator(obj["std_estimator"]),
        overall_components=frozenset(obj["overall_components"]),
        rounding=obj["rounding"],
    )


def _stats_to_obj(s: SliceStats) -> dict:
    return {
        "n_mean": s.n_mean,
        "n_std": s.n_std,
        "m_mean": s.m_mean,
        "m_std": s.m_std,
        "f_mean": s.f_mean,
        "f_std": s.f_std,
    }


def _scores_to_obj(u: UnifiedScores) -> dict:
    return {
        "s_count": u.s_count,
        "s_female": u.s_female,
        "s_male": u.s_male,
        "s_age": u.s_age,
        "s_sentiment": u.s_sentiment,
        "s_patch": u.s_patch,
        "overall": u.overall,
    }


def emit_results_doc(
    t: ScoreTable,
    hists: Sequence[CountHistogram] = (),
    pyramids: Sequence[PopulationPyramid] = (),
) -> str:
    """Self-describing JSON document: config echo, table, distributions."""
    doc = {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "config": _config_to_obj(t.config),
        "score_table": {
            "rows": [
                {
                    "generator": r.generator_id,
                    "prompt": r.prompt_id,
                    "stats": _stats_to_obj(r.stats),
                    "scores": _scores_to_obj(r.scores),
                }
                for r in t.rows
            ],
            "base_rows": [
                {"prompt": b.prompt_id, "stats": _stats_to_obj(b.stats)}
                for b in t.base_rows
            ],
            "overall_rows": [
                {"generator": o.generator_id, "overall": o.overall}
                for o in t.overall_rows
            ],
        },
        "histograms": [
            {
                "generator": h.generator_id,
                "prompt": h.prompt_id,
                "proportions": [[c, p] for c, p in h.proportions],
            }
            for h in hists
        ],
        "pyramids": [
            {
                "generator": p.generator_id,
                "prompt": p.prompt_id,
                "bins": [[f, m] for f, m in p.bins],
            }
            for p in pyramids
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_results_doc(
    text: str,
) -> tuple[ScoreTable, list[CountHistogram], list[PopulationPyramid]]:
    """Inverse of emit_results_doc: parse(emit(x)) == x."""
    doc = json.loads(text)
    version = doc.get("schema_version")
    if version != RESULTS_SCHEMA_VERSION:
        raise SchemaViolation(
            "schema_version", f"expected {RESULTS_SCHEMA_VERSION}, got {version!r}"
        )
    cfg = _config_from_obj(doc["config"])
    table = doc["score_table"]
    rows = tuple(
        ScoreRow(
            generator_id=r["generator"],
            prompt_id=r["prompt"],
            stats=SliceStats(**r["stats"]),
            scores=UnifiedScores(**r["scores"]),
        )
        for r in table["rows"]
    )
    base_rows = tuple(
        BaseRow(prompt_id=b["prompt"], stats=SliceStats(**b["stats"]))
        for b in table["base_rows"]
    )
    overall_rows = tuple(
        OverallRow(generator_id=o["generator"], overall=o["overall"])
        for o in table["overall_rows"]
    )
    hists = [
        CountHistogram(
            h["generator"],
            h["prompt"],
            tuple((int(c), float(p)) for c, p in h["proportions"]),
        )
        for h in doc.get("histograms", [])
    ]
    pyramids = [
        PopulationPyramid(
            p["generator"],
            p["prompt"],
            tuple((int(f), int(m)) for f, m in p["bins"]),
        )
        for p in doc.get("pyramids", [])
    ]
    return (
        ScoreTable(rows=rows, base_rows=base_rows, overall_rows=overall_rows, config=cfg),
        hists,
        pyramids,
    )
