"""Self-correction of hallucinated summaries: verification questions,
retrieved evidence and rewriting, plus the evaluation metrics."""

from ._hallucorrect import (
    HallucorrectError,
    aggregate,
    alignment_report,
    chunk_text,
    extract_article_text,
    load_summedits,
    ned,
    nli_scores,
    normalize_judge_score,
    parse_judge_score,
    parse_numbered_list,
    pearson,
    render_prompt,
    render_table,
    run_pipeline,
    semantic_similarity,
)

__all__ = [
    "HallucorrectError",
    "aggregate",
    "alignment_report",
    "chunk_text",
    "extract_article_text",
    "load_summedits",
    "ned",
    "nli_scores",
    "normalize_judge_score",
    "parse_judge_score",
    "parse_numbered_list",
    "pearson",
    "render_prompt",
    "render_table",
    "run_pipeline",
    "semantic_similarity",
]
