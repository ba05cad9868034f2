"""Task transferability analysis: PGF matrices, scores, cliques and personas."""

import json

from ._taskxfer import (
    TaskxferError,
    __version__,
    breadth_weighted_score,
    maximal_cliques,
    pgf_cell,
    pgf_min_bound,
    run_cli,
    synth,
    t_cdf,
    t_test,
    wilcoxon_signed_rank,
)
from ._taskxfer import analyze_json as _analyze_json


def analyze(records, tasks_csv=None, **options):
    """Analyze record text (CSV or JSON) and return the report as a dict."""
    return json.loads(_analyze_json(records, tasks_csv, **options))


__all__ = [
    "TaskxferError",
    "__version__",
    "analyze",
    "breadth_weighted_score",
    "maximal_cliques",
    "pgf_cell",
    "pgf_min_bound",
    "run_cli",
    "synth",
    "t_cdf",
    "t_test",
    "wilcoxon_signed_rank",
]
