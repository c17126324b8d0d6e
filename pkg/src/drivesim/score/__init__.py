"""Closed-loop PDM scoring: subscores, aggregation, and the sim-to-real gap."""

from .config import ScoreConfig
from .report import (COLUMNS, AgentScores, ScoreReport, aggregate, format_table,
                     gap, pdms, reports_to_json, score_log)
from .subscores import (comfort_score, config_from_log, dac_score, ep_score,
                        min_ttc, nc_score, ttc_score)

__all__ = [
    "ScoreConfig", "config_from_log",
    "nc_score", "dac_score", "ttc_score", "comfort_score", "ep_score",
    "min_ttc", "pdms", "gap",
    "AgentScores", "ScoreReport", "score_log", "aggregate", "format_table",
    "reports_to_json", "COLUMNS",
]
