"""Safety-weighted CVSS v3.1 risk assessment for industrial control systems."""

from .analysis import (
    AggregateRow,
    AssessmentReport,
    AuditFinding,
    Settings,
    aggregate,
    assess,
    audit,
    builtin_expectations,
    rank,
)
from .catalog import AttackScenario, Catalog, builtin_cstr_catalog, load_catalog
from .cvss import MetricVector, ScoreBreakdown, base_score, parse_vector, render_vector, roundup, weight
from .safety import (
    ScoreResult,
    probability_v2,
    probability_v31,
    risk,
    safety_impact,
    score,
    severity,
)
from .taxonomy import attack_frame, locations_for_level, resolve_location

__version__ = "0.1.0"
