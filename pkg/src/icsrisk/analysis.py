"""Assessment pipeline: per-scenario scoring, grouping, ranking and audit."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Callable, Mapping, Sequence, Union

from ._csvio import HeaderError, ShapeError, data_text, read_rows
from .catalog import AttackScenario, Catalog
from .safety import (
    DEFAULT_SI,
    AccessComplexity2,
    AccessVector2,
    Authentication2,
    ScoreResult,
    check_level,
    display,
    probability_v2,
    score,
    validate_si_table,
)
from .taxonomy import Taxonomy, default_taxonomy

V31, V2 = "v31", "v2"
LEVEL, LOCATION = "level", "location"
SEVERITY, RISK, PROBABILITY = "severity", "risk", "probability"

V2Inputs = tuple[AccessVector2, AccessComplexity2, Authentication2]
V2Mapping = Union[Mapping[int, V2Inputs], Callable[[AttackScenario], V2Inputs]]


class InvalidSettings(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    model: str = V31
    paper_compat: bool = False
    si_table: Mapping[int, float] = DEFAULT_SI
    # scenario id -> (AV2, AC2, Au2), or a callable on the scenario; v2 model only
    v2_mapping: V2Mapping | None = None

    def __post_init__(self):
        if self.model not in (V31, V2):
            raise InvalidSettings(f"unknown probability model {self.model!r}")
        if self.model == V2 and self.v2_mapping is None:
            raise InvalidSettings("v2 model needs a v2_mapping for the catalog's scenarios")
        if self.paper_compat and self.model != V31:
            raise InvalidSettings("paper_compat only applies to the v31 model")
        object.__setattr__(self, "si_table", validate_si_table(self.si_table))

    def describe(self) -> dict:
        return {
            "model": self.model,
            "paper_compat": self.paper_compat,
            "si_table": {str(k): v for k, v in self.si_table.items()},
        }


@dataclass(frozen=True)
class AssessmentReport:
    catalog_name: str
    scenarios: tuple[AttackScenario, ...]
    results: tuple[ScoreResult, ...]
    settings: Settings

    def __iter__(self):
        return iter(zip(self.scenarios, self.results))

    def result(self, scenario_id: int) -> ScoreResult:
        for r in self.results:
            if r.scenario_id == scenario_id:
                return r
        raise KeyError(scenario_id)


def _v2_inputs(mapping: V2Mapping, sc: AttackScenario) -> V2Inputs:
    if callable(mapping):
        return mapping(sc)
    try:
        return mapping[sc.id]
    except KeyError:
        raise InvalidSettings(f"v2_mapping has no entry for scenario {sc.id}") from None


def assess(catalog: Catalog, settings: Settings | None = None) -> AssessmentReport:
    settings = settings or Settings()
    results = []
    for sc in catalog.scenarios:
        p = None
        if settings.model == V2:
            p = probability_v2(*_v2_inputs(settings.v2_mapping, sc))
        results.append(
            score(
                sc.vector,
                sc.level,
                scenario_id=sc.id,
                table=settings.si_table,
                probability=p,
                paper_compat=settings.paper_compat,
            )
        )
    return AssessmentReport(catalog.name, tuple(catalog.scenarios), tuple(results), settings)


@dataclass(frozen=True)
class AggregateRow:
    key: int | str
    n: int
    mean_severity: float
    mean_risk: float


def _dec(x: float) -> Decimal:
    return Decimal(repr(x))


def _mean(values: Sequence[float]) -> float:
    # 2-decimal inputs, so the Decimal sum is exact
    return float(sum(_dec(display(v)) for v in values) / len(values))


def _location_order(
    keys: Sequence[str], levels: Mapping[str, int], taxonomy: Taxonomy
) -> list[str]:
    positions = {}
    for i, k in enumerate(keys):
        hits = taxonomy.resolve_location(k)
        same_level = [loc for loc, lvl in hits if lvl == levels[k]]
        pick = (same_level or [loc for loc, _ in hits] or [None])[0]
        positions[k] = (0, taxonomy.locations.index(pick), i) if pick else (1, 0, i)
    return sorted(keys, key=positions.__getitem__)


def aggregate_values(
    rows: Sequence[tuple[int, str, float, float]],
    by: str,
    taxonomy: Taxonomy | None = None,
) -> list[AggregateRow]:
    """Group ``(level, location, severity, risk)`` tuples and average them.

    Each value is rounded half-up to 2 decimals before averaging.
    """
    if by not in (LEVEL, LOCATION):
        raise ValueError(f"by must be {LEVEL!r} or {LOCATION!r}, got {by!r}")
    groups: dict = {}
    first_level: dict = {}
    for level, location, sev, rsk in rows:
        key = level if by == LEVEL else location
        groups.setdefault(key, []).append((sev, rsk))
        first_level.setdefault(key, level)
    if by == LEVEL:
        keys = sorted(groups)
    else:
        keys = _location_order(list(groups), first_level, taxonomy or default_taxonomy())
    return [
        AggregateRow(
            k,
            len(groups[k]),
            _mean([s for s, _ in groups[k]]),
            _mean([r for _, r in groups[k]]),
        )
        for k in keys
    ]


def aggregate(report: AssessmentReport, by: str = LEVEL, taxonomy: Taxonomy | None = None) -> list[AggregateRow]:
    rows = [(sc.level, sc.location, r.severity, r.risk) for sc, r in report]
    if not rows:
        raise ValueError("empty report")
    return aggregate_values(rows, by, taxonomy)


@dataclass(frozen=True)
class Ranking:
    metric: str
    order: tuple
    # groups of keys whose metric values are equal
    ties: tuple[tuple, ...] = ()

    def format(self, label: Callable[[object], str] | None = None) -> str:
        """``"Level 2>Level 3>..."``; tied keys are joined with ``=``."""
        label = label or format_key
        tied = {k: g for g in self.ties for k in g}
        out, done = [], set()
        for k in self.order:
            if k in done:
                continue
            group = tied.get(k, (k,))
            done.update(group)
            out.append("=".join(label(g) for g in group))
        return ">".join(out)


def format_key(key) -> str:
    return f"Level {key}" if isinstance(key, int) else str(key)


def rank(aggregates: Sequence[AggregateRow], metric: str = SEVERITY) -> Ranking:
    """Order keys by descending mean severity or risk.

    Ties are broken by ascending level or by case-insensitive location name,
    and reported in ``Ranking.ties``.
    """
    if metric not in (SEVERITY, RISK):
        raise ValueError(f"metric must be {SEVERITY!r} or {RISK!r}, got {metric!r}")
    attr = "mean_severity" if metric == SEVERITY else "mean_risk"

    def tiebreak(row):
        return (0, row.key, "") if isinstance(row.key, int) else (1, 0, row.key.casefold())

    rows = sorted(aggregates, key=lambda r: (-_dec(getattr(r, attr)), tiebreak(r)))
    groups: dict = {}
    for r in rows:
        groups.setdefault(_dec(getattr(r, attr)), []).append(r.key)
    ties = [tuple(g) for g in groups.values() if len(g) > 1]
    return Ranking(metric, tuple(r.key for r in rows), tuple(ties))


# ---------------------------------------------------------------------------
# audit

EXPECTED_HEADER = ("table", "ref", "metric", "expected", "erratum")
PUBLISHED, COMPUTED = "published", "computed"


class Verdict(enum.Enum):
    MATCH = "Match"
    MISMATCH = "Mismatch"


class UnknownReference(ValueError):
    def __init__(self, cell: str, reason: str = ""):
        self.cell = cell
        super().__init__(f"UnknownReference {cell}" + (f": {reason}" if reason else ""))


class ExpectationsError(ValueError):
    pass


@dataclass(frozen=True)
class Expectation:
    table: str
    ref: str
    metric: str
    expected: Decimal
    erratum: bool
    line: int = 0

    @property
    def cell(self) -> str:
        return f"T{self.table}:{self.ref}:{self.metric}"

    @property
    def tolerance(self) -> Decimal:
        # half a unit in the last printed place: 0.005 for "2.70", 0.05 for "1.1"
        return Decimal(5).scaleb(self.expected.as_tuple().exponent - 1)


@dataclass(frozen=True)
class AuditFinding:
    cell: str
    expected: float
    computed: float
    delta: float
    verdict: Verdict
    erratum: bool = False
    table: str = ""
    metric: str = ""

    @property
    def as_flagged(self) -> bool:
        """True when the verdict is the one the expectations file predicts."""
        return (self.verdict is Verdict.MISMATCH) == self.erratum


_TRUE = {"true", "1", "yes", "y"}
_FALSE = {"false", "0", "no", "n", ""}


def parse_expectations(text: str, source: str = "<expected>") -> list[Expectation]:
    out = []
    try:
        for line, row in read_rows(text, EXPECTED_HEADER, source):
            table = row["table"].upper().removeprefix("T")
            if table not in ("5", "6"):
                raise ExpectationsError(f"{source}:{line}: table must be 5 or 6, got {row['table']!r}")
            metric = row["metric"].lower()
            allowed = (PROBABILITY, SEVERITY, RISK) if table == "5" else (SEVERITY, RISK)
            if metric not in allowed:
                raise ExpectationsError(f"{source}:{line}: metric {row['metric']!r} not in {allowed}")
            try:
                expected = Decimal(row["expected"])
            except ArithmeticError:
                raise ExpectationsError(f"{source}:{line}: expected {row['expected']!r} is not a number") from None
            flag = row["erratum"].lower()
            if flag not in _TRUE | _FALSE:
                raise ExpectationsError(f"{source}:{line}: erratum must be true/false, got {row['erratum']!r}")
            out.append(Expectation(table, row["ref"], metric, expected, flag in _TRUE, line))
    except (HeaderError, ShapeError) as exc:
        if isinstance(exc, ShapeError):
            raise ExpectationsError(f"{source}:{exc.line}: {exc}") from None
        raise ExpectationsError(str(exc)) from None
    return out


def load_expectations(path: str | os.PathLike) -> list[Expectation]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ExpectationsError(f"{path}: cannot read ({exc.strerror})") from None
    return parse_expectations(text, str(path))


def builtin_expectations() -> list[Expectation]:
    return parse_expectations(data_text("cstr_expected.csv"), "cstr_expected.csv")


def _scenario_id(ref: str) -> int:
    try:
        return int(ref.strip().lstrip("#").strip())
    except ValueError:
        raise UnknownReference(ref, "not a scenario number") from None


def _group_key(ref: str):
    kind, sep, value = ref.partition(":")
    kind = kind.strip().lower()
    if not sep or kind not in (LEVEL, LOCATION):
        raise UnknownReference(ref, "table 6 refs look like 'level:2' or 'location:HMI'")
    if kind == LEVEL:
        try:
            return LEVEL, check_level(int(value))
        except ValueError:
            raise UnknownReference(ref, "not a PERA level") from None
    return LOCATION, value.strip()


def _finding(exp: Expectation, computed: float) -> AuditFinding:
    delta = _dec(computed) - exp.expected
    verdict = Verdict.MATCH if abs(delta) <= exp.tolerance else Verdict.MISMATCH
    return AuditFinding(
        exp.cell, float(exp.expected), computed, float(delta), verdict, exp.erratum, exp.table, exp.metric
    )


def audit(
    report: AssessmentReport,
    expectations: Sequence[Expectation],
    table6_source: str = PUBLISHED,
    taxonomy: Taxonomy | None = None,
) -> list[AuditFinding]:
    """Compare a report with published table cells, one finding per cell.

    Table 5 cells are checked against the report. Table 6 cells are group
    means; with ``table6_source="published"`` they are recomputed from the
    table 5 values in ``expectations`` (so each table is checked against its
    own source and an error in one row is not blamed on every group that
    contains it), with ``"computed"`` from the report itself.
    """
    if table6_source not in (PUBLISHED, COMPUTED):
        raise ValueError(f"table6_source must be {PUBLISHED!r} or {COMPUTED!r}")
    findings = []
    ids = {sc.id for sc in report.scenarios}

    for exp in expectations:
        if exp.table != "5":
            continue
        sid = _scenario_id(exp.ref)
        if sid not in ids:
            raise UnknownReference(exp.cell, f"no scenario {sid} in {report.catalog_name}")
        findings.append(_finding(exp, getattr(report.result(sid), exp.metric)))

    t6 = [e for e in expectations if e.table == "6"]
    if t6:
        if table6_source == COMPUTED:
            rows = [(sc.level, sc.location, r.severity, r.risk) for sc, r in report]
        else:
            published = {
                (_scenario_id(e.ref), e.metric): float(e.expected)
                for e in expectations
                if e.table == "5"
            }
            rows = []
            for sc in report.scenarios:
                try:
                    rows.append((sc.level, sc.location, published[sc.id, SEVERITY], published[sc.id, RISK]))
                except KeyError as exc:
                    raise UnknownReference(
                        f"T5:{exc.args[0][0]}:{exc.args[0][1]}",
                        "needed to recompute table 6 from published values",
                    ) from None
        tables = {
            LEVEL: {r.key: r for r in aggregate_values(rows, LEVEL, taxonomy)},
            LOCATION: {str(r.key).casefold(): r for r in aggregate_values(rows, LOCATION, taxonomy)},
        }
        for exp in t6:
            kind, key = _group_key(exp.ref)
            lookup = key.casefold() if kind == LOCATION else key
            row = tables[kind].get(lookup)
            if row is None:
                raise UnknownReference(exp.cell, f"no {kind} group {key!r}")
            findings.append(_finding(exp, row.mean_severity if exp.metric == SEVERITY else row.mean_risk))
    return findings


@dataclass(frozen=True)
class AuditSummary:
    table: str
    metric: str
    total: int
    matched: int
    errata: int
    unexpected: tuple[str, ...] = field(default=())

    def format(self) -> str:
        label = self.metric if self.table == "5" else f"table 6 {self.metric}"
        s = f"{label} {self.matched}/{self.total} match"
        if self.errata:
            s += f", {self.errata} known " + ("erratum" if self.errata == 1 else "errata")
        if self.unexpected:
            s += f", UNEXPECTED: {' '.join(self.unexpected)}"
        return s


def summarize(findings: Sequence[AuditFinding]) -> list[AuditSummary]:
    order = [("5", PROBABILITY), ("5", SEVERITY), ("5", RISK), ("6", SEVERITY), ("6", RISK)]
    out = []
    for table, metric in order:
        fs = [f for f in findings if f.table == table and f.metric == metric]
        if not fs:
            continue
        out.append(
            AuditSummary(
                table,
                metric,
                len(fs),
                sum(f.verdict is Verdict.MATCH for f in fs),
                sum(f.erratum for f in fs),
                tuple(f.cell for f in fs if not f.as_flagged),
            )
        )
    return out


def audit_passed(findings: Sequence[AuditFinding]) -> bool:
    return all(f.as_flagged for f in findings)


__all__ = [
    "AggregateRow", "AssessmentReport", "AuditFinding", "AuditSummary", "Expectation",
    "InvalidSettings", "Ranking", "Settings", "UnknownReference", "Verdict",
    "aggregate", "aggregate_values", "assess", "audit", "audit_passed",
    "builtin_expectations", "load_expectations", "parse_expectations", "rank", "summarize",
]
