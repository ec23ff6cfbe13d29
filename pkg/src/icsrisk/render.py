"""Deterministic text renderings (table, csv, json, markdown) of results.

Display values are rounded half-up: 2 decimals for probability, severity and
risk, 1 for the CVSS base score. JSON additionally carries full precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .analysis import AggregateRow, AssessmentReport, AuditFinding, Ranking, format_key, summarize
from .cvss import MetricVector, render_vector
from .safety import ScoreResult, display

FORMATS = ("table", "csv", "json", "markdown")

_NAMES = {
    "av": {"N": "Network", "A": "Adjacent", "L": "Local", "P": "Physical"},
    "ac": {"L": "Low", "H": "High"},
    "pr": {"N": "None", "L": "Low", "H": "High"},
    "ui": {"N": "None", "R": "Required"},
    "scope": {"U": "Unchanged", "C": "Changed"},
    "cia": {"N": "None", "L": "Low", "H": "High"},
}


def f2(x: float) -> str:
    return f"{display(x, 2):.2f}"


def f1(x: float) -> str:
    return f"{display(x, 1):.1f}"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _markdown(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]

    def fmt(r):
        return "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()

    out = [fmt(cells[0]), "  ".join("-" * w for w in widths)]
    out += [fmt(r) for r in cells[1:]]
    return "\n".join(out) + "\n"


def _tabular(fmt: str, header, rows) -> str:
    if fmt == "csv":
        return _csv(header, rows)
    if fmt == "markdown":
        return _markdown(header, rows)
    return _table(header, rows)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _check(fmt: str):
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def _result_fields(r: ScoreResult) -> dict:
    bd = r.breakdown
    return {
        "iss": bd.iss,
        "impact": bd.impact,
        "exploitability": bd.exploitability,
        "base_score": bd.base_score,
        "si": r.si,
        "probability": r.probability,
        "severity": r.severity,
        "risk": r.risk,
        "display": {
            "base_score": f1(bd.base_score),
            "probability": f2(r.probability),
            "severity": f2(r.severity),
            "risk": f2(r.risk),
        },
    }


def render_score(v: MetricVector, result: ScoreResult, fmt: str = "table", level: int | None = None) -> str:
    """One vector; severity, probability and risk only when ``level`` is given."""
    _check(fmt)
    bd = result.breakdown
    if fmt == "json":
        doc = {"vector": render_vector(v), "level": level, **_result_fields(result)}
        if level is None:
            for k in ("si", "probability", "severity", "risk"):
                doc.pop(k)
                doc["display"].pop(k, None)
        return _json(doc)
    rows = [
        ("vector", render_vector(v)),
        ("iss", f"{bd.iss:.4f}"),
        ("impact", f"{bd.impact:.4f}"),
        ("exploitability", f"{bd.exploitability:.4f}"),
        ("base score", f1(bd.base_score)),
    ]
    if level is not None:
        rows += [
            ("level", str(level)),
            ("si", f"{result.si:g}"),
            ("severity", f2(result.severity)),
            ("probability", f2(result.probability)),
            ("risk", f2(result.risk)),
        ]
    return _tabular(fmt, ("field", "value"), rows)


ASSESS_CSV = ("id", "level", "location", "vector", "base_score", "si", "probability", "severity", "risk")
ASSESS_MD = (
    "No.", "AV", "AC", "PR", "UI", "Confidentiality", "Integrity", "Availability",
    "Scope", "Probability", "Severity", "Risk",
)


def render_report(report: AssessmentReport, fmt: str = "table") -> str:
    _check(fmt)
    if fmt == "json":
        doc = {
            "catalog": report.catalog_name,
            "settings": report.settings.describe(),
            "scenarios": [
                {
                    "id": sc.id,
                    "level": sc.level,
                    "location": sc.location,
                    "title": sc.title,
                    "vector": render_vector(sc.vector),
                    "failure": sc.failure,
                    "consequence": sc.consequence,
                    **_result_fields(r),
                }
                for sc, r in report
            ],
        }
        return _json(doc)
    if fmt == "markdown":
        rows = []
        for sc, r in report:
            v = sc.vector
            rows.append((
                f"#{sc.id}",
                _NAMES["av"][v.av.value], _NAMES["ac"][v.ac.value],
                _NAMES["pr"][v.pr.value], _NAMES["ui"][v.ui.value],
                _NAMES["cia"][v.c.value], _NAMES["cia"][v.i.value], _NAMES["cia"][v.a.value],
                _NAMES["scope"][v.scope.value],
                f2(r.probability), f2(r.severity), f2(r.risk),
            ))
        return _markdown(ASSESS_MD, rows)
    rows = [
        (sc.id, sc.level, sc.location, render_vector(sc.vector), f1(r.base_score),
         f"{r.si:g}", f2(r.probability), f2(r.severity), f2(r.risk))
        for sc, r in report
    ]
    return _tabular(fmt, ASSESS_CSV, rows)


def render_aggregates(
    rows: Sequence[AggregateRow], by: str, fmt: str = "table", ranking: Ranking | None = None
) -> str:
    _check(fmt)
    if fmt == "json":
        doc = {
            "by": by,
            "groups": [
                {
                    "key": r.key,
                    "n": r.n,
                    "mean_severity": r.mean_severity,
                    "mean_risk": r.mean_risk,
                    "display": {"mean_severity": f2(r.mean_severity), "mean_risk": f2(r.mean_risk)},
                }
                for r in rows
            ],
        }
        if ranking is not None:
            doc["ranking"] = {
                "metric": ranking.metric,
                "order": list(ranking.order),
                "ties": [list(t) for t in ranking.ties],
                "text": ranking.format(),
            }
        return _json(doc)
    head = "Level" if by == "level" else "Vulnerable location"
    body = [(format_key(r.key), r.n, f2(r.mean_severity), f2(r.mean_risk)) for r in rows]
    out = _tabular(fmt, (head, "n", "Severity", "Risk"), body)
    if ranking is not None:
        # csv stays machine-readable: ranking goes in a trailing comment line
        prefix = "# " if fmt == "csv" else "\n"
        out += f"{prefix}{ranking.metric} ranking: {ranking.format()}\n"
        if ranking.ties:
            ties = "; ".join("=".join(format_key(k) for k in t) for t in ranking.ties)
            out += f"{'# ' if fmt == 'csv' else ''}ties: {ties}\n"
    return out


AUDIT_HEADER = ("cell", "expected", "computed", "delta", "verdict", "erratum", "status")


def render_audit(findings: Sequence[AuditFinding], fmt: str = "table") -> str:
    _check(fmt)
    summary = summarize(findings)
    if fmt == "json":
        doc = {
            "findings": [
                {
                    "cell": f.cell,
                    "expected": f.expected,
                    "computed": f.computed,
                    "delta": f.delta,
                    "verdict": f.verdict.value,
                    "erratum": f.erratum,
                    "as_flagged": f.as_flagged,
                }
                for f in findings
            ],
            "summary": [s.format() for s in summary],
            "passed": all(f.as_flagged for f in findings),
        }
        return _json(doc)
    rows = [
        (f.cell, f"{f.expected:g}", f"{f.computed:.4f}", f"{f.delta:+.4f}", f.verdict.value,
         "yes" if f.erratum else "no", "ok" if f.as_flagged else "UNEXPECTED")
        for f in findings
    ]
    out = _tabular(fmt, AUDIT_HEADER, rows)
    prefix = "# " if fmt == "csv" else ""
    if fmt != "csv":
        out += "\n"
    out += "".join(f"{prefix}{s.format()}\n" for s in summary)
    return out
