"""``icsrisk`` command line: score, assess, aggregate, audit.

Exit codes: 0 success, 1 audit failure, 2 usage or input error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import analysis
from ._csvio import HeaderError, ShapeError, read_rows
from .analysis import Settings
from .catalog import STRICT, LENIENT, CatalogError, builtin_cstr_catalog, load_catalog
from .cvss import VectorError, parse_vector
from .render import FORMATS, render_aggregates, render_audit, render_report, render_score
from .safety import (
    AccessComplexity2,
    AccessVector2,
    Authentication2,
    InvalidSiTable,
    UnknownLevel,
    load_si_table,
    score,
)

INPUT_ERRORS = (
    CatalogError, VectorError, InvalidSiTable, UnknownLevel, analysis.InvalidSettings,
    analysis.UnknownReference, analysis.ExpectationsError,
)

format_option = click.option(
    "--format", "fmt", type=click.Choice(FORMATS), default="table", show_default=True
)
si_option = click.option(
    "--si-table",
    type=click.Path(dir_okay=False, path_type=Path),
    envvar="ICSRISK_SI_TABLE",
    help="level,si CSV overriding the default safety-impact weights [env: ICSRISK_SI_TABLE]",
)


def fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def catalog_options(f):
    f = click.option("--lenient", is_flag=True, help="keep scenarios whose location is not in the taxonomy")(f)
    f = click.option("--builtin-cstr", is_flag=True, help="use the bundled 30-scenario CSTR catalog")(f)
    f = click.argument("catalog_path", required=False, type=click.Path(path_type=Path))(f)
    return f


def settings_options(f):
    f = si_option(f)
    f = click.option("--v2-map", type=click.Path(dir_okay=False, path_type=Path),
                     help="id,av,ac,au CSV of CVSS v2 inputs (required with --model v2)")(f)
    f = click.option("--paper-compat", is_flag=True,
                     help="weight a Physical attack vector as Adjacent in the probability model")(f)
    f = click.option("--model", type=click.Choice([analysis.V31, analysis.V2]), default=analysis.V31,
                     show_default=True, help="exploit probability model")(f)
    return f


def _load_catalog(catalog_path, builtin_cstr, lenient):
    if builtin_cstr and catalog_path:
        raise click.UsageError("give a catalog path or --builtin-cstr, not both")
    if builtin_cstr:
        return builtin_cstr_catalog()
    if catalog_path is None:
        raise click.UsageError("missing catalog path (or --builtin-cstr)")
    cat = load_catalog(catalog_path, LENIENT if lenient else STRICT)
    for w in cat.warnings:
        click.echo(f"warning: {w}", err=True)
    return cat


def load_v2_map(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise analysis.InvalidSettings(f"{path}: cannot read ({exc.strerror})") from None
    out = {}
    try:
        for line, row in read_rows(text, ("id", "av", "ac", "au"), str(path)):
            try:
                out[int(row["id"])] = (
                    AccessVector2[row["av"].upper()],
                    AccessComplexity2[row["ac"].upper()],
                    Authentication2[row["au"].upper()],
                )
            except (KeyError, ValueError) as exc:
                raise analysis.InvalidSettings(f"{path}:{line}: bad value {exc}") from None
    except (HeaderError, ShapeError) as exc:
        raise analysis.InvalidSettings(f"{path}: {exc}") from None
    return out


def _settings(model, paper_compat, v2_map, si_table) -> Settings:
    kwargs = {"model": model, "paper_compat": paper_compat}
    if si_table:
        kwargs["si_table"] = load_si_table(si_table)
    if v2_map:
        kwargs["v2_mapping"] = load_v2_map(v2_map)
    return Settings(**kwargs)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Safety-weighted CVSS risk assessment for industrial control systems."""


@main.command("score")
@click.argument("vector")
@click.option("--level", type=int, help="PERA level 0-4; adds severity, probability and risk")
@click.option("--paper-compat", is_flag=True)
@si_option
@format_option
def cmd_score(vector, level, paper_compat, si_table, fmt):
    """Score one CVSS v3.1 base vector."""
    try:
        v = parse_vector(vector)
        table = load_si_table(si_table) if si_table else None
        result = score(v, 0 if level is None else level, table=table, paper_compat=paper_compat)
    except INPUT_ERRORS as exc:
        fail(str(exc))
    click.echo(render_score(v, result, fmt, level), nl=False)


@main.command("assess")
@catalog_options
@settings_options
@format_option
def cmd_assess(catalog_path, builtin_cstr, lenient, model, paper_compat, v2_map, si_table, fmt):
    """Score every scenario of a catalog."""
    try:
        cat = _load_catalog(catalog_path, builtin_cstr, lenient)
        report = analysis.assess(cat, _settings(model, paper_compat, v2_map, si_table))
    except INPUT_ERRORS as exc:
        fail(str(exc))
    click.echo(render_report(report, fmt), nl=False)


@main.command("aggregate")
@catalog_options
@settings_options
@click.option("--by", type=click.Choice([analysis.LEVEL, analysis.LOCATION]), default=analysis.LEVEL,
              show_default=True)
@click.option("--rank", "rank_by", type=click.Choice([analysis.SEVERITY, analysis.RISK]))
@format_option
def cmd_aggregate(catalog_path, builtin_cstr, lenient, model, paper_compat, v2_map, si_table, by, rank_by, fmt):
    """Mean severity and risk per level or per location."""
    try:
        cat = _load_catalog(catalog_path, builtin_cstr, lenient)
        report = analysis.assess(cat, _settings(model, paper_compat, v2_map, si_table))
    except INPUT_ERRORS as exc:
        fail(str(exc))
    rows = analysis.aggregate(report, by)
    ranking = analysis.rank(rows, rank_by) if rank_by else None
    click.echo(render_aggregates(rows, by, fmt, ranking), nl=False)


@main.command("audit")
@catalog_options
@settings_options
@click.option("--expected", type=click.Path(dir_okay=False, path_type=Path),
              help="table,ref,metric,expected,erratum CSV")
@click.option("--builtin-expected", is_flag=True, help="use the bundled CSTR published values")
@click.option("--table6-source", type=click.Choice([analysis.PUBLISHED, analysis.COMPUTED]),
              default=analysis.PUBLISHED, show_default=True,
              help="recompute table 6 means from published table 5 values or from this run")
@format_option
def cmd_audit(catalog_path, builtin_cstr, lenient, model, paper_compat, v2_map, si_table,
              expected, builtin_expected, table6_source, fmt):
    """Compare computed values with published ones; exit 1 on unexpected verdicts."""
    if bool(expected) == builtin_expected:
        raise click.UsageError("give exactly one of --expected or --builtin-expected")
    try:
        cat = _load_catalog(catalog_path, builtin_cstr, lenient)
        report = analysis.assess(cat, _settings(model, paper_compat, v2_map, si_table))
        exp = analysis.builtin_expectations() if builtin_expected else analysis.load_expectations(expected)
        findings = analysis.audit(report, exp, table6_source)
    except INPUT_ERRORS as exc:
        fail(str(exc))
    click.echo(render_audit(findings, fmt), nl=False)
    sys.exit(0 if analysis.audit_passed(findings) else 1)


if __name__ == "__main__":
    main()
