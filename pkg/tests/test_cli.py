import csv
import io
import json

import pytest
from click.testing import CliRunner

from icsrisk.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return invoke


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_score_with_level(run):
    r = run("score", "CVSS:3.1/AV:A/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H", "--level", "1", "--format", "csv")
    assert r.exit_code == 0
    got = {row["field"]: row["value"] for row in rows_of(r.output)}
    assert (got["base score"], got["severity"], got["probability"], got["risk"]) == ("6.4", "5.76", "0.13", "0.76")


def test_score_zero_impact(run):
    r = run("score", "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N")
    assert r.exit_code == 0
    assert "base score      0.0" in r.output
    assert "severity" not in r.output


def test_score_bad_value(run):
    r = run("score", "CVSS:3.1/AV:X/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H")
    assert r.exit_code == 2
    assert "UnknownValue AV:X" in r.output


def test_score_bad_level(run):
    r = run("score", "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", "--level", "9")
    assert r.exit_code == 2
    assert "UnknownLevel 9" in r.output


def test_score_json(run):
    r = run("score", "CVSS:3.1/AV:N/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H", "--level", "2", "--format", "json")
    doc = json.loads(r.output)
    assert doc["base_score"] == 6.6
    assert doc["display"]["severity"] == "5.28"
    assert doc["risk"] == pytest.approx(0.9562, abs=1e-4)


def test_assess_csv_30_rows(run):
    r = run("assess", "--builtin-cstr", "--format", "csv")
    assert r.exit_code == 0
    rows = rows_of(r.output)
    assert len(rows) == 30
    row24 = rows[23]
    assert (row24["id"], row24["probability"], row24["severity"], row24["risk"]) == ("24", "0.53", "5.44", "2.89")


def test_assess_paper_compat(run):
    rows = rows_of(run("assess", "--builtin-cstr", "--paper-compat", "--format", "csv").output)
    assert (rows[0]["probability"], rows[0]["risk"]) == ("0.13", "0.36")


def test_assess_missing_file(run, tmp_path):
    r = run("assess", str(tmp_path / "missing.csv"))
    assert r.exit_code == 2
    assert "FileUnreadable" in r.output


def test_assess_row_error_names_line(run, tmp_path):
    p = tmp_path / "c.csv"
    v = "CVSS:3.1/AV:N/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H"
    p.write_text(f"id,level,location,title,vector,failure,consequence\n1,2,HMI,a,{v},,\n1,2,HMI,b,{v},,\n")
    r = run("assess", str(p))
    assert r.exit_code == 2
    assert f"{p}:3" in r.output and "DuplicateId" in r.output


def test_assess_needs_source(run):
    assert run("assess").exit_code == 2


def test_json_and_csv_agree(run):
    rows = rows_of(run("assess", "--builtin-cstr", "--format", "csv").output)
    doc = json.loads(run("assess", "--builtin-cstr", "--format", "json").output)
    assert len(doc["scenarios"]) == 30
    for row, sc in zip(rows, doc["scenarios"]):
        assert int(row["id"]) == sc["id"]
        for k in ("probability", "severity", "risk", "base_score"):
            assert row[k] == sc["display"][k]
        assert isinstance(sc["risk"], float)


def test_markdown_column_layout(run):
    out = run("assess", "--builtin-cstr", "--format", "markdown").output
    lines = out.splitlines()
    assert lines[0] == (
        "| No. | AV | AC | PR | UI | Confidentiality | Integrity | Availability | Scope "
        "| Probability | Severity | Risk |"
    )
    assert lines[2] == "| #1 | Physical | High | High | None | None | Low | Low | Unchanged | 0.04 | 2.70 | 0.12 |"
    assert len(lines) == 32


def test_output_is_deterministic(run):
    for fmt in ("table", "csv", "json", "markdown"):
        assert run("assess", "--builtin-cstr", "--format", fmt).output == run(
            "assess", "--builtin-cstr", "--format", fmt
        ).output


def test_aggregate_rank_risk_compat(run):
    r = run("aggregate", "--builtin-cstr", "--by", "level", "--rank", "risk", "--paper-compat")
    assert "Level 2>Level 3>Level 1>Level 0>Level 4" in r.output


def test_aggregate_rank_severity(run):
    r = run("aggregate", "--builtin-cstr", "--by", "level", "--rank", "severity")
    assert "Level 1>Level 2>Level 0>Level 3>Level 4" in r.output


def test_aggregate_by_location(run):
    r = run("aggregate", "--builtin-cstr", "--by", "location", "--format", "csv")
    rows = [row for row in rows_of(r.output)]
    hmi = next(row for row in rows if row["Vulnerable location"] == "HMI")
    assert (hmi["Severity"], hmi["Risk"]) == ("4.77", "0.82")


def test_aggregate_json_ranking(run):
    doc = json.loads(run("aggregate", "--builtin-cstr", "--by", "location", "--rank", "risk", "--format", "json").output)
    assert doc["ranking"]["order"][0] == "Engineering workstation"
    assert ["Management network", "Network switch"] in doc["ranking"]["ties"]


def test_audit_builtin_exits_zero(run):
    r = run("audit", "--builtin-cstr", "--builtin-expected")
    assert r.exit_code == 0
    assert "severity 29/30 match, 1 known erratum" in r.output


def test_audit_forced_mismatch_exits_one(run, tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("table,ref,metric,expected,erratum\n5,15,severity,9.9,false\n")
    r = run("audit", "--builtin-cstr", "--expected", str(p))
    assert r.exit_code == 1
    assert "UNEXPECTED" in r.output


def test_audit_unknown_reference_exits_two(run, tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("table,ref,metric,expected,erratum\n5,99,severity,1.0,false\n")
    r = run("audit", "--builtin-cstr", "--expected", str(p))
    assert r.exit_code == 2
    assert "UnknownReference" in r.output


def test_audit_needs_one_expectation_source(run):
    assert run("audit", "--builtin-cstr").exit_code == 2


def test_si_table_flag_and_env(run, tmp_path):
    p = tmp_path / "si.csv"
    p.write_text("0,1\n1,0.5\n2,0.4\n3,0.2\n4,0.1\n")
    vec = "CVSS:3.1/AV:N/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H"
    by_flag = run("score", vec, "--level", "2", "--si-table", str(p), "--format", "json").output
    by_env = run("score", vec, "--level", "2", "--format", "json", env={"ICSRISK_SI_TABLE": str(p)}).output
    assert json.loads(by_flag)["severity"] == pytest.approx(0.4 * 6.6)
    assert by_flag == by_env


def test_invalid_si_table_exits_two(run, tmp_path):
    p = tmp_path / "si.csv"
    p.write_text("0,1\n1,0.9\n2,0.95\n3,0.1\n4,0.05\n")
    r = run("assess", "--builtin-cstr", "--si-table", str(p))
    assert r.exit_code == 2
    assert "strictly decrease" in r.output


def test_v2_model_without_mapping_exits_two(run):
    r = run("assess", "--builtin-cstr", "--model", "v2")
    assert r.exit_code == 2
    assert "v2_mapping" in r.output


def test_v2_model_with_map(run, tmp_path):
    p = tmp_path / "v2.csv"
    p.write_text("id,av,ac,au\n" + "".join(f"{i},network,low,none\n" for i in range(1, 31)))
    rows = rows_of(run("assess", "--builtin-cstr", "--model", "v2", "--v2-map", str(p), "--format", "csv").output)
    assert {row["probability"] for row in rows} == {"1.00"}
