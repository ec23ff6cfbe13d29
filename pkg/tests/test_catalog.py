import io
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from icsrisk.catalog import (
    BadHeader,
    BadLevel,
    Catalog,
    CatalogError,
    DuplicateId,
    FileUnreadable,
    IdOrder,
    RowError,
    UnknownLocation,
    builtin_cstr_catalog,
    catalog_to_csv,
    load_catalog,
    parse_catalog,
    write_catalog,
)
from icsrisk.cvss import AttackComplexity, UnknownValue, all_vectors, render_vector

HEADER = "id,level,location,title,vector,failure,consequence\n"
V = "CVSS:3.1/AV:N/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H"


def test_builtin_has_30_in_order():
    cat = builtin_cstr_catalog()
    assert [s.id for s in cat] == list(range(1, 31))
    assert cat.name == "cstr"


def test_builtin_level_counts():
    counts = Counter(s.level for s in builtin_cstr_catalog())
    assert counts == {0: 2, 1: 12, 2: 14, 3: 1, 4: 1}


def test_builtin_row10():
    s = builtin_cstr_catalog().get(10)
    assert (s.level, s.location, s.title) == (1, "PLC", "Modify the setpoint of level/temperature")
    assert render_vector(s.vector) == "CVSS:3.1/AV:A/AC:H/PR:H/UI:N/S:U/C:L/I:H/A:L"


def test_builtin_row12():
    s = builtin_cstr_catalog().get(12)
    assert s.location == "SIS"
    assert s.failure == "SIS malfunction"


def test_low_complexity_rows_below_level3():
    low = [s.id for s in builtin_cstr_catalog() if s.level < 3 and s.vector.ac is AttackComplexity.LOW]
    assert low == [23, 24]


def test_row25_transcribed_as_printed():
    assert render_vector(builtin_cstr_catalog().get(25).vector) == "CVSS:3.1/AV:N/AC:H/PR:N/UI:R/S:U/C:N/I:L/A:L"


def test_builtin_passes_strict():
    assert builtin_cstr_catalog().warnings == ()


def test_duplicate_id():
    text = HEADER + f"1,2,HMI,a,{V},,\n1,2,HMI,b,{V},,\n"
    with pytest.raises(RowError) as info:
        parse_catalog(text, source="dup.csv")
    err = info.value
    assert isinstance(err.cause, DuplicateId)
    assert (err.row, err.line) == (2, 3)
    assert "dup.csv:3" in str(err)


def test_bad_level():
    with pytest.raises(RowError) as info:
        parse_catalog(HEADER + f"1,9,HMI,a,{V},,\n")
    assert isinstance(info.value.cause, BadLevel)
    assert info.value.line == 2


def test_ids_must_increase():
    with pytest.raises(RowError) as info:
        parse_catalog(HEADER + f"2,2,HMI,a,{V},,\n1,2,HMI,b,{V},,\n")
    assert isinstance(info.value.cause, IdOrder)


def test_vector_error_wrapped_with_line():
    text = "# comment\n" + HEADER + f"1,2,HMI,a,{V.replace('AV:N', 'AV:X')},,\n"
    with pytest.raises(RowError) as info:
        parse_catalog(text)
    assert isinstance(info.value.cause, UnknownValue)
    assert info.value.line == 3
    assert "AV:X" in str(info.value)


def test_bad_header():
    with pytest.raises(BadHeader):
        parse_catalog("id,level,location\n1,2,HMI\n")


def test_wrong_cell_count():
    with pytest.raises(RowError, match=":2:"):
        parse_catalog(HEADER + "1,2,HMI\n")


def test_empty_catalog():
    with pytest.raises(CatalogError):
        parse_catalog(HEADER)


def test_unknown_location_strict_vs_lenient():
    text = HEADER + f"1,2,HMI,a,{V},,\n2,2,Flux capacitor,b,{V},,\n"
    with pytest.raises(UnknownLocation) as info:
        parse_catalog(text)
    assert info.value.line == 3
    cat = parse_catalog(text, mode="lenient")
    assert len(cat) == 2
    assert len(cat.warnings) == 1 and "Flux capacitor" in cat.warnings[0]


def test_file_unreadable(tmp_path):
    with pytest.raises(FileUnreadable):
        load_catalog(tmp_path / "missing.csv")


def test_quoted_fields_and_utf8(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text(HEADER + f'1,0,Sensor,"spoof, then flood (Überlauf) twice",{V},"a, b","x\ny"\n', encoding="utf-8")
    s = load_catalog(p).get(1)
    assert s.title == "spoof, then flood (Überlauf) twice"
    assert s.consequence == "x\ny"


def test_builtin_write_load_roundtrip(tmp_path):
    cat = builtin_cstr_catalog()
    p = tmp_path / "cstr.csv"
    p.write_text(catalog_to_csv(cat), encoding="utf-8")
    again = load_catalog(p)
    assert again.scenarios == cat.scenarios


_text = st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1).filter(
    lambda s: s.strip() == s and s.strip()
)


@settings(max_examples=60)
@given(
    st.lists(
        st.tuples(st.integers(0, 4), st.sampled_from(list(all_vectors())), _text, st.just("") | _text),
        min_size=1,
        max_size=6,
    )
)
def test_write_load_roundtrip_property(rows):
    from icsrisk.catalog import AttackScenario

    scenarios = tuple(
        AttackScenario(i + 1, level, "HMI", title, v, failure, "")
        for i, (level, v, title, failure) in enumerate(rows)
    )
    buf = io.StringIO()
    write_catalog(Catalog("x", scenarios), buf)
    back = parse_catalog(buf.getvalue(), "x")
    assert back.scenarios == scenarios
