"""Attack-scenario catalogs: CSV ingestion, validation and the bundled CSTR case.

Catalog CSV format (UTF-8, ``#`` comment lines allowed before the header)::

    id,level,location,title,vector,failure,consequence

``vector`` holds a CVSS v3.1 base vector string.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from ._csvio import HeaderError, ShapeError, data_text, read_rows
from .cvss import MetricVector, VectorError, parse_vector, render_vector
from .safety import LEVELS
from .taxonomy import Taxonomy, default_taxonomy

HEADER = ("id", "level", "location", "title", "vector", "failure", "consequence")
STRICT, LENIENT = "strict", "lenient"


class CatalogError(ValueError):
    line: int | None = None


class FileUnreadable(CatalogError):
    pass


class BadHeader(CatalogError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(message)


class DuplicateId(ValueError):
    pass


class BadId(ValueError):
    pass


class IdOrder(ValueError):
    pass


class BadLevel(ValueError):
    pass


class EmptyField(ValueError):
    pass


class RowError(CatalogError):
    """A data row failed validation.

    ``line`` is the physical line in the file, ``row`` the 1-based data row
    and ``cause`` the underlying exception.
    """

    def __init__(self, source: str, line: int, row: int | None, cause: Exception):
        self.source, self.line, self.row, self.cause = source, line, row, cause
        super().__init__(f"{source}:{line}: RowError: {type(cause).__name__}: {cause}")


class UnknownLocation(CatalogError):
    def __init__(self, source: str, line: int, location: str):
        self.source, self.line, self.location = source, line, location
        super().__init__(f"{source}:{line}: UnknownLocation {location!r}")


@dataclass(frozen=True)
class AttackScenario:
    id: int
    level: int
    location: str
    title: str
    vector: MetricVector
    failure: str = ""
    consequence: str = ""


@dataclass(frozen=True)
class Catalog:
    name: str
    scenarios: tuple[AttackScenario, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.scenarios:
            raise CatalogError(f"{self.name}: catalog has no scenarios")

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    def get(self, scenario_id: int) -> AttackScenario:
        for s in self.scenarios:
            if s.id == scenario_id:
                return s
        raise KeyError(scenario_id)


def _parse_row(row: dict[str, str]) -> AttackScenario:
    try:
        sid = int(row["id"])
    except ValueError:
        raise BadId(f"id {row['id']!r} is not an integer") from None
    if sid < 1:
        raise BadId(f"id {sid} is not positive")
    try:
        level = int(row["level"])
    except ValueError:
        raise BadLevel(f"level {row['level']!r} is not an integer") from None
    if level not in LEVELS:
        raise BadLevel(f"level {level} outside 0..4")
    for key in ("location", "title"):
        if not row[key]:
            raise EmptyField(f"{key} is empty")
    return AttackScenario(
        sid, level, row["location"], row["title"], parse_vector(row["vector"]),
        row["failure"], row["consequence"],
    )


def parse_catalog(
    text: str,
    name: str = "catalog",
    mode: str = STRICT,
    taxonomy: Taxonomy | None = None,
    source: str | None = None,
) -> Catalog:
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"mode must be {STRICT!r} or {LENIENT!r}, got {mode!r}")
    taxonomy = taxonomy or default_taxonomy()
    source = source or name
    scenarios: list[AttackScenario] = []
    warnings: list[str] = []
    seen: set[int] = set()
    rows = read_rows(text, HEADER, source)
    n = 0
    while True:
        try:
            line, row = next(rows)
        except StopIteration:
            break
        except HeaderError as exc:
            raise BadHeader(str(exc), exc.line) from None
        except ShapeError as exc:
            raise RowError(source, exc.line, n + 1, exc) from None
        except csv.Error as exc:
            raise RowError(source, -1, n + 1, exc) from None
        n += 1
        try:
            sc = _parse_row(row)
            if sc.id in seen:
                raise DuplicateId(f"id {sc.id} already used")
            if scenarios and sc.id < scenarios[-1].id:
                raise IdOrder(f"id {sc.id} follows {scenarios[-1].id}; ids must increase")
        except (VectorError, ValueError) as exc:
            raise RowError(source, line, n, exc) from None
        seen.add(sc.id)
        if not taxonomy.resolve_location(sc.location):
            if mode == STRICT:
                raise UnknownLocation(source, line, sc.location)
            warnings.append(f"{source}:{line}: location {sc.location!r} not in taxonomy")
        scenarios.append(sc)
    if not scenarios:
        raise CatalogError(f"{source}: no scenarios")
    return Catalog(name, tuple(scenarios), tuple(warnings))


def load_catalog(
    path: str | os.PathLike, mode: str = STRICT, taxonomy: Taxonomy | None = None
) -> Catalog:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        reason = getattr(exc, "strerror", None) or str(exc)
        raise FileUnreadable(f"{path}: FileUnreadable ({reason})") from None
    return parse_catalog(text, path.stem, mode, taxonomy, source=str(path))


def builtin_cstr_catalog() -> Catalog:
    return parse_catalog(data_text("cstr.csv"), "cstr", STRICT, source="cstr.csv")


def write_catalog(catalog: Catalog | Iterable[AttackScenario], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(HEADER)
    for s in catalog:
        w.writerow([s.id, s.level, s.location, s.title, render_vector(s.vector), s.failure, s.consequence])


def catalog_to_csv(catalog: Catalog) -> str:
    buf = io.StringIO()
    write_catalog(catalog, buf)
    return buf.getvalue()
