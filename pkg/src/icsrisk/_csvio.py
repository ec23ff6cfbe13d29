from __future__ import annotations

import csv
import io
from importlib import resources
from typing import Iterator, Sequence


def data_text(name: str) -> str:
    return resources.files("icsrisk").joinpath("data", name).read_text(encoding="utf-8")


class HeaderError(ValueError):
    def __init__(self, source: str, line: int, got: Sequence[str], want: Sequence[str]):
        self.source, self.line = source, line
        super().__init__(
            f"{source}:{line}: BadHeader: expected {','.join(want)!r}, got {','.join(got)!r}"
        )


class ShapeError(ValueError):
    def __init__(self, line: int, got: int, want: int):
        self.line = line
        super().__init__(f"expected {want} cells, got {got}")


def read_rows(text: str, header: Sequence[str], source: str) -> Iterator[tuple[int, dict[str, str]]]:
    """Yield ``(line_number, row)`` pairs from a commented CSV document.

    Lines starting with ``#`` before the header are skipped and the header
    must equal ``header`` exactly. Blank rows are ignored.
    """
    lines = text.splitlines(keepends=True)
    skip = 0
    while skip < len(lines) and (lines[skip].startswith("#") or not lines[skip].strip()):
        skip += 1
    reader = csv.reader(io.StringIO("".join(lines[skip:])))
    try:
        got = next(reader)
    except StopIteration:
        raise HeaderError(source, skip + 1, [], header) from None
    if [h.strip() for h in got] != list(header):
        raise HeaderError(source, skip + 1, got, header)

    line = reader.line_num
    for row in reader:
        # line_num counts physical lines, so a quoted multi-line cell reports its first line
        first, line = line + 1, reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ShapeError(skip + first, len(row), len(header))
        yield skip + first, dict(zip(header, (cell.strip() for cell in row)))
