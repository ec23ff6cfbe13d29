"""Safety-impact weighting, exploit probability, severity and risk."""

from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .cvss import (
    AttackVector,
    MetricVector,
    ScoreBreakdown,
    base_score,
    exploitability_product,
    weight,
)

LEVELS = (0, 1, 2, 3, 4)

DEFAULT_SI: Mapping[int, float] = MappingProxyType({0: 1.0, 1: 0.9, 2: 0.8, 3: 0.1, 4: 0.05})

# normalises the largest AV*AC*PR*UI product to just under 1
V31_SCALE = 2.11


class UnknownLevel(ValueError):
    def __init__(self, level):
        self.level = level
        super().__init__(f"UnknownLevel {level!r}: expected one of {LEVELS}")


class InvalidSiTable(ValueError):
    pass


def check_level(level) -> int:
    if isinstance(level, bool) or not isinstance(level, int) or level not in LEVELS:
        raise UnknownLevel(level)
    return level


def validate_si_table(table: Mapping[int, float]) -> Mapping[int, float]:
    """Return an immutable copy of ``table`` or raise InvalidSiTable."""
    missing = [lvl for lvl in LEVELS if lvl not in table]
    if missing:
        raise InvalidSiTable(f"missing level(s) {missing}")
    extra = sorted(set(table) - set(LEVELS))
    if extra:
        raise InvalidSiTable(f"unknown level(s) {extra}")
    for lvl in LEVELS:
        si = table[lvl]
        if not 0 < si <= 1:
            raise InvalidSiTable(f"level {lvl}: si {si} outside (0, 1]")
    for lo, hi in zip(LEVELS, LEVELS[1:]):
        if not table[hi] < table[lo]:
            raise InvalidSiTable(
                f"si must strictly decrease with level: level {hi} ({table[hi]}) "
                f">= level {lo} ({table[lo]})"
            )
    return MappingProxyType({lvl: float(table[lvl]) for lvl in LEVELS})


def parse_si_table(text: str, source: str = "<si-table>") -> Mapping[int, float]:
    """Parse ``level,si`` lines. Blank lines and ``#`` comments are skipped."""
    table: dict[int, float] = {}
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise InvalidSiTable(f"{source}:{lineno}: expected 'level,si', got {row!r}")
        try:
            lvl, si = int(row[0]), float(row[1])
        except ValueError:
            raise InvalidSiTable(f"{source}:{lineno}: not numeric: {row!r}") from None
        if lvl in table:
            raise InvalidSiTable(f"{source}:{lineno}: level {lvl} given twice")
        table[lvl] = si
    try:
        return validate_si_table(table)
    except InvalidSiTable as exc:
        raise InvalidSiTable(f"{source}: {exc}") from None


def load_si_table(path: str | os.PathLike) -> Mapping[int, float]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidSiTable(f"{path}: cannot read ({exc.strerror})") from None
    return parse_si_table(text, str(path))


def safety_impact(level: int, table: Mapping[int, float] | None = None) -> float:
    level = check_level(level)
    if table is None:
        return DEFAULT_SI[level]
    return validate_si_table(table)[level]


def probability_v31(v: MetricVector, paper_compat: bool = False) -> float:
    """Exploit probability from the v3.1 exploitability weights.

    With ``paper_compat`` the Physical attack vector is weighted as Adjacent,
    which is what the published CSTR table evidently did.
    """
    p = V31_SCALE * exploitability_product(v)
    if paper_compat and v.av is AttackVector.PHYSICAL:
        p *= weight(AttackVector.ADJACENT) / weight(AttackVector.PHYSICAL)
    return p


class AccessVector2(enum.Enum):
    LOCAL = 0.395
    ADJACENT = 0.646
    NETWORK = 1.0


class AccessComplexity2(enum.Enum):
    HIGH = 0.35
    MEDIUM = 0.61
    LOW = 0.71


class Authentication2(enum.Enum):
    MULTIPLE = 0.45
    SINGLE = 0.56
    NONE = 0.704


def probability_v2(av: AccessVector2, ac: AccessComplexity2, au: Authentication2) -> float:
    """The older CVSS v2 relative likelihood, 2 * AV * AC * Au."""
    return 2 * av.value * ac.value * au.value


def severity(v: MetricVector, level: int, table: Mapping[int, float] | None = None) -> float:
    return safety_impact(level, table) * base_score(v).base_score


def risk(probability: float, severity: float) -> float:
    return probability * severity


def display(x: float, places: int = 2) -> float:
    """Half-up rounding for presentation (``round`` is half-even)."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ScoreResult:
    scenario_id: int | None
    breakdown: ScoreBreakdown
    si: float
    severity: float
    probability: float
    risk: float

    @property
    def base_score(self) -> float:
        return self.breakdown.base_score


def score(
    v: MetricVector,
    level: int,
    *,
    scenario_id: int | None = None,
    table: Mapping[int, float] | None = None,
    probability: float | None = None,
    paper_compat: bool = False,
) -> ScoreResult:
    """Score one vulnerability at a PERA level.

    ``probability`` overrides the v3.1 model (used for the v2 model).
    """
    bd = base_score(v)
    si = safety_impact(level, table)
    sev = si * bd.base_score
    p = probability_v31(v, paper_compat) if probability is None else probability
    return ScoreResult(scenario_id, bd, si, sev, p, risk(p, sev))
