"""Vulnerable locations by PERA level and the control-loop attack frame.

Both tables ship as CSV files under ``icsrisk/data`` and can be replaced by
user files with the same columns, since the location list is meant to grow.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from ._csvio import data_text, read_rows
from .safety import LEVELS, UnknownLevel, check_level

TAXONOMY_HEADER = ("level", "name", "similar")
FRAME_HEADER = ("component", "vector", "template")

_PAREN = re.compile(r"^(?P<head>.*?)\s*\((?P<inner>[^()]*)\)\s*(?P<tail>.*)$")


class Component(enum.Enum):
    SENSOR = "Sensor"
    ACTUATOR = "Actuator"
    CONTROLLER = "Controller"
    NETWORK = "Network"


class UnknownComponent(ValueError):
    pass


class TaxonomyError(ValueError):
    pass


def match_keys(text: str) -> set[str]:
    """Casefolded strings that should resolve to ``text``.

    ``"Remote Terminal Unit (RTU)"`` yields the full text, the head and
    ``"rtu"``; a parenthesised list such as ``"server (mail server, web
    server)"`` yields each list item. ``etc.`` is dropped. A trailing word
    after an abbreviation is kept: ``"Open Platform Communication (OPC)
    server"`` also yields ``"opc server"``.
    """
    text = " ".join(text.split())
    keys = {text.casefold()}
    m = _PAREN.match(text)
    if not m:
        return keys
    head, tail = m["head"], m["tail"]
    items = [i.strip() for i in m["inner"].split(",")]
    items = [i for i in items if i and i.casefold() not in ("etc", "etc.")]
    if tail:
        keys.add(f"{head} {tail}".strip().casefold())
        if len(items) == 1:
            keys.add(f"{items[0]} {tail}".casefold())
    else:
        if head:
            keys.add(head.casefold())
        keys.update(i.casefold() for i in items)
    return keys


@dataclass(frozen=True)
class VulnerableLocation:
    name: str
    level: int
    similar: tuple[str, ...] = ()

    def keys(self) -> set[str]:
        out = match_keys(self.name)
        for alias in self.similar:
            out |= match_keys(alias)
        return out


@dataclass(frozen=True)
class AttackFrameEntry:
    component: Component
    vector: str
    scenario_template: str

    @property
    def templates(self) -> tuple[str, ...]:
        return tuple(t.strip() for t in self.scenario_template.split("; "))


@dataclass(frozen=True)
class Taxonomy:
    locations: tuple[VulnerableLocation, ...]
    frame: tuple[AttackFrameEntry, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        index: dict[str, list[VulnerableLocation]] = {}
        for loc in self.locations:
            check_level(loc.level)
            key = (loc.name.casefold(), loc.level)
            if key in seen:
                raise TaxonomyError(f"duplicate location {loc.name!r} at level {loc.level}")
            seen.add(key)
            for k in loc.keys():
                index.setdefault(k, []).append(loc)
        object.__setattr__(self, "_index", index)

    def locations_for_level(self, level: int) -> list[VulnerableLocation]:
        level = check_level(level)
        return [loc for loc in self.locations if loc.level == level]

    def resolve_location(self, name: str) -> list[tuple[VulnerableLocation, int]]:
        """All ``(location, level)`` pairs whose name or alias equals ``name``.

        Matching is whole-string and case-insensitive; "motor" never matches
        "motorola".
        """
        hits: list[VulnerableLocation] = []
        for k in match_keys(name) if name.strip() else ():
            for loc in self._index.get(k, ()):
                if loc not in hits:
                    hits.append(loc)
        # keep printed order
        hits.sort(key=self.locations.index)
        return [(loc, loc.level) for loc in hits]

    def attack_frame(self, component: Component | str) -> list[AttackFrameEntry]:
        if not isinstance(component, Component):
            try:
                component = Component(str(component).strip().capitalize())
            except ValueError:
                raise UnknownComponent(f"UnknownComponent {component!r}") from None
        return [e for e in self.frame if e.component is component]


def parse_taxonomy(text: str, source: str = "<taxonomy>") -> tuple[VulnerableLocation, ...]:
    out = []
    try:
        for line, row in read_rows(text, TAXONOMY_HEADER, source):
            try:
                level = int(row["level"])
            except ValueError:
                raise TaxonomyError(f"{source}:{line}: bad level {row['level']!r}") from None
            if level not in LEVELS:
                raise TaxonomyError(f"{source}:{line}: {UnknownLevel(level)}")
            similar = tuple(s.strip() for s in row["similar"].split(";") if s.strip())
            out.append(VulnerableLocation(row["name"], level, similar))
    except ValueError as exc:
        if isinstance(exc, TaxonomyError):
            raise
        raise TaxonomyError(str(exc)) from None
    return tuple(out)


def parse_attack_frame(text: str, source: str = "<attack-frame>") -> tuple[AttackFrameEntry, ...]:
    out = []
    for line, row in read_rows(text, FRAME_HEADER, source):
        try:
            comp = Component(row["component"])
        except ValueError:
            raise UnknownComponent(f"{source}:{line}: UnknownComponent {row['component']!r}") from None
        out.append(AttackFrameEntry(comp, row["vector"], row["template"]))
    return tuple(out)


def load_taxonomy(
    locations: str | os.PathLike | None = None, frame: str | os.PathLike | None = None
) -> Taxonomy:
    """Load a taxonomy; either file defaults to the bundled copy."""
    loc_text = data_text("taxonomy.csv") if locations is None else Path(locations).read_text("utf-8")
    frame_text = data_text("attack_frame.csv") if frame is None else Path(frame).read_text("utf-8")
    return Taxonomy(
        parse_taxonomy(loc_text, str(locations or "taxonomy.csv")),
        parse_attack_frame(frame_text, str(frame or "attack_frame.csv")),
    )


@lru_cache(maxsize=None)
def default_taxonomy() -> Taxonomy:
    return load_taxonomy()


def locations_for_level(level: int) -> list[VulnerableLocation]:
    return default_taxonomy().locations_for_level(level)


def resolve_location(name: str) -> list[tuple[VulnerableLocation, int]]:
    return default_taxonomy().resolve_location(name)


def attack_frame(component: Component | str) -> list[AttackFrameEntry]:
    return default_taxonomy().attack_frame(component)
