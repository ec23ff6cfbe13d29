"""CVSS v3.1 base metrics: vector strings, weights and the base-score function.

Only the eight base metrics are modelled. Temporal and environmental metrics
are rejected by the parser rather than ignored.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Union

PREFIX = "CVSS:3.1"


class AttackVector(enum.Enum):
    NETWORK = "N"
    ADJACENT = "A"
    LOCAL = "L"
    PHYSICAL = "P"


class AttackComplexity(enum.Enum):
    LOW = "L"
    HIGH = "H"


class PrivilegesRequired(enum.Enum):
    NONE = "N"
    LOW = "L"
    HIGH = "H"


class UserInteraction(enum.Enum):
    NONE = "N"
    REQUIRED = "R"


class Scope(enum.Enum):
    UNCHANGED = "U"
    CHANGED = "C"


class Impact(enum.Enum):
    NONE = "N"
    LOW = "L"
    HIGH = "H"


Metric = Union[
    AttackVector, AttackComplexity, PrivilegesRequired, UserInteraction, Scope, Impact
]

# canonical rendering order; also the set of accepted metric keys
METRIC_TYPES: dict[str, type[enum.Enum]] = {
    "AV": AttackVector,
    "AC": AttackComplexity,
    "PR": PrivilegesRequired,
    "UI": UserInteraction,
    "S": Scope,
    "C": Impact,
    "I": Impact,
    "A": Impact,
}

_FIELDS = {"AV": "av", "AC": "ac", "PR": "pr", "UI": "ui", "S": "scope", "C": "c", "I": "i", "A": "a"}


class VectorError(ValueError):
    """A vector string could not be parsed. ``token`` names the culprit."""

    def __init__(self, token: str, message: str | None = None):
        self.token = token
        super().__init__(message or f"{type(self).__name__} {token}")


class MalformedPrefix(VectorError):
    pass


class UnknownMetric(VectorError):
    pass


class UnknownValue(VectorError):
    pass


class DuplicateMetric(VectorError):
    pass


class MissingMetric(VectorError):
    pass


@dataclass(frozen=True)
class MetricVector:
    av: AttackVector
    ac: AttackComplexity
    pr: PrivilegesRequired
    ui: UserInteraction
    scope: Scope
    c: Impact
    i: Impact
    a: Impact

    def __str__(self) -> str:
        return render_vector(self)


@dataclass(frozen=True)
class ScoreBreakdown:
    iss: float
    impact: float
    exploitability: float
    base_score: float


def parse_vector(text: str) -> MetricVector:
    """Parse ``CVSS:3.1/AV:_/AC:_/PR:_/UI:_/S:_/C:_/I:_/A:_``.

    The eight base metrics may appear in any order after the prefix but each
    exactly once. Codes are case-sensitive single letters.
    """
    prefix, sep, body = text.partition("/")
    if prefix != PREFIX or not sep:
        raise MalformedPrefix(prefix, f"MalformedPrefix {prefix!r}: expected {PREFIX!r}")

    seen: dict[str, enum.Enum] = {}
    for part in body.split("/"):
        key, colon, code = part.partition(":")
        if key not in METRIC_TYPES or not colon:
            raise UnknownMetric(key if colon else part)
        if key in seen:
            raise DuplicateMetric(key)
        try:
            seen[key] = METRIC_TYPES[key](code)
        except ValueError:
            raise UnknownValue(part) from None

    for key in METRIC_TYPES:
        if key not in seen:
            raise MissingMetric(key)
    return MetricVector(**{_FIELDS[k]: v for k, v in seen.items()})


def render_vector(v: MetricVector) -> str:
    parts = [f"{key}:{getattr(v, field).value}" for key, field in _FIELDS.items()]
    return "/".join([PREFIX, *parts])


_AV_W = {
    AttackVector.NETWORK: 0.85,
    AttackVector.ADJACENT: 0.62,
    AttackVector.LOCAL: 0.55,
    AttackVector.PHYSICAL: 0.2,
}
_AC_W = {AttackComplexity.LOW: 0.77, AttackComplexity.HIGH: 0.44}
_PR_W = {
    Scope.UNCHANGED: {
        PrivilegesRequired.NONE: 0.85,
        PrivilegesRequired.LOW: 0.62,
        PrivilegesRequired.HIGH: 0.27,
    },
    Scope.CHANGED: {
        PrivilegesRequired.NONE: 0.85,
        PrivilegesRequired.LOW: 0.68,
        PrivilegesRequired.HIGH: 0.5,
    },
}
_UI_W = {UserInteraction.NONE: 0.85, UserInteraction.REQUIRED: 0.62}
_CIA_W = {Impact.HIGH: 0.56, Impact.LOW: 0.22, Impact.NONE: 0.0}


def weight(value: Metric, scope: Scope = Scope.UNCHANGED) -> float:
    """Numeric weight of one metric value.

    ``scope`` only matters for privileges required. Scope itself has no
    weight and raises ``TypeError``.
    """
    if isinstance(value, AttackVector):
        return _AV_W[value]
    if isinstance(value, AttackComplexity):
        return _AC_W[value]
    if isinstance(value, PrivilegesRequired):
        return _PR_W[scope][value]
    if isinstance(value, UserInteraction):
        return _UI_W[value]
    if isinstance(value, Impact):
        return _CIA_W[value]
    raise TypeError(f"no weight for {value!r}")


def roundup(x: float) -> float:
    """Smallest one-decimal value >= x, immune to binary float noise."""
    n = round(x * 100000)
    if n % 10000 == 0:
        return n / 100000.0
    return (math.floor(n / 10000) + 1) / 10.0


def exploitability_product(v: MetricVector) -> float:
    """AV * AC * PR * UI weights; shared by exploitability and probability."""
    return weight(v.av) * weight(v.ac) * weight(v.pr, v.scope) * weight(v.ui)


def base_score(v: MetricVector) -> ScoreBreakdown:
    iss = 1 - (1 - weight(v.c)) * (1 - weight(v.i)) * (1 - weight(v.a))
    changed = v.scope is Scope.CHANGED
    if changed:
        impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
    else:
        impact = 6.42 * iss
    exploitability = 8.22 * exploitability_product(v)

    if impact <= 0:
        score = 0.0
    elif changed:
        score = roundup(min(1.08 * (impact + exploitability), 10))
    else:
        score = roundup(min(impact + exploitability, 10))
    return ScoreBreakdown(iss, impact, exploitability, score)


def all_vectors():
    """Every one of the 5,184 base-metric combinations."""
    for combo in itertools.product(*(list(t) for t in METRIC_TYPES.values())):
        yield MetricVector(*combo)
