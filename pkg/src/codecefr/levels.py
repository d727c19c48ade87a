"""The six ordered proficiency levels and the arithmetic over them."""

from __future__ import annotations

import enum
from collections.abc import Iterable

from .errors import UnknownLevel

UNRATED = "unrated"

GROUP_DESCRIPTIONS = {
    "A": "Basic user",
    "B": "Independent user",
    "C": "Proficient user",
}

LEVEL_DESCRIPTIONS = {
    "A1": "Breakthrough or beginner",
    "A2": "Waystage or elementary",
    "B1": "Threshold or intermediate",
    "B2": "Vantage or upper intermediate",
    "C1": "Effective operational proficiency or advanced",
    "C2": "Mastery or proficiency",
}


class Level(enum.IntEnum):
    """A proficiency rank; the integer value is the rank (A1=1 ... C2=6)."""

    A1 = 1
    A2 = 2
    B1 = 3
    B2 = 4
    C1 = 5
    C2 = 6

    @property
    def rank(self) -> int:
        return int(self)

    @property
    def label(self) -> str:
        return self.name

    @property
    def group(self) -> LevelGroup:
        return LevelGroup(self.name[0])

    @property
    def description(self) -> str:
        return LEVEL_DESCRIPTIONS[self.name]

    def __str__(self) -> str:
        return self.name


class LevelGroup(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"

    @property
    def label(self) -> str:
        return self.value

    @property
    def description(self) -> str:
        return GROUP_DESCRIPTIONS[self.value]

    @property
    def levels(self) -> tuple[Level, Level]:
        lo, hi = (lv for lv in Level if lv.name[0] == self.value)
        return lo, hi


def parse_level(text: str) -> Level:
    """Return the level whose label matches ``text`` (whitespace and case ignored)."""
    label = text.strip().upper()
    try:
        return Level[label]
    except KeyError:
        raise UnknownLevel(text) from None


def max_level(levels: Iterable[Level]) -> Level | None:
    """Highest level in ``levels``, or ``None`` when there are none."""
    return max(levels, default=None)


def level_label(level: Level | None) -> str:
    return UNRATED if level is None else level.label


def suffices(competency: Level, required: Level) -> bool:
    """Whether someone at ``competency`` can read code rated ``required``."""
    return competency >= required
