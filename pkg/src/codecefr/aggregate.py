"""Fold occurrences into file and unit reports.

The required level of any scope is the highest level found in it; a scope
with no occurrences is *unrated* (``None``), never A1.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from .detector import Occurrence
from .levels import Level, max_level
from .parsing import ParseFailure


@dataclass(frozen=True)
class LevelHistogram(Mapping[Level, int]):
    """Count per level; all six levels are always present."""

    counts: tuple[int, ...] = (0, 0, 0, 0, 0, 0)

    def __post_init__(self) -> None:
        if len(self.counts) != len(Level) or any(c < 0 for c in self.counts):
            raise ValueError(f"invalid histogram counts {self.counts!r}")

    @classmethod
    def of(cls, levels: Iterable[Level]) -> LevelHistogram:
        counts = [0] * len(Level)
        for lv in levels:
            counts[lv.rank - 1] += 1
        return cls(tuple(counts))

    @classmethod
    def from_mapping(cls, counts: Mapping[Level, int]) -> LevelHistogram:
        return cls(tuple(counts.get(lv, 0) for lv in Level))

    def __getitem__(self, level: Level) -> int:
        return self.counts[Level(level).rank - 1]

    def __iter__(self) -> Iterator[Level]:
        return iter(Level)

    def __len__(self) -> int:
        return len(Level)

    def __add__(self, other: LevelHistogram) -> LevelHistogram:
        if not isinstance(other, LevelHistogram):
            return NotImplemented
        return LevelHistogram(tuple(a + b for a, b in zip(self.counts, other.counts)))

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def highest(self) -> Level | None:
        return max_level(lv for lv in Level if self[lv])


@dataclass(frozen=True)
class FileReport:
    path: str
    occurrences: tuple[Occurrence, ...]
    histogram: LevelHistogram
    required_level: Level | None
    parse_failure: ParseFailure | None = None

    @property
    def failed(self) -> bool:
        return self.parse_failure is not None


@dataclass(frozen=True)
class UnitReport:
    name: str
    file_reports: tuple[FileReport, ...]
    histogram: LevelHistogram
    required_level: Level | None
    files_failed: int = 0

    @property
    def occurrence_count(self) -> int:
        return self.histogram.total


def summarize_file(
    path: str, occurrences: Iterable[Occurrence], failure: ParseFailure | None = None
) -> FileReport:
    occurrences = tuple(occurrences)
    if failure is not None and occurrences:
        raise ValueError(f"{path}: a failed parse cannot have occurrences")
    levels = [o.level for o in occurrences]
    return FileReport(path, occurrences, LevelHistogram.of(levels), max_level(levels), failure)


def summarize_unit(name: str, file_reports: Iterable[FileReport]) -> UnitReport:
    reports = tuple(sorted(file_reports, key=lambda r: r.path))
    histogram = sum((r.histogram for r in reports), LevelHistogram())
    required = max_level(r.required_level for r in reports if r.required_level is not None)
    failed = sum(1 for r in reports if r.failed)
    return UnitReport(name, reports, histogram, required, failed)
