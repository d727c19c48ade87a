"""Run parse + detect over many files and fold the results per unit."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat

from .aggregate import FileReport, UnitReport, summarize_file, summarize_unit
from .catalog import LevelMapping, default_mapping
from .detector import RULE_IDS, detect
from .parsing import ParseFailure, SourceFile, parse_source


def analyze_file(source: SourceFile, mapping: LevelMapping) -> FileReport:
    tree = parse_source(source)
    if isinstance(tree, ParseFailure):
        return summarize_file(source.name, (), tree)
    return summarize_file(source.name, detect(tree, mapping))


def _analyze_all(files: Sequence[SourceFile], mapping: LevelMapping, workers: int) -> list[FileReport]:
    if workers <= 1 or len(files) <= 1:
        return [analyze_file(f, mapping) for f in files]
    chunksize = max(1, len(files) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(analyze_file, files, repeat(mapping), chunksize=chunksize))


def analyze(
    files: Iterable[SourceFile],
    mapping: LevelMapping | None = None,
    workers: int = 1,
) -> list[UnitReport]:
    """Unit reports in order of each unit's first file; files sorted by path."""
    if mapping is None:
        mapping = default_mapping()
    mapping.check_covers(RULE_IDS)
    files = list(files)
    reports = _analyze_all(files, mapping, workers)

    by_unit: dict[str, list[FileReport]] = {}
    for source, report in zip(files, reports):
        by_unit.setdefault(source.unit, []).append(report)
    return [summarize_unit(name, reps) for name, reps in by_unit.items()]
