"""Detect Python constructs and rate the proficiency level code requires.

Typical library use::

    from codecefr import analyze_path
    units = analyze_path("src/")
    print(units[0].required_level)
"""

from __future__ import annotations

from pathlib import Path

from .aggregate import FileReport, LevelHistogram, UnitReport, summarize_file, summarize_unit
from .catalog import CATALOG, LevelMapping, default_mapping, load_mapping, load_mapping_file, lookup
from .detector import Occurrence, detect, detect_source, register_rules
from .ingest import SourceKind, SourceSpec, discover_files, list_user_repos
from .levels import Level, LevelGroup, max_level, parse_level
from .parsing import ParseFailure, SourceFile, SyntaxTree, parse_source
from .pipeline import analyze, analyze_file
from .serialize import from_json, to_csv, to_html, to_json, to_terminal

__all__ = [
    "CATALOG", "FileReport", "Level", "LevelGroup", "LevelHistogram", "LevelMapping",
    "Occurrence", "ParseFailure", "SourceFile", "SourceKind", "SourceSpec", "SyntaxTree",
    "UnitReport", "analyze", "analyze_file", "analyze_path", "default_mapping", "detect",
    "detect_source", "discover_files", "from_json", "list_user_repos", "load_mapping",
    "load_mapping_file", "lookup", "max_level", "parse_level", "parse_source", "register_rules",
    "summarize_file", "summarize_unit", "to_csv", "to_html", "to_json", "to_terminal",
]


def analyze_path(path: str | Path, mapping: LevelMapping | None = None, workers: int = 1) -> list[UnitReport]:
    """Analyze a local ``.py`` file or directory tree."""
    path = Path(path)
    kind = SourceKind.DIRECTORY if path.is_dir() else SourceKind.FILE
    return analyze(discover_files(SourceSpec(kind, str(path))), mapping, workers)
