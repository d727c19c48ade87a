"""Source files and the Python 3 parser front end.

Parsing is delegated to the standard library :mod:`ast` module.  Positions
are 1-based lines and 0-based *character* columns; :mod:`ast` reports UTF-8
byte offsets, which :meth:`SyntaxTree.column` converts.
"""

from __future__ import annotations

import ast
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

_LINE_BREAK = re.compile(r"\r\n|\r|\n")


@dataclass
class SourceFile:
    """One file to analyze.

    ``name`` is the path relative to the unit root, with forward slashes;
    it is the key used in every report.  ``content`` is read from ``path``
    on first use when not supplied.
    """

    path: Path
    unit: str
    name: str
    content: str | bytes | None = field(default=None, repr=False)

    def read(self) -> str | bytes:
        if self.content is None:
            return Path(self.path).read_bytes()
        return self.content


@dataclass(frozen=True)
class ParseFailure:
    path: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}: {self.message}"


@dataclass
class SyntaxTree:
    """A parsed module plus the decoded text it was parsed from."""

    path: str
    module: ast.Module
    text: str
    lines: list[str]

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def column(self, node: ast.AST) -> int:
        """Character column for ``node.col_offset`` (a byte offset)."""
        col = node.col_offset
        try:
            line = self.lines[node.lineno - 1]
        except IndexError:
            return col
        if line.isascii():
            return col
        return len(line.encode("utf-8")[:col].decode("utf-8", errors="ignore"))

    def segment(self, node: ast.AST) -> str | None:
        return ast.get_source_segment(self.text, node)


def decode_source(content: str | bytes) -> str:
    if isinstance(content, str):
        return content
    return content.decode("utf-8-sig")


def parse_text(text: str, path: str = "<string>") -> SyntaxTree:
    """Parse already-decoded text; raises :class:`SyntaxError`."""
    with warnings.catch_warnings():
        # invalid escape sequences etc. are not our concern
        warnings.simplefilter("ignore")
        module = ast.parse(text, filename=path)
    return SyntaxTree(path, module, text, _LINE_BREAK.split(text))


def parse_source(file: SourceFile) -> SyntaxTree | ParseFailure:
    """Parse one file; returns a :class:`ParseFailure` instead of raising."""
    path = file.name
    try:
        raw = file.read()
    except OSError as exc:
        return ParseFailure(path, 0, f"cannot read file: {exc.strerror or exc}")
    try:
        text = decode_source(raw)
    except UnicodeDecodeError as exc:
        return ParseFailure(path, 0, f"not valid UTF-8: {exc.reason} at byte {exc.start}")
    try:
        return parse_text(text, path)
    except SyntaxError as exc:
        return ParseFailure(path, exc.lineno or 0, exc.msg)
    except (ValueError, RecursionError, MemoryError) as exc:
        # null bytes (ValueError on 3.10/3.11) and pathological nesting
        return ParseFailure(path, 0, f"{type(exc).__name__}: {exc}")
