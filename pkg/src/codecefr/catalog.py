"""Construct catalog and the construct -> level assignment table.

The catalog lists every construct the detector can report, with the
human-readable name used in reports and its default level.  Levels can be
overridden from a plain-text file::

    # comments start with '#'
    list-comprehension: B1
    main-guard: A2

Ids are case-sensitive; level labels are not.  Unknown ids are rejected so
that a typo cannot silently leave the default in place.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .errors import CatalogMismatch, MalformedConfig, UnknownConstruct, UnknownLevel
from .levels import Level, parse_level


class Construct(NamedTuple):
    id: str
    display_name: str
    level: Level


A1, A2, B1, B2, C1, C2 = Level

# Reference assignments. These come with the level framework and are
# regression-tested; change them through a mapping file, not here.
REFERENCE_CONSTRUCTS: tuple[Construct, ...] = (
    Construct("print-call", "Print", A1),
    Construct("if-statement", "If Statement", A1),
    Construct("list-literal", "List", A1),
    Construct("open-call", "Open Function", A2),
    Construct("nested-list", "Nested List", A2),
    Construct("simple-dictionary", "Simple Dictionary", A2),
    Construct("list-with-dictionary", "List with a Dictionary", B1),
    Construct("nested-dictionary", "Nested Dictionary", B1),
    Construct("with-statement", "With", B1),
    Construct("list-comprehension", "List Comprehension", B2),
    Construct("dunder-dict-attribute", "__dict__ Attribute", B2),
    Construct("main-guard", "Main Guard", B2),
    Construct("dict-of-lists-of-dicts", "Dictionary of Lists of Dictionaries", B2),
    Construct("lambda-expression", "Lambda Function", B2),
    Construct("dunder-slots", "__slots__", C1),
    Construct("generator-function", "Generator Function", C1),
    Construct("function-decorator", "Function Decorator", C1),
    Construct("metaclass", "Metaclass", C2),
    Construct("class-decorator", "Class Decorator", C2),
)

# Extended set. Levels here are defaults picked for this tool, not
# established ground truth; projects are expected to tune them.
EXTENDED_CONSTRUCTS: tuple[Construct, ...] = (
    Construct("import", "Import", A1),
    Construct("for-statement", "For Loop", A1),
    Construct("while-statement", "While Loop", A1),
    Construct("function-def", "Function Definition", A2),
    Construct("tuple-literal", "Tuple", A2),
    Construct("set-literal", "Set", A2),
    Construct("slice", "Slice", A2),
    Construct("string-formatting", "String Formatting", A2),
    Construct("break-statement", "Break", A2),
    Construct("continue-statement", "Continue", A2),
    Construct("del-statement", "Del", A2),
    Construct("class-def", "Class", B1),
    Construct("try-except", "Try/Except", B1),
    Construct("raise-statement", "Raise", B1),
    Construct("assert-statement", "Assert", B1),
    Construct("global-statement", "Global", B1),
    Construct("dict-with-container", "Dictionary with Containers", B1),
    Construct("conditional-expression", "Conditional Expression", B1),
    Construct("star-args", "Variadic Parameters", B1),
    Construct("argument-unpacking", "Argument Unpacking", B1),
    Construct("generator-expression", "Generator Expression", B2),
    Construct("dict-comprehension", "Dictionary Comprehension", B2),
    Construct("set-comprehension", "Set Comprehension", B2),
    Construct("nonlocal-statement", "Nonlocal", B2),
    Construct("assignment-expression", "Assignment Expression", B2),
    Construct("super-call", "Super Call", B2),
    Construct("special-method", "Special Method", B2),
    Construct("property-decorator", "Property", B2),
    Construct("staticmethod-decorator", "Static Method", B2),
    Construct("classmethod-decorator", "Class Method", B2),
    Construct("async-function", "Async Function", C1),
    Construct("await-expression", "Await", C1),
    Construct("async-for", "Async For", C1),
    Construct("async-with", "Async With", C1),
    Construct("yield-from", "Yield From", C1),
    Construct("context-manager-protocol", "Context Manager Class", C1),
)

CATALOG: dict[str, Construct] = {c.id: c for c in REFERENCE_CONSTRUCTS + EXTENDED_CONSTRUCTS}

_by_display_name = {c.display_name: c for c in CATALOG.values()}
assert len(CATALOG) == len(REFERENCE_CONSTRUCTS) + len(EXTENDED_CONSTRUCTS), "duplicate construct id"
assert len(_by_display_name) == len(CATALOG), "duplicate display name"


def display_name(construct_id: str) -> str:
    try:
        return CATALOG[construct_id].display_name
    except KeyError:
        raise UnknownConstruct(construct_id) from None


def construct_for_display_name(name: str) -> Construct:
    try:
        return _by_display_name[name]
    except KeyError:
        raise UnknownConstruct(name) from None


class MappingSource(enum.Enum):
    BUILT_IN_DEFAULT = "built-in-default"
    CONFIG_FILE = "config-file"


@dataclass(frozen=True)
class LevelMapping(Mapping[str, Level]):
    """Immutable construct id -> level table."""

    entries: dict[str, Level]
    source: MappingSource = field(default=MappingSource.BUILT_IN_DEFAULT, compare=False)

    def __getitem__(self, construct_id: str) -> Level:
        return self.entries[construct_id]

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.entries.items())))

    def lookup(self, construct_id: str) -> Level:
        try:
            return self.entries[construct_id]
        except KeyError:
            raise UnknownConstruct(construct_id) from None

    def with_overrides(self, overrides: Mapping[str, Level]) -> LevelMapping:
        for cid in overrides:
            if cid not in self.entries:
                raise UnknownConstruct(cid)
        return LevelMapping({**self.entries, **overrides}, MappingSource.CONFIG_FILE)

    def check_covers(self, rule_ids: Iterable[str]) -> None:
        """Raise :class:`CatalogMismatch` if any rule id has no level."""
        missing = [rid for rid in rule_ids if rid not in self.entries]
        if missing:
            raise CatalogMismatch(missing)


def default_mapping() -> LevelMapping:
    return LevelMapping({c.id: c.level for c in CATALOG.values()})


def lookup(mapping: LevelMapping, construct_id: str) -> Level:
    return mapping.lookup(construct_id)


_ENTRY = re.compile(r"^(?P<id>[^:\s]+): (?P<level>\S+)$")


def parse_overrides(config_text: str, path: str | None = None) -> dict[str, Level]:
    """Parse the ``id: LEVEL`` lines of a mapping file."""
    overrides: dict[str, Level] = {}
    for lineno, raw in enumerate(config_text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _ENTRY.match(line)
        if m is None:
            raise MalformedConfig(f"expected '<construct-id>: <LEVEL>', got {raw.strip()!r}", lineno, path)
        cid = m["id"]
        if cid not in CATALOG:
            raise UnknownConstruct(cid, lineno)
        if cid in overrides:
            raise MalformedConfig(f"duplicate entry for {cid!r}", lineno, path)
        try:
            overrides[cid] = parse_level(m["level"])
        except UnknownLevel:
            raise UnknownLevel(m["level"], lineno) from None
    return overrides


def load_mapping(config_text: str, path: str | None = None) -> LevelMapping:
    """Default mapping with the overrides in ``config_text`` applied."""
    return default_mapping().with_overrides(parse_overrides(config_text, path))


def load_mapping_file(path: str | Path) -> LevelMapping:
    text = Path(path).read_text(encoding="utf-8")
    return load_mapping(text, str(path))


def render_mapping(mapping: LevelMapping) -> str:
    """Mapping as a config file, in catalog order."""
    lines = ["# construct-id: LEVEL"]
    lines += [f"{cid}: {mapping[cid].label}" for cid in CATALOG if cid in mapping]
    return "\n".join(lines) + "\n"
