"""Command line interface.

    codecefr file path/to/script.py
    codecefr dir path/to/project --format json,csv,html
    codecefr repo https://github.com/psf/requests.git
    codecefr user octocat --exclude-forks

Exit status: 0 on success (files that fail to parse are reported, not
fatal), 1 on configuration errors, 2 when a source cannot be fetched.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import NoReturn, TextIO

from .catalog import LevelMapping, default_mapping, load_mapping_file
from .errors import CefrError, ConfigError, IngestionError
from .ingest import DEFAULT_CLONE_WORKERS, GitHubClient, SourceKind, SourceSpec, discover_files
from .pipeline import analyze
from .serialize import FORMATS, write_outputs

log = logging.getLogger("codecefr")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INGEST = 2

SUBCOMMANDS = {
    "file": SourceKind.FILE,
    "dir": SourceKind.DIRECTORY,
    "repo": SourceKind.GIT_URL,
    "user": SourceKind.HOSTING_USER,
}


@dataclass
class RunConfig:
    source: SourceSpec
    levels_config_path: Path | None = None
    output_dir: Path = Path("cefr-out")
    formats: frozenset[str] = frozenset({"terminal"})
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    keep_clones: bool = False
    exclude_forks: bool = False
    quiet: bool = False

    def __post_init__(self) -> None:
        if not self.formats:
            raise ConfigError("at least one output format is required")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ConfigError(f"unknown output format(s): {', '.join(sorted(unknown))}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be positive, got {self.workers}")


def _mapping(config: RunConfig) -> LevelMapping:
    if config.levels_config_path is None:
        return default_mapping()
    try:
        return load_mapping_file(config.levels_config_path)
    except OSError as exc:
        raise ConfigError(f"{config.levels_config_path}: {exc.strerror or exc}") from exc
    except ConfigError as exc:
        if str(config.levels_config_path) in str(exc):
            raise
        raise ConfigError(f"{config.levels_config_path}: {exc}") from exc


def run(
    config: RunConfig,
    *,
    client: GitHubClient | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        mapping = _mapping(config)
        with ExitStack() as stack:
            if config.keep_clones:
                workdir = config.output_dir / "clones"
            else:
                workdir = Path(stack.enter_context(tempfile.TemporaryDirectory(prefix="codecefr-")))
            files = discover_files(
                config.source,
                workdir,
                client=client,
                exclude_forks=config.exclude_forks,
                clone_workers=DEFAULT_CLONE_WORKERS,
            )
            units = analyze(files, mapping, workers=config.workers)
        bundle = write_outputs(units, config.output_dir, config.formats)
    except IngestionError as exc:
        print(f"codecefr: {config.source.value}: {exc}", file=stderr)
        return EXIT_INGEST
    except CefrError as exc:
        print(f"codecefr: {exc}", file=stderr)
        return EXIT_CONFIG
    if not config.quiet:
        stdout.write(bundle.terminal_text)
    for path in bundle.written:
        log.info("wrote %s", path)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _formats(text: str) -> frozenset[str]:
    items = frozenset(p.strip() for p in text.split(",") if p.strip())
    bad = items - set(FORMATS)
    if bad or not items:
        raise argparse.ArgumentTypeError(
            f"invalid format list {text!r}; choose from {', '.join(FORMATS)}"
        )
    return items


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--levels", type=Path, metavar="PATH", help="construct level overrides file")
    common.add_argument("--output-dir", "-o", type=Path, default=Path("cefr-out"),
                        help="where report files go (default: ./cefr-out)")
    common.add_argument("--format", dest="formats", type=_formats, default=frozenset({"terminal"}),
                        help="comma list of json,csv,html,terminal (default: terminal)")
    common.add_argument("--workers", type=_positive, default=os.cpu_count() or 1,
                        help="parallel parse workers (default: CPU count)")
    common.add_argument("--keep-clones", action="store_true", help="keep cloned repositories")
    common.add_argument("--exclude-forks", action="store_true", help="skip forked repositories (user)")
    common.add_argument("--quiet", "-q", action="store_true", help="no terminal summary")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = _Parser(prog="codecefr", description="Rate the Python proficiency level code requires.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("file", parents=[common], help="analyze one .py file").add_argument("source")
    sub.add_parser("dir", parents=[common], help="analyze a directory tree").add_argument("source")
    sub.add_parser("repo", parents=[common], help="clone and analyze a git repository").add_argument("source")
    sub.add_parser("user", parents=[common], help="analyze a GitHub user's Python repositories").add_argument(
        "source", metavar="username"
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        source=SourceSpec(SUBCOMMANDS[args.command], args.source),
        levels_config_path=args.levels,
        output_dir=args.output_dir,
        formats=args.formats,
        workers=args.workers,
        keep_clones=args.keep_clones,
        exclude_forks=args.exclude_forks,
        quiet=args.quiet,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"codecefr: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
