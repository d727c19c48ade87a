"""Exception hierarchy.

Configuration problems (exit code 1) derive from :class:`ConfigError`;
problems fetching sources (exit code 2) derive from :class:`IngestionError`.
"""

from __future__ import annotations


class CefrError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CefrError):
    """The run is misconfigured (bad level label, bad mapping file, ...)."""


class UnknownLevel(ConfigError, ValueError):
    def __init__(self, text: str, line: int | None = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown level {text!r}; expected one of A1, A2, B1, B2, C1, C2")
        self.text = text
        self.line = line


class UnknownConstruct(ConfigError, LookupError):
    def __init__(self, construct_id: str, line: int | None = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown construct id {construct_id!r}")
        self.construct_id = construct_id
        self.line = line


class MalformedConfig(ConfigError):
    def __init__(self, message: str, line: int, path: str | None = None) -> None:
        prefix = f"{path}:" if path else "line "
        super().__init__(f"{prefix}{line}: {message}")
        self.line = line
        self.path = path


class CatalogMismatch(ConfigError):
    """Detection rules reference ids missing from the level mapping."""

    def __init__(self, missing: list[str]) -> None:
        super().__init__("level mapping lacks rule ids: " + ", ".join(sorted(missing)))
        self.missing = sorted(missing)


class IngestionError(CefrError):
    """A source could not be resolved into files."""


class NotFound(IngestionError):
    pass


class CloneFailed(IngestionError):
    def __init__(self, url: str, detail: str) -> None:
        super().__init__(f"git clone of {url} failed: {detail.strip()}")
        self.url = url
        self.detail = detail


class ApiError(IngestionError):
    def __init__(self, url: str, status: int, body: str) -> None:
        excerpt = body[:200].replace("\n", " ")
        super().__init__(f"GitHub API error {status} for {url}: {excerpt}")
        self.url = url
        self.status = status
        self.body = body


class UserNotFound(ApiError):
    pass


class RateLimited(IngestionError):
    def __init__(self, url: str, reset_at: str) -> None:
        super().__init__(f"GitHub API rate limit exhausted for {url}; resets at {reset_at}")
        self.url = url
        self.reset_at = reset_at


class OutputError(CefrError, OSError):
    """A report could not be written."""
