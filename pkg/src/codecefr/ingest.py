"""Resolve a source (file, directory, git URL or GitHub user) into files.

Directory walks are sorted, never follow symlinked directories, and skip
VCS metadata and bytecode caches.  GitHub access goes through
:class:`GitHubClient`, whose HTTP session can be swapped out in tests.
"""

from __future__ import annotations

import enum
import logging
import os
import re
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Protocol
from urllib.parse import urlparse

import requests

from .errors import ApiError, CloneFailed, ConfigError, NotFound, RateLimited, UserNotFound
from .parsing import SourceFile

log = logging.getLogger(__name__)

SKIP_DIRS = frozenset({".git", ".hg", ".svn", "__pycache__"})
GITHUB_API = "https://api.github.com"
PER_PAGE = 100
DEFAULT_CLONE_WORKERS = 4


class SourceKind(str, enum.Enum):
    FILE = "file"
    DIRECTORY = "directory"
    GIT_URL = "git-url"
    HOSTING_USER = "hosting-user"


@dataclass(frozen=True)
class SourceSpec:
    kind: SourceKind
    value: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SourceKind(self.kind))
        if self.kind is SourceKind.FILE and not self.value.endswith(".py"):
            raise ConfigError(f"{self.value}: not a .py file")
        if not self.value:
            raise ConfigError(f"empty {self.kind.value} source")


@dataclass(frozen=True)
class RepoRef:
    name: str
    clone_url: str
    primary_language: str | None
    fork: bool = False


# -- filesystem ------------------------------------------------------------


def _inside(path: Path, root: Path) -> bool:
    try:
        path.resolve().relative_to(root)
    except ValueError:
        return False
    return True


def walk_python_files(root: Path, unit: str) -> list[SourceFile]:
    """All ``*.py`` files below ``root`` in sorted relative-path order."""
    root = Path(root)
    real_root = root.resolve()
    found: list[SourceFile] = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        here = Path(dirpath)
        dirnames[:] = [d for d in dirnames if d not in SKIP_DIRS and not (here / d).is_symlink()]
        for fname in filenames:
            if not fname.endswith(".py"):
                continue
            path = here / fname
            if path.is_symlink() and not _inside(path, real_root):
                log.debug("skipping %s: links outside %s", path, root)
                continue
            if not path.is_file():
                continue
            found.append(SourceFile(path, unit, path.relative_to(root).as_posix()))
    found.sort(key=lambda f: f.name)
    return found


# -- git -------------------------------------------------------------------


def repo_name_from_url(url: str) -> str:
    path = urlparse(url).path if "://" in url else url.rsplit(":", 1)[-1]
    name = path.rstrip("/").rsplit("/", 1)[-1]
    name = re.sub(r"\.git$", "", name)
    if not name:
        raise ConfigError(f"cannot derive a repository name from {url!r}")
    return name


def clone_repository(url: str, dest: Path) -> Path:
    """Shallow clone of ``url`` into ``dest``."""
    cmd = ["git", "clone", "--depth", "1", "--quiet", url, str(dest)]
    env = {**os.environ, "GIT_TERMINAL_PROMPT": "0"}
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, env=env, check=False)
    except FileNotFoundError:
        raise CloneFailed(url, "git executable not found") from None
    if proc.returncode != 0:
        raise CloneFailed(url, proc.stderr or f"exit status {proc.returncode}")
    return dest


def _fresh_dir(workdir: Path, name: str) -> Path:
    dest = workdir / name
    n = 1
    while dest.exists():
        n += 1
        dest = workdir / f"{name}-{n}"
    return dest


# -- GitHub ----------------------------------------------------------------


class HttpSession(Protocol):
    def get(self, url: str, **kwargs: Any) -> Any: ...


def _format_reset(value: str | None) -> str:
    if not value:
        return "unknown time"
    try:
        ts = datetime.fromtimestamp(int(value), tz=timezone.utc)
    except (ValueError, OverflowError, OSError):
        return value
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


class GitHubClient:
    """Minimal GitHub REST v3 client for listing a user's repositories."""

    def __init__(
        self,
        token: str | None = None,
        session: HttpSession | None = None,
        base_url: str = GITHUB_API,
    ) -> None:
        self.token = token if token is not None else os.environ.get("GITHUB_TOKEN")
        self.session = session if session is not None else requests.Session()
        self.base_url = base_url.rstrip("/")

    @property
    def headers(self) -> dict[str, str]:
        headers = {"Accept": "application/vnd.github.v3+json"}
        if self.token:
            headers["Authorization"] = f"token {self.token}"
        return headers

    def _get(self, url: str) -> Any:
        try:
            resp = self.session.get(url, headers=self.headers, timeout=30)
        except requests.RequestException as exc:
            raise ApiError(url, 0, str(exc)) from exc
        status = resp.status_code
        if status == 200:
            return resp
        headers = resp.headers
        if status == 429 or (status == 403 and headers.get("X-RateLimit-Remaining") == "0"):
            raise RateLimited(url, _format_reset(headers.get("X-RateLimit-Reset")))
        if status == 404:
            raise UserNotFound(url, status, resp.text)
        raise ApiError(url, status, resp.text)

    def user(self, username: str) -> dict[str, Any]:
        return self._get(f"{self.base_url}/users/{username}").json()

    def iter_repo_pages(self, username: str):
        url: str | None = f"{self.base_url}/users/{username}/repos?per_page={PER_PAGE}"
        while url:
            resp = self._get(url)
            yield resp.json()
            url = resp.links.get("next", {}).get("url")

    def list_user_repos(self, username: str, exclude_forks: bool = False) -> list[RepoRef]:
        """Public repositories of ``username`` whose main language is Python."""
        repos = []
        for page in self.iter_repo_pages(username):
            for item in page:
                ref = RepoRef(item["name"], item["clone_url"], item.get("language"), bool(item.get("fork")))
                if ref.primary_language != "Python":
                    continue
                if exclude_forks and ref.fork:
                    continue
                repos.append(ref)
        return repos


def list_user_repos(
    username: str,
    credentials: str | None = None,
    *,
    client: GitHubClient | None = None,
    exclude_forks: bool = False,
) -> list[RepoRef]:
    if client is None:
        client = GitHubClient(token=credentials)
    return client.list_user_repos(username, exclude_forks=exclude_forks)


# -- entry point -----------------------------------------------------------


def discover_files(
    spec: SourceSpec,
    workdir: Path | None = None,
    *,
    client: GitHubClient | None = None,
    exclude_forks: bool = False,
    clone_workers: int = DEFAULT_CLONE_WORKERS,
) -> list[SourceFile]:
    """Files to analyze for ``spec``; remote sources are cloned into ``workdir``."""
    kind = spec.kind
    if kind is SourceKind.FILE:
        path = Path(spec.value)
        if not path.is_file():
            raise NotFound(f"{spec.value}: no such file")
        return [SourceFile(path, path.name, path.name)]

    if kind is SourceKind.DIRECTORY:
        path = Path(spec.value)
        if not path.is_dir():
            raise NotFound(f"{spec.value}: no such directory")
        return walk_python_files(path, path.resolve().name)

    if workdir is None:
        raise ConfigError(f"a work directory is needed to clone {spec.value}")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    if kind is SourceKind.GIT_URL:
        name = repo_name_from_url(spec.value)
        dest = clone_repository(spec.value, _fresh_dir(workdir, name))
        return walk_python_files(dest, name)

    repos = list_user_repos(spec.value, client=client, exclude_forks=exclude_forks)
    repos.sort(key=lambda r: r.name)
    # repo names are unique within one account, so destinations cannot collide
    dests = [_fresh_dir(workdir, r.name) for r in repos]
    with ThreadPoolExecutor(max_workers=max(1, clone_workers)) as pool:
        cloned = list(pool.map(clone_repository, [r.clone_url for r in repos], dests))
    files: list[SourceFile] = []
    for repo, dest in zip(repos, cloned):
        files.extend(walk_python_files(dest, repo.name))
    return files
