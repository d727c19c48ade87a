import json
import re
from pathlib import Path

import pytest
import requests

from codecefr.ingest import GitHubClient

FIXTURES = Path(__file__).parent / "fixtures"

# fixture trees contain .py files (some deliberately invalid) that are data
collect_ignore_glob = ["fixtures/*"]


class ReplaySession:
    """Serves recorded GitHub responses keyed by exact URL."""

    def __init__(self, recording: dict):
        self.responses = {r["url"]: r for r in recording["responses"]}
        self.requested: list[str] = []
        self.sent_headers: list[dict] = []

    def get(self, url, headers=None, **kwargs):
        self.requested.append(url)
        self.sent_headers.append(dict(headers or {}))
        if url not in self.responses:
            raise AssertionError(f"unrecorded request: {url}")
        rec = self.responses[url]
        resp = requests.Response()
        resp.status_code = rec["status"]
        resp.headers.update(rec["headers"])
        resp._content = json.dumps(rec["body"]).encode("utf-8")
        resp.encoding = "utf-8"
        resp.url = url
        return resp


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def recording():
    def load(name: str) -> dict:
        return json.loads((FIXTURES / "github" / name).read_text())

    return load


@pytest.fixture
def replay_client(recording):
    def make(name: str, token: str | None = "") -> tuple[GitHubClient, ReplaySession]:
        session = ReplaySession(recording(name))
        return GitHubClient(token=token, session=session), session

    return make


# -- acceptance summary ------------------------------------------------------

_acceptance: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    m = re.search(r"criterion_\d+", name)
    criterion = m.group(0) if m else name.split("[")[0]
    _acceptance.setdefault(criterion, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, outcomes in _acceptance.items():
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {criterion} ({len(outcomes)} case(s))")
