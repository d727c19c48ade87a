"""Report output: JSON, CSV, a terminal summary and static HTML pages.

JSON layout (all values are strings)::

    {
     "<unit>": {
      "<path relative to unit>": [
       {"Class": "Simple Dictionary", "Start Line": "16", "End Line": "19",
        "Displacement": "21", "Level": "A2"},
       ...
      ]
     }
    }

A file that failed to parse maps to ``{"Parse Failure": "<message>",
"Line": "<n>"}`` instead of a list.  In CSV such a file is one row whose
class is ``Parse Failure`` and whose level is empty.
"""

from __future__ import annotations

import csv
import html
import io
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .aggregate import FileReport, UnitReport, summarize_file, summarize_unit
from .catalog import construct_for_display_name
from .detector import Occurrence
from .errors import OutputError
from .levels import Level, level_label, parse_level
from .parsing import ParseFailure

CSV_HEADER = ("unit", "file", "class", "start_line", "end_line", "displacement", "level")
PARSE_FAILURE = "Parse Failure"
JSON_INDENT = 1


def _record(occ: Occurrence) -> dict[str, str]:
    return {
        "Class": occ.display_name,
        "Start Line": str(occ.start_line),
        "End Line": str(occ.end_line),
        "Displacement": str(occ.displacement),
        "Level": occ.level.label,
    }


def _sorted_files(unit: UnitReport) -> list[FileReport]:
    return sorted(unit.file_reports, key=lambda r: r.path)


def to_document(run: Iterable[UnitReport]) -> dict:
    doc: dict[str, dict] = {}
    for unit in run:
        files: dict[str, object] = {}
        for fr in _sorted_files(unit):
            if fr.parse_failure is not None:
                files[fr.path] = {PARSE_FAILURE: fr.parse_failure.message, "Line": str(fr.parse_failure.line)}
            else:
                files[fr.path] = [_record(o) for o in fr.occurrences]
        doc.setdefault(unit.name, {}).update(files)
    return doc


def to_json(run: Iterable[UnitReport]) -> str:
    return json.dumps(to_document(run), indent=JSON_INDENT, ensure_ascii=False) + "\n"


def from_json(text: str) -> list[UnitReport]:
    """Rebuild unit reports from :func:`to_json` output."""
    units = []
    for unit_name, files in json.loads(text).items():
        reports = []
        for path, body in files.items():
            if isinstance(body, dict):
                failure = ParseFailure(path, int(body["Line"]), body[PARSE_FAILURE])
                reports.append(summarize_file(path, (), failure))
                continue
            occs = [
                Occurrence(
                    construct=construct_for_display_name(rec["Class"]).id,
                    display_name=rec["Class"],
                    start_line=int(rec["Start Line"]),
                    end_line=int(rec["End Line"]),
                    displacement=int(rec["Displacement"]),
                    level=parse_level(rec["Level"]),
                )
                for rec in body
            ]
            reports.append(summarize_file(path, occs))
        units.append(summarize_unit(unit_name, reports))
    return units


def csv_rows(run: Iterable[UnitReport]) -> list[tuple[str, ...]]:
    rows = []
    for unit in run:
        for fr in _sorted_files(unit):
            if fr.parse_failure is not None:
                line = str(fr.parse_failure.line)
                rows.append((unit.name, fr.path, PARSE_FAILURE, line, line, "", ""))
                continue
            for o in fr.occurrences:
                rows.append(
                    (unit.name, fr.path, o.display_name, str(o.start_line), str(o.end_line),
                     str(o.displacement), o.level.label)
                )
    return rows


def to_csv(run: Iterable[UnitReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(csv_rows(run))
    return buf.getvalue()


def to_terminal(run: Iterable[UnitReport]) -> str:
    lines: list[str] = []
    for unit in run:
        analyzed = len(unit.file_reports)
        lines.append(unit.name)
        lines.append(f"  files: {analyzed} analyzed, {unit.files_failed} failed")
        for lv in Level:
            lines.append(f"  {lv.label}: {unit.histogram[lv]}")
        lines.append(f"  total: {unit.histogram.total}")
        lines.append(f"  required level: {level_label(unit.required_level)}")
        for fr in _sorted_files(unit):
            if fr.parse_failure is not None:
                pf = fr.parse_failure
                lines.append(f"  parse failure: {pf.path}:{pf.line}: {pf.message}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- HTML --------------------------------------------------------------------

_CSS = """
body { font-family: sans-serif; margin: 2em; color: #222; }
table { border-collapse: collapse; margin: 0.5em 0 1.5em; }
th, td { border: 1px solid #ccc; padding: 0.2em 0.6em; text-align: left; }
.chart { display: flex; align-items: flex-end; gap: 6px; height: 160px;
         border-bottom: 1px solid #888; width: 360px; margin: 0.5em 0; }
.col { flex: 1; height: 100%; display: flex; flex-direction: column; justify-content: flex-end; }
.bar { background: #4a78b8; width: 100%; }
.labels { display: flex; gap: 6px; width: 360px; }
.labels span { flex: 1; text-align: center; font-size: 0.85em; }
.failed { color: #a00; }
"""

_FILTER_JS = """
document.getElementById("level-filter").addEventListener("change", function (ev) {
  var want = ev.target.value;
  document.querySelectorAll("tr[data-level]").forEach(function (row) {
    row.style.display = (!want || row.dataset.level === want) ? "" : "none";
  });
});
"""


def _esc(text: object) -> str:
    return html.escape(str(text), quote=True)


def _embed(data: object) -> str:
    text = json.dumps(data, indent=JSON_INDENT, ensure_ascii=False)
    return text.replace("</", "<\\/")


def bar_heights(unit: UnitReport) -> dict[Level, float]:
    """Bar height in percent of the tallest bar."""
    peak = max(unit.histogram.counts)
    return {lv: (100.0 * unit.histogram[lv] / peak if peak else 0.0) for lv in Level}


def _chart(unit: UnitReport) -> str:
    heights = bar_heights(unit)
    cols = "".join(
        f'<div class="col"><div class="bar" data-level="{lv.label}" data-count="{unit.histogram[lv]}" '
        f'style="height: {heights[lv]:.4f}%" title="{lv.label}: {unit.histogram[lv]}"></div></div>'
        for lv in Level
    )
    labels = "".join(f"<span>{lv.label}<br>{unit.histogram[lv]}</span>" for lv in Level)
    return f'<div class="chart" data-unit="{_esc(unit.name)}">{cols}</div><div class="labels">{labels}</div>'


def _page(title: str, body: str, data: object, script: str = "") -> str:
    js = f"<script>{script}</script>" if script else ""
    return (
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{_esc(title)}</title>\n<style>{_CSS}</style>\n</head>\n<body>\n"
        f"<h1>{_esc(title)}</h1>\n{body}\n"
        f'<script type="application/json" id="cefr-data">{_embed(data)}</script>\n'
        f"{js}\n</body>\n</html>\n"
    )


def unit_page_name(index: int) -> str:
    return f"unit-{index:03d}.html"


def _file_section(fr: FileReport) -> str:
    head = f"<h3>{_esc(fr.path)} &mdash; {level_label(fr.required_level)}</h3>"
    if fr.parse_failure is not None:
        pf = fr.parse_failure
        return head + f'<p class="failed">Parse failure at line {pf.line}: {_esc(pf.message)}</p>'
    if not fr.occurrences:
        return head + "<p>No constructs detected.</p>"
    rows = "".join(
        f'<tr data-level="{o.level.label}"><td>{_esc(o.display_name)}</td><td>{o.start_line}</td>'
        f"<td>{o.end_line}</td><td>{o.displacement}</td><td>{o.level.label}</td></tr>"
        for o in fr.occurrences
    )
    return (
        head + "<table><thead><tr><th>Class</th><th>Start Line</th><th>End Line</th>"
        f"<th>Displacement</th><th>Level</th></tr></thead><tbody>{rows}</tbody></table>"
    )


def _unit_page(unit: UnitReport) -> str:
    options = "".join(f'<option value="{lv.label}">{lv.label}</option>' for lv in Level)
    body = (
        '<p><a href="index.html">&larr; all units</a></p>\n'
        f"<p>Required level: <strong>{level_label(unit.required_level)}</strong>; "
        f"{len(unit.file_reports)} files, {unit.files_failed} failed.</p>\n"
        f"{_chart(unit)}\n"
        f'<p><label>Level <select id="level-filter"><option value="">all</option>{options}</select></label></p>\n'
        + "\n".join(_file_section(fr) for fr in _sorted_files(unit))
    )
    return _page(unit.name, body, to_document([unit]), _FILTER_JS)


def _index_page(units: Sequence[UnitReport]) -> str:
    if not units:
        body = "<p>No data.</p>"
    else:
        parts = []
        for i, unit in enumerate(units):
            parts.append(
                f'<section><h2><a href="{unit_page_name(i)}">{_esc(unit.name)}</a></h2>'
                f"<p>Required level: <strong>{level_label(unit.required_level)}</strong>; "
                f"{unit.histogram.total} occurrences in {len(unit.file_reports)} files.</p>"
                f"{_chart(unit)}</section>"
            )
        body = "\n".join(parts)
    return _page("Proficiency report", body, to_document(units))


def to_html(run: Iterable[UnitReport], out_dir: str | Path) -> list[Path]:
    """Write ``index.html`` plus one page per unit; returns the written paths."""
    units = list(run)
    out = Path(out_dir)
    pages = {"index.html": _index_page(units)}
    for i, unit in enumerate(units):
        pages[unit_page_name(i)] = _unit_page(unit)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in pages.items():
            path = out / name
            path.write_text(text, encoding="utf-8", newline="\n")
            written.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write HTML report to {out}: {exc.strerror or exc}") from exc
    return written


# -- bundle ------------------------------------------------------------------

FORMATS = ("json", "csv", "html", "terminal")


@dataclass
class OutputBundle:
    json_path: Path | None = None
    csv_path: Path | None = None
    html_dir: Path | None = None
    terminal_text: str = ""
    written: list[Path] = field(default_factory=list)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_outputs(run: Sequence[UnitReport], output_dir: str | Path, formats: Iterable[str]) -> OutputBundle:
    out = Path(output_dir)
    formats = set(formats)
    bundle = OutputBundle(terminal_text=to_terminal(run))
    if "json" in formats:
        bundle.json_path = out / "results.json"
        _write(bundle.json_path, to_json(run))
        bundle.written.append(bundle.json_path)
    if "csv" in formats:
        bundle.csv_path = out / "results.csv"
        _write(bundle.csv_path, to_csv(run))
        bundle.written.append(bundle.csv_path)
    if "html" in formats:
        bundle.html_dir = out / "html"
        bundle.written.extend(to_html(run, bundle.html_dir))
    return bundle
