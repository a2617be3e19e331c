"""
Report and manifest files.

Reports are CSV ('.' decimals, '\\n' line endings, header row) or a JSON list
of objects holding the same values. Every CLI run also leaves a TOML run
manifest with the command line that produced it and a digest per artifact,
which is what `nmds replay` checks against.
"""

import csv
import hashlib
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from enum import StrEnum
from fractions import Fraction
from pathlib import Path

import tomlkit
from tomlkit.exceptions import ParseError

from . import __version__
from .errors import NmdsError
from .util import format_number

MANIFEST_FILE_NAME = "manifest.toml"
TOOL_NAME = "nmds-expander"


class IoFailure(NmdsError):
    """Raised when a report or manifest cannot be written or read."""


class ReportFormat(StrEnum):
    CSV = "csv"
    JSON = "json"


def _cell(value: object) -> str:
    if isinstance(value, str):
        return value
    if value is None or isinstance(value, bool | int | float | Fraction):
        return format_number(value)

    return str(value)


def _json_value(value: object) -> object:
    if value is None or isinstance(value, bool | int | str):
        return value
    if isinstance(value, float | Fraction):
        return float(format_number(value))

    return str(value)


def _columns(records: Sequence[Mapping[str, object]], columns: Sequence[str] | None) -> list[str]:
    if columns is None:
        columns = list(records[0]) if records else []

    for i, record in enumerate(records):
        if list(record) != list(columns):
            raise ValueError(f"Record {i} has fields {list(record)}, expected {list(columns)}")

    return list(columns)


def render_report(
    records: Iterable[Mapping[str, object]],
    fmt: ReportFormat | str,
    columns: Sequence[str] | None = None,
) -> str:
    records = list(records)
    columns = _columns(records, columns)

    if ReportFormat(fmt) == ReportFormat.JSON:
        rows = [{key: _json_value(record[key]) for key in columns} for record in records]
        return json.dumps(rows, indent=2) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([_cell(record[key]) for key in columns] for record in records)
    return buffer.getvalue()


def emit_report(
    records: Iterable[Mapping[str, object]],
    fmt: ReportFormat | str,
    path: Path,
    columns: Sequence[str] | None = None,
) -> Path:
    text = render_report(records, fmt, columns)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as ex:
        raise IoFailure(f"Could not write {path}: {ex}") from ex

    return path


def file_digest(path: Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as ex:
        raise IoFailure(f"Could not read {path}: {ex}") from ex


def write_manifest(
    directory: Path,
    command: Sequence[str],
    seed: int | None,
    artifacts: Iterable[Path],
) -> Path:
    """Record how the artifacts in directory were made.

    command is the argument list without the output directory, so the run
    can be repeated anywhere.
    """
    directory = Path(directory)

    doc = tomlkit.document()
    doc.add(tomlkit.comment(f"Written by {TOOL_NAME} {__version__}"))
    doc["tool"] = TOOL_NAME
    doc["version"] = __version__
    if seed is not None:
        doc["seed"] = seed

    argv = tomlkit.array()
    argv.extend(command)
    doc["command"] = argv

    table = tomlkit.table()
    for artifact in sorted(Path(a) for a in artifacts):
        table[artifact.relative_to(directory).as_posix()] = file_digest(artifact)
    doc["artifacts"] = table

    path = directory / MANIFEST_FILE_NAME
    try:
        path.write_text(tomlkit.dumps(doc), encoding="utf-8")
    except OSError as ex:
        raise IoFailure(f"Could not write {path}: {ex}") from ex

    return path


def read_manifest(path: Path) -> dict[str, object]:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_FILE_NAME

    try:
        data = tomlkit.parse(path.read_text(encoding="utf-8")).unwrap()
    except (OSError, ParseError) as ex:
        raise IoFailure(f"Could not read manifest {path}: {ex}") from ex

    if data.get("tool") != TOOL_NAME or "command" not in data:
        raise IoFailure(f"{path} is not a {TOOL_NAME} run manifest")

    return data
