"""Deterministic report files: CSV tables, run manifests, atomic writes.

Every writer produces byte-stable output for the same data: floats are
formatted with 6 significant digits and a '.' separator, line endings are
LF, and files land via a temp-file rename so interrupted runs never leave
a partial report behind.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence


def fmt_num(value: float) -> str:
    """6-significant-digit rendering shared by all reports."""
    text = format(float(value), ".6g")
    return "0" if text == "-0" else text


def render_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_num(value)
    if value is None:
        return ""
    return str(value)


def atomic_write(path: str | Path, text: str) -> None:
    """Write UTF-8 text with LF endings via temp file + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """CSV with the shared cell formatting and LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([render_cell(cell) for cell in row])
    atomic_write(path, buffer.getvalue())


@dataclass(frozen=True)
class RunManifest:
    """What produced an output directory: command, parameters, inputs, seeds.

    Re-running the command with these parameters reproduces every other
    output byte-identically; the timestamp line is the one exception.
    """

    command: str
    version: str
    timestamp: str
    seeds: tuple[int, ...]
    parameters: tuple[tuple[str, str], ...]
    inputs: tuple[tuple[str, str], ...]

    def render(self) -> str:
        lines = [
            f"command = {self.command}",
            f"version = {self.version}",
            f"timestamp = {self.timestamp}",
            f"seeds = {','.join(str(s) for s in self.seeds)}",
        ]
        lines.extend(f"input.{key} = {value}" for key, value in sorted(self.inputs))
        lines.extend(f"param.{key} = {value}" for key, value in sorted(self.parameters))
        return "\n".join(lines) + "\n"


def build_run_manifest(
    command: str,
    version: str,
    parameters: Mapping[str, object],
    inputs: Mapping[str, object],
    seeds: Sequence[int] = (),
    timestamp: str | None = None,
) -> RunManifest:
    """Assemble a RunManifest, rendering every value through the shared formatting."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return RunManifest(
        command=command,
        version=version,
        timestamp=timestamp,
        seeds=tuple(int(s) for s in seeds),
        parameters=tuple((key, render_cell(value)) for key, value in parameters.items()),
        inputs=tuple((key, render_cell(value)) for key, value in inputs.items()),
    )


def write_run_manifest(path: str | Path, manifest: RunManifest) -> None:
    atomic_write(path, manifest.render())
