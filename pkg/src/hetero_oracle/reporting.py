"""Deterministic result files: versioned CSV and JSON, written atomically.

Every file begins with a schema comment line so downstream tooling can
dispatch on it.  Floats are serialized with 17 significant digits, which
round-trips double precision exactly; identical inputs therefore produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__


def fmt(value) -> str:
    """Serialize one CSV cell; floats get 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def schema_line(schema: str) -> str:
    return f"# hetero-oracle v{__version__} schema={schema}"


def write_csv(path, schema: str, header, rows) -> Path:
    """Write a schema-tagged CSV; rows are sequences matching the header."""
    path = Path(path)
    buf = io.StringIO()
    buf.write(schema_line(schema) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    _atomic_write_text(path, buf.getvalue())
    return path


def write_json(path, schema: str, payload: dict) -> Path:
    """Write a schema-tagged JSON document with stable key order."""
    path = Path(path)
    doc = {"schema": schema, "version": __version__}
    doc.update(payload)
    _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
