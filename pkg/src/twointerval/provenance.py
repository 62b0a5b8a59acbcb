"""Deterministic CSV tables with a JSON provenance header line."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from importlib import metadata

import numpy as np
import scipy

PACKAGE = "artifact"


def _version(dist: str) -> str:
    try:
        return metadata.version(dist)
    except metadata.PackageNotFoundError:
        return "unknown"


def module_versions() -> dict:
    return {"artifact": _version(PACKAGE), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": _version("numba")}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def provenance(config: dict, choices: dict | None = None) -> dict:
    """Provenance record: config hash, versions and sign-switch choices."""
    return {"config_sha256": config_hash(config), "versions": module_versions(),
            "choices": dict(choices or {})}


def render_table(header, rows, prov: dict | None = None) -> str:
    """CSV text (LF endings) preceded by ``# provenance: {...}`` when given."""
    buf = io.StringIO()
    if prov is not None:
        buf.write("# provenance: " + canonical_json(prov) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    return buf.getvalue()


def read_table(text: str) -> tuple[dict | None, list[str], list[list[str]]]:
    """Inverse of :func:`render_table`: ``(provenance, header, rows)``."""
    lines = text.splitlines()
    prov = None
    if lines and lines[0].startswith("# provenance: "):
        prov = json.loads(lines[0][len("# provenance: "):])
        lines = lines[1:]
    rows = list(csv.reader(lines))
    return prov, rows[0], rows[1:]
