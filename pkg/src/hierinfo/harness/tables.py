"""CSV plot-data tables with a provenance header line."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .. import __version__


def header_line(**params) -> str:
    payload = {"version": __version__, **params}
    return "# hierinfo " + json.dumps(payload, sort_keys=True, default=str)


def write_table(path, columns, rows, **params) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(header_line(**params) + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow(["" if v is None else _fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def read_table(path, text=()) -> tuple[dict, list[dict]]:
    """Return ``(params, rows)``; numeric-looking cells become numbers.

    Columns named in ``text`` are left as strings.
    """
    params: dict = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for ln in lines:
        if ln.startswith("# hierinfo "):
            params = json.loads(ln[len("# hierinfo "):])
        elif ln.startswith("#"):
            continue
        else:
            body.append(ln)
    reader = csv.DictReader(body)
    rows = []
    for rec in reader:
        rows.append({k: (v if k in text else _num(v)) for k, v in rec.items()})
    return params, rows


def _num(v: str):
    if v == "":
        return None
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v
