"""Series CSV format shared by the enumeration and analysis layers.

Header ``N,Z,P``, one row per length, every value a plain decimal integer
string (no thousands separators, no scientific notation).  The parser is
strict and reports the offending line number on malformed input.
"""

from __future__ import annotations

import os
from pathlib import Path

from .errors import SeriesError

__all__ = ["read_series_csv", "write_series_csv", "append_row"]

HEADER = "N,Z,P"


def read_series_csv(path: str | os.PathLike) -> list[tuple[int, int, int]]:
    """Parse a series CSV into (N, Z, P) rows in file order."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SeriesError(f"{p}: cannot read series file: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise SeriesError(f"{p}:1: expected header {HEADER!r}")
    rows: list[tuple[int, int, int]] = []
    seen: set[int] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise SeriesError(f"{p}:{lineno}: expected 3 comma-separated fields")
        try:
            n, z, pp = (int(f.strip()) for f in fields)
        except ValueError:
            raise SeriesError(f"{p}:{lineno}: fields must be decimal integers") from None
        if n < 1 or z < 1 or pp < 1:
            raise SeriesError(f"{p}:{lineno}: values must be positive")
        if n in seen:
            raise SeriesError(f"{p}:{lineno}: duplicate row for N={n}")
        seen.add(n)
        rows.append((n, z, pp))
    return rows


def write_series_csv(path: str | os.PathLike, rows: list[tuple[int, int, int]]) -> None:
    """Write rows (sorted by N) atomically."""
    p = Path(path)
    body = HEADER + "\n" + "".join(f"{n},{z},{pp}\n" for n, z, pp in sorted(rows))
    tmp = str(p) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(body)
    os.replace(tmp, p)


def append_row(path: str | os.PathLike, n: int, z: int, p: int) -> None:
    """Insert or replace one row, keeping the file sorted by N."""
    pth = Path(path)
    rows = read_series_csv(pth) if pth.exists() else []
    rows = [r for r in rows if r[0] != n]
    rows.append((n, z, p))
    write_series_csv(pth, rows)
