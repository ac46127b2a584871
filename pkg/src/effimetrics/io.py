"""CSV / JSON readers and writers for price series and reports."""

from __future__ import annotations

import csv
import datetime as dt
import json
from pathlib import Path
from typing import Iterable, Sequence

from .timeseries import PriceSeries


class IngestError(ValueError):
    pass


def ingest_csv(path) -> PriceSeries:
    """Read a ``date,close`` file (ISO dates, ascending) into a PriceSeries."""
    path = Path(path)
    dates, closes = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["date", "close"]:
            raise IngestError(f"{path}:1: expected header 'date,close', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise IngestError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                d = dt.date.fromisoformat(row[0].strip())
                c = float(row[1])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from None
            if dates and d <= dates[-1]:
                raise IngestError(
                    f"{path}:{lineno}: date {d} does not follow {dates[-1]} (dates must ascend)"
                )
            if not c > 0:
                raise IngestError(f"{path}:{lineno}: non-positive close {c!r} on {d}")
            dates.append(d)
            closes.append(c)
    if len(dates) < 2:
        raise IngestError(f"{path}: need at least 2 rows, got {len(dates)}")
    return PriceSeries(path.stem, dates, closes)


def write_price_csv(path, prices: PriceSeries) -> None:
    # repr() is the shortest string that round-trips the float exactly
    write_rows(path, ("date", "close"),
               ((d.isoformat(), repr(float(p))) for d, p in zip(prices.dates, prices.prices)))


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # json emits floats via repr, i.e. full round-trip precision
    path.write_text(json.dumps(obj, indent=2, allow_nan=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
