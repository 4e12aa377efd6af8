"""Load, align and quantize paired daily series; plain symbol files in and out.

Input price files are ``date,value`` per line (UTF-8). A first line whose
value field is not numeric is treated as a header.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SymbolSequence, quantize_returns


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class DatedSeries:
    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if len(self.dates) != vals.size:
            raise IngestError("dates and values differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise IngestError("dates must be unique and strictly increasing")
        if np.any(~(vals > 0)):
            raise IngestError("values must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.dates)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv_series(path: str | os.PathLike) -> DatedSeries:
    """Parse a ``date,value`` file into a sorted series.

    Exact duplicate rows are collapsed; a date repeated with a different value
    is an error.
    """
    seen: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise IngestError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            date, value = row[0].strip(), row[1].strip()
            if lineno == 1 and not _is_number(value):
                continue
            try:
                day = dt.date.fromisoformat(date).isoformat()
                val = float(value)
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from None
            if not val > 0:
                raise IngestError(f"{path}:{lineno}: nonpositive value {val!r}")
            if day in seen and seen[day] != val:
                raise IngestError(f"{path}:{lineno}: duplicate date {day} with conflicting values "
                                  f"{seen[day]!r} and {val!r}")
            seen[day] = val
    if not seen:
        raise IngestError(f"{path}: no data rows")
    dates = tuple(sorted(seen))
    return DatedSeries(dates, np.array([seen[d] for d in dates]))


@dataclass(frozen=True)
class AlignedPair:
    x: SymbolSequence
    y: SymbolSequence
    dates: tuple[str, ...]   # date of each return (the later day of the pair)
    dropped_a: int
    dropped_b: int


def align_series(a: DatedSeries, b: DatedSeries, threshold: float = 0.008,
                 offset: int = 0, log_returns: bool = False) -> AlignedPair:
    """Intersect the calendars, then quantize both return series on the common grid.

    With ``offset = k > 0`` the return of ``a`` on common day ``i`` is paired
    with the return of ``b`` on common day ``i - k``.
    """
    if not len(a) or not len(b):
        raise IngestError("both series must be nonempty")
    common = sorted(set(a.dates) & set(b.dates))
    if not common:
        raise IngestError("the two series share no dates")
    ia = {d: i for i, d in enumerate(a.dates)}
    ib = {d: i for i, d in enumerate(b.dates)}
    va = a.values[[ia[d] for d in common]]
    vb = b.values[[ib[d] for d in common]]
    qa = quantize_returns(va, threshold, log_returns)
    qb = quantize_returns(vb, threshold, log_returns)
    ret_dates = tuple(common[1:])
    if offset < 0:
        raise IngestError("offset must be nonnegative")
    if offset:
        if offset >= len(qa):
            raise IngestError(f"offset {offset} leaves no aligned returns")
        qa, qb, ret_dates = qa[offset:], qb[:-offset], ret_dates[offset:]
    return AlignedPair(qa, qb, ret_dates, len(a) - len(common), len(b) - len(common))


# --- symbol files ----------------------------------------------------------

def write_symbols_csv(seq: SymbolSequence | Sequence[int], path: str | os.PathLike | None = None,
                      header: str | None = None) -> str:
    """Single-column symbol file; returns the text and writes it when ``path`` is given."""
    data = seq.tolist() if isinstance(seq, SymbolSequence) else list(seq)
    text = (f"{header}\n" if header else "") + "".join(f"{s}\n" for s in data)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_symbols_csv(path: str | os.PathLike, size: int | None = None) -> SymbolSequence:
    """Read a single-column symbol file (first column of a wider one); optional header."""
    out: list[int] = []
    header_skipped = False
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not row[0].strip() or row[0].startswith("#"):
                continue
            cell = row[0].strip()
            try:
                sym = int(cell)
            except ValueError:
                if not out and not header_skipped:
                    header_skipped = True
                    continue
                raise IngestError(f"{path}:{lineno}: not an integer symbol: {cell!r}") from None
            if sym < 0:
                raise IngestError(f"{path}:{lineno}: negative symbol {sym}")
            out.append(sym)
    if not out:
        raise IngestError(f"{path}: no symbols")
    return SymbolSequence.from_symbols(out, size)


def pair_to_csv(x: SymbolSequence, y: SymbolSequence, dates: Sequence[str] | None = None) -> str:
    """Two-column (optionally dated) audit file of a quantized pair."""
    buf = io.StringIO()
    if dates is not None:
        buf.write("date,x,y\n")
        for d, a, b in zip(dates, x.tolist(), y.tolist()):
            buf.write(f"{d},{a},{b}\n")
    else:
        buf.write("x,y\n")
        for a, b in zip(x.tolist(), y.tolist()):
            buf.write(f"{a},{b}\n")
    return buf.getvalue()
