"""Load, validate, and clean per-instrument close-price CSV data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import DataError, UnusableSeriesError

REQUIRED_COLUMNS = ("code", "date", "close")

# A series is discarded as unusable when cleaning drops more than this
# fraction of its rows.
MAX_DROP_FRACTION = 0.5


@dataclass
class PriceSeries:
    """Ordered trading-day closes for one instrument.

    Dates are strictly increasing. Closes may still contain missing or
    non-positive values until ``clean`` has been applied.
    """

    code: str
    dates: list[date]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.closes = np.asarray(self.closes, dtype=float)
        if len(self.dates) != len(self.closes):
            raise DataError(
                f"instrument {self.code!r}: {len(self.dates)} dates but {len(self.closes)} closes"
            )
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise DataError(
                    f"instrument {self.code!r}: dates not strictly increasing at {self.dates[i]}"
                )

    def __len__(self) -> int:
        return len(self.closes)

    @property
    def span_days(self) -> int:
        """Number of trading days the series covers."""
        return len(self.closes)


def load_csv(path: str | Path) -> list[PriceSeries]:
    """Read a close-price CSV into one date-sorted PriceSeries per instrument.

    The file must carry a header row with (case-insensitive) columns
    ``code``, ``date`` and ``close``. Dates are ISO-8601. An empty close
    field is kept as NaN for ``clean`` to drop; anything else unparsable
    is an error naming the offending row.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        positions = {name.strip().lower(): i for i, name in enumerate(header)}
        missing = [c for c in REQUIRED_COLUMNS if c not in positions]
        if missing:
            raise DataError(f"{path}: missing required column(s): {', '.join(missing)}")
        i_code, i_date, i_close = (positions[c] for c in REQUIRED_COLUMNS)

        rows: dict[str, list[tuple[date, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) <= max(i_code, i_date, i_close):
                raise DataError(f"{path}:{lineno}: too few columns")
            code = row[i_code].strip()
            if not code:
                raise DataError(f"{path}:{lineno}: empty instrument code")
            try:
                day = date.fromisoformat(row[i_date].strip())
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad date {row[i_date]!r}: {exc}") from None
            raw_close = row[i_close].strip()
            if not raw_close:
                close = math.nan
            else:
                try:
                    close = float(raw_close)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: bad close {raw_close!r}") from None
            rows.setdefault(code, []).append((day, close))

    out = []
    for code in sorted(rows):
        pairs = sorted(rows[code], key=lambda p: p[0])
        out.append(PriceSeries(code, [p[0] for p in pairs], np.array([p[1] for p in pairs])))
    return out


def save_csv(series_list: list[PriceSeries], path: str | Path) -> None:
    """Write series back to the same CSV schema ``load_csv`` reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REQUIRED_COLUMNS)
        for series in series_list:
            for day, close in zip(series.dates, series.closes):
                writer.writerow([series.code, day.isoformat(), repr(float(close))])


def clean(series: PriceSeries) -> PriceSeries:
    """Drop rows with missing or non-positive closes, preserving order.

    Raises UnusableSeriesError when more than half of the rows go: such
    instruments are screened out rather than silently thinned to noise.
    Dropped prices are not interpolated; a fabricated close would be
    indistinguishable from a real one downstream.
    """
    keep = np.isfinite(series.closes) & (series.closes > 0)
    dropped = int(len(series) - keep.sum())
    if dropped > MAX_DROP_FRACTION * len(series):
        raise UnusableSeriesError(series.code, dropped, len(series))
    if dropped == 0:
        return series
    dates = [d for d, k in zip(series.dates, keep) if k]
    return PriceSeries(series.code, dates, series.closes[keep])
