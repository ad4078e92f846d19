"""Exponential moving averages, the fast-slow spread (DIF), its signal
line (DEA), the MACD histogram, and raw crossover signals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError
from .ingest import PriceSeries

# Per-day signal tags.
SIGNAL_NONE = 0
SIGNAL_BUY = 1
SIGNAL_SELL = -1


@dataclass(frozen=True)
class MacdParams:
    """Integer periods of the three moving averages: fast, slow, signal."""

    fast: int = 12
    slow: int = 26
    signal: int = 9

    def __post_init__(self):
        for name in ("fast", "slow", "signal"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} period must be an integer >= 1, got {value!r}")
        if self.fast >= self.slow:
            raise ConfigError(f"fast period must be below slow period, got {self.fast} >= {self.slow}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (int(self.fast), int(self.slow), int(self.signal))


@dataclass
class IndicatorSeries:
    """DIF, DEA and histogram arrays aligned 1:1 with the source closes."""

    dif: np.ndarray
    dea: np.ndarray
    macd: np.ndarray

    def __post_init__(self):
        self.dif = np.asarray(self.dif, dtype=float)
        self.dea = np.asarray(self.dea, dtype=float)
        self.macd = np.asarray(self.macd, dtype=float)
        if not (len(self.dif) == len(self.dea) == len(self.macd)):
            raise ValueError("dif, dea and macd must have equal length")

    @classmethod
    def from_dif_dea(cls, dif: np.ndarray, dea: np.ndarray) -> "IndicatorSeries":
        dif = np.asarray(dif, dtype=float)
        dea = np.asarray(dea, dtype=float)
        return cls(dif=dif, dea=dea, macd=2.0 * (dif - dea))

    def __len__(self) -> int:
        return len(self.dif)


@dataclass
class SignalSeries:
    """Per-day crossover tags: SIGNAL_BUY, SIGNAL_SELL or SIGNAL_NONE."""

    signals: np.ndarray

    def __post_init__(self):
        self.signals = np.asarray(self.signals, dtype=np.int8)

    def __len__(self) -> int:
        return len(self.signals)

    def buy_days(self) -> np.ndarray:
        return np.flatnonzero(self.signals == SIGNAL_BUY)

    def sell_days(self) -> np.ndarray:
        return np.flatnonzero(self.signals == SIGNAL_SELL)


def ema(values, n: int) -> np.ndarray:
    """Exponential moving average with alpha = 2/(n+1).

    Seeded with the first value: e[0] = values[0],
    e[t] = alpha * values[t] + (1 - alpha) * e[t-1].
    """
    if n < 1:
        raise ValueError(f"ema period must be >= 1, got {n}")
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("ema of empty input")
    alpha = 2.0 / (n + 1.0)
    # First-order IIR; the initial condition makes e[0] == x[0] exactly.
    out, _ = lfilter([alpha], [1.0, alpha - 1.0], x, zi=[(1.0 - alpha) * x[0]])
    return out


def compute_indicators(prices: PriceSeries | np.ndarray, params: MacdParams) -> IndicatorSeries:
    """DIF = fast EMA - slow EMA of closes; DEA = EMA of DIF; histogram = 2*(DIF-DEA)."""
    closes = prices.closes if isinstance(prices, PriceSeries) else np.asarray(prices, dtype=float)
    if closes.size == 0:
        raise ValueError("cannot compute indicators on an empty series")
    dif = ema(closes, params.fast) - ema(closes, params.slow)
    dea = ema(dif, params.signal)
    return IndicatorSeries.from_dif_dea(dif, dea)


def cross_signals(ind: IndicatorSeries) -> SignalSeries:
    """Tag strict DIF/DEA crossings.

    Day t is a buy iff dif was at or below dea on t-1 and strictly above
    on t; a sell mirrors that downward. Day 0 is always untagged.
    """
    if len(ind) == 0:
        raise ValueError("cross_signals on empty indicator series")
    dif, dea = ind.dif, ind.dea
    signals = np.zeros(len(ind), dtype=np.int8)
    up = (dif[:-1] <= dea[:-1]) & (dif[1:] > dea[1:])
    down = (dif[:-1] >= dea[:-1]) & (dif[1:] < dea[1:])
    signals[1:][up] = SIGNAL_BUY
    signals[1:][down] = SIGNAL_SELL
    return SignalSeries(signals)
