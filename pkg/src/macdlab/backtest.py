"""Execute the crossover trading rules over a price series.

Three strategy modes: trade the raw DIF/DEA crossings, trade crossings
of the wavelet-smoothed DIF against a signal line recomputed from it,
or additionally let divergence events force entries and exits. All-in
fills at the signal day's close, no fees, fractional quantities.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .analysis import PROMINENCE_WINDOW, detect_divergences
from .errors import DataError
from .indicators import (
    SIGNAL_BUY,
    SIGNAL_SELL,
    IndicatorSeries,
    MacdParams,
    compute_indicators,
    cross_signals,
    ema,
)
from .ingest import PriceSeries

DEFAULT_CAPITAL = 500_000.0


class StrategyMode(enum.Enum):
    RAW = "raw"
    DENOISED = "denoised"
    DENOISED_WITH_DIVERGENCE = "divergence"


@dataclass
class Trade:
    """One closed buy/sell round trip.

    trigger records what closed the position: a downward crossing
    ("cross"), a forced divergence exit ("divergence"), or the end-of-
    series liquidation ("final_liquidation").
    """

    buy_index: int
    sell_index: int
    buy_price: float
    sell_price: float
    quantity: float
    pnl: float
    trigger: str


@dataclass
class TradeLog:
    """Executed trades plus the daily equity curve and its tallies."""

    trades: list[Trade]
    equity: np.ndarray = field(repr=False)
    initial_capital: float
    n_total: int
    n_sells: int
    n_wins: int
    gross_profit: float
    gross_loss: float
    net: float


def recompute_dea_from_denoised(denoised_dif, signal: int) -> IndicatorSeries:
    """Rebuild the signal line and histogram on top of a smoothed DIF."""
    dn = np.asarray(denoised_dif, dtype=float)
    if dn.size == 0:
        raise ValueError("empty denoised DIF")
    return IndicatorSeries.from_dif_dea(dn, ema(dn, signal))


def _forced_actions(prices: PriceSeries, raw_ind: IndicatorSeries) -> dict[int, int]:
    """Map day -> forced signal from divergence events.

    An event is confirmable one day after its extreme (peak detection
    needs the next close), so it executes at that day's close. A top
    forces a sell, a bottom forces a buy. Divergences are read off the
    conventional histogram, not the smoothed one.
    """
    if len(prices) < PROMINENCE_WINDOW + 2:
        return {}
    forced = {}
    for event in detect_divergences(prices, raw_ind):
        day = event.current_extreme_index + 1
        forced[day] = SIGNAL_SELL if event.kind == "top" else SIGNAL_BUY
    return forced


def run_backtest(
    prices: PriceSeries,
    params: MacdParams,
    mode: StrategyMode,
    initial_capital: float = DEFAULT_CAPITAL,
) -> TradeLog:
    """Run one strategy over a cleaned series and log every execution.

    Buys invest the whole cash balance at that day's close; sells
    liquidate the whole position. Signals that would repeat the current
    state are ignored, as is a buy on the final day (it could never
    close). An open position at the end is sold at the last close and
    tagged final_liquidation. Divergence-forced actions take precedence
    over a crossover landing on the same day.
    """
    n = len(prices)
    if n < params.slow:
        raise DataError(f"series too short: {n} rows < slow period {params.slow}")
    if initial_capital <= 0:
        raise ValueError(f"initial capital must be positive, got {initial_capital}")
    closes = np.asarray(prices.closes, dtype=float)

    raw_ind = compute_indicators(prices, params)
    if mode is StrategyMode.RAW:
        trade_ind = raw_ind
    else:
        from .wavelet import denoise_dif

        trade_ind = recompute_dea_from_denoised(denoise_dif(raw_ind.dif), params.signal)
    signals = cross_signals(trade_ind).signals

    forced = {}
    if mode is StrategyMode.DENOISED_WITH_DIVERGENCE:
        forced = _forced_actions(prices, raw_ind)

    trades: list[Trade] = []
    equity = np.zeros(n)
    cash = float(initial_capital)
    quantity = 0.0
    buy_index = -1
    buy_price = 0.0
    cum_pnl = 0.0

    def close_position(day: int, trigger: str):
        nonlocal cash, quantity, cum_pnl
        pnl = quantity * (closes[day] - buy_price)
        cum_pnl = cum_pnl + pnl
        trades.append(Trade(buy_index, day, buy_price, float(closes[day]),
                            quantity, pnl, trigger))
        # Telescoped so that equity[-1] == initial + sum of pnls holds exactly.
        cash = initial_capital + cum_pnl
        quantity = 0.0

    for t in range(n):
        action = forced.get(t, signals[t])
        if action == SIGNAL_BUY and quantity == 0.0 and t < n - 1:
            quantity = cash / closes[t]
            buy_index = t
            buy_price = float(closes[t])
            cash = 0.0
        elif action == SIGNAL_SELL and quantity > 0.0:
            close_position(t, "divergence" if forced.get(t) == SIGNAL_SELL else "cross")
        equity[t] = cash + quantity * closes[t]

    if quantity > 0.0:
        close_position(n - 1, "final_liquidation")
        equity[n - 1] = cash

    pnls = np.array([trade.pnl for trade in trades])
    gross_profit = float(pnls[pnls > 0].sum()) if len(pnls) else 0.0
    gross_loss = float(-pnls[pnls < 0].sum()) if len(pnls) else 0.0
    return TradeLog(
        trades=trades,
        equity=equity,
        initial_capital=float(initial_capital),
        n_total=2 * len(trades),
        n_sells=len(trades),
        n_wins=int((pnls > 0).sum()) if len(pnls) else 0,
        gross_profit=gross_profit,
        gross_loss=gross_loss,
        net=gross_profit - gross_loss,
    )
