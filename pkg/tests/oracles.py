"""Independent reference implementations the tests check the library against.

Everything here is deliberately written the slow, obvious way, without
importing any of the code paths it is used to verify.
"""

import math


def ema_naive(values, n):
    """Plain-Python smoothing recurrence, seeded with the first value."""
    alpha = 2.0 / (n + 1.0)
    out = [float(values[0])]
    for v in values[1:]:
        out.append(alpha * float(v) + (1.0 - alpha) * out[-1])
    return out


def macd_naive(closes, fast, slow, signal):
    """(dif, dea, hist) computed through ema_naive only."""
    ema_fast = ema_naive(closes, fast)
    ema_slow = ema_naive(closes, slow)
    dif = [a - b for a, b in zip(ema_fast, ema_slow)]
    dea = ema_naive(dif, signal)
    hist = [2.0 * (a - b) for a, b in zip(dif, dea)]
    return dif, dea, hist


def max_drawdown_bruteforce(equity):
    """Largest percent decline over every (earlier, later) index pair."""
    n = len(equity)
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            worst = max(worst, (equity[i] - equity[j]) / equity[i])
    return worst * 100.0


def metrics_oracle(pnls, equity, initial, span_days, risk_free_pct=2.653, days_per_year=252):
    """All seven indicators, recomputed formula by formula.

    `pnls` are the per-trade profits of the closed round trips, `equity`
    the daily portfolio values. Returns a dict keyed like MetricsReport.
    """
    n_out = len(pnls)
    wins = [p for p in pnls if p > 0]
    n_win = len(wins)
    gross_profit = sum(wins)
    gross_loss = -sum(p for p in pnls if p < 0)

    win_rate = 100.0 * n_win / n_out if n_out else 0.0

    n_loss_slots = n_out - n_win
    if n_win == 0 or n_loss_slots == 0 or gross_loss == 0.0:
        odds_ratio = 0.0
    else:
        odds_ratio = 100.0 * (gross_profit / n_win) / (gross_loss / n_loss_slots)

    trade_frequency = 100.0 * (2 * n_out) / span_days

    final = equity[-1]
    total_return = final - initial
    annual_return = ((final / initial) ** (days_per_year / span_days) - 1.0) * 100.0

    sharpe = None
    if len(equity) >= 3:
        rets = [equity[i + 1] / equity[i] - 1.0 for i in range(len(equity) - 1)]
        mean = sum(rets) / len(rets)
        var = sum((r - mean) ** 2 for r in rets) / (len(rets) - 1)
        vol = math.sqrt(var)
        if vol > 0.0:
            sharpe = ((mean * days_per_year - risk_free_pct / 100.0)
                      / (vol * math.sqrt(days_per_year)) * 100.0)

    return {
        "win_rate": win_rate,
        "odds_ratio": odds_ratio,
        "trade_frequency": trade_frequency,
        "total_return": total_return,
        "annual_return": annual_return,
        "sharpe_ratio": sharpe,
        "max_drawdown": max_drawdown_bruteforce(list(equity)),
    }


def max_drawdown_allpairs_fast(equity):
    """Same all-pairs definition as max_drawdown_bruteforce, vectorized.

    Used where the O(n^2) pure-Python loop would dominate the test run;
    it still evaluates every (i, j) pair.
    """
    import numpy as np

    e = np.asarray(equity, dtype=float)
    i, j = np.triu_indices(e.size, k=1)
    declines = (e[i] - e[j]) / e[i]
    return max(0.0, float(declines.max())) * 100.0 if declines.size else 0.0
