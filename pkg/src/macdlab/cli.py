"""Batch command-line front end.

Subcommands mirror the workflow: ingest -> analyze/denoise -> backtest
-> compare -> optimize. Every run writes its artifacts plus a
manifest.json under --out; outputs carry no timestamps or other
run-varying content, so re-running a command reproduces them
byte-for-byte.

Exit codes: 0 success, 1 usage/config error, 2 data or domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import detect_divergences, detect_oscillation
from .backtest import DEFAULT_CAPITAL, StrategyMode, run_backtest
from .errors import ConfigError, DataError, UnusableSeriesError
from .indicators import MacdParams, compute_indicators, cross_signals
from .ingest import clean, load_csv, save_csv
from .metrics import REPORT_COLUMNS, MetricsReport, RiskConfig, compute_metrics
from .optimizer import GaConfig, optimize
from .wavelet import denoise_dif

MODE_CHOICES = tuple(m.value for m in StrategyMode)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; this laboratory reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_params(text: str) -> MacdParams:
    try:
        fast, slow, signal = (int(p) for p in text.split(","))
        return MacdParams(fast, slow, signal)
    except (ValueError, ConfigError) as exc:
        raise argparse.ArgumentTypeError(f"bad --params {text!r}: {exc}") from None


def _fmt(value) -> str:
    """Deterministic cell formatting: full-precision floats, explicit None."""
    if value is None:
        return "undefined"
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])
    print(f"wrote {path}")


def _write_manifest(out: Path, command: str, args: argparse.Namespace,
                    options: dict, artifacts: list[str]) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "data": str(args.data),
        "options": options,
        "artifacts": sorted(artifacts),
    }
    _write_json(out / "manifest.json", manifest)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_usable(path) -> tuple[list, list[tuple[str, str]]]:
    """Clean every instrument; return (usable series, [(code, status)] for all)."""
    usable, statuses = [], []
    for series in load_csv(path):
        try:
            usable.append(clean(series))
            statuses.append((series.code, "ok"))
        except UnusableSeriesError:
            statuses.append((series.code, "unusable"))
    return usable, statuses


def _metrics_row(report: MetricsReport) -> list:
    return [getattr(report, name) for name in REPORT_COLUMNS]


def _metrics_json(report: MetricsReport) -> dict:
    return report.as_dict()


# ---------------------------------------------------------------- commands


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    artifacts = []
    raw = load_csv(args.data)
    summary, usable = [], []
    for series in raw:
        try:
            cleaned = clean(series)
            usable.append(cleaned)
            summary.append([series.code, len(series), len(cleaned),
                            len(series) - len(cleaned), "ok"])
        except UnusableSeriesError as exc:
            summary.append([series.code, len(series), "", exc.dropped, "unusable"])
    _write_csv(out / "instruments.csv",
               ["code", "rows", "rows_kept", "rows_dropped", "status"], summary)
    artifacts.append("instruments.csv")
    save_csv(usable, out / "cleaned.csv")
    print(f"wrote {out / 'cleaned.csv'}")
    artifacts.append("cleaned.csv")
    _write_manifest(out, "ingest", args, {}, artifacts)
    return 0


def cmd_denoise(args) -> int:
    out = _out_dir(args)
    artifacts = []
    usable, _ = _load_usable(args.data)
    for series in usable:
        ind = compute_indicators(series, args.params)
        smooth = denoise_dif(ind.dif)
        name = f"denoise_{series.code}.csv"
        _write_csv(out / name, ["date", "dif", "dif_denoised"],
                   [[d.isoformat(), r, s] for d, r, s in zip(series.dates, ind.dif, smooth)])
        artifacts.append(name)
    _write_manifest(out, "denoise", args,
                    {"params": list(args.params.as_tuple())}, artifacts)
    return 0


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    artifacts = []
    usable, _ = _load_usable(args.data)
    for series in usable:
        osc = detect_oscillation(series)
        name = f"oscillation_{series.code}.csv"
        _write_csv(out / name,
                   ["date", "close", "mean10", "inband", "pairflag", "mask"],
                   [[d.isoformat(), c, m, i, p, k]
                    for d, c, m, i, p, k in zip(series.dates, series.closes, osc.mean10,
                                                osc.inband, osc.pairflag, osc.mask)])
        artifacts.append(name)

        ind = compute_indicators(series, args.params)
        events = detect_divergences(series, ind)
        name = f"divergences_{series.code}.json"
        _write_json(out / name, [
            {
                "kind": e.kind,
                "current_extreme_index": e.current_extreme_index,
                "previous_extreme_index": e.previous_extreme_index,
                "current_date": series.dates[e.current_extreme_index].isoformat(),
                "previous_date": series.dates[e.previous_extreme_index].isoformat(),
                "price_at_extremes": list(e.price_at_extremes),
                "macd_at_extremes": list(e.macd_at_extremes),
            }
            for e in events
        ])
        artifacts.append(name)
    _write_manifest(out, "analyze", args,
                    {"params": list(args.params.as_tuple())}, artifacts)
    return 0


def _chart_rows(series, params: MacdParams, mode: StrategyMode):
    ind = compute_indicators(series, params)
    smooth = denoise_dif(ind.dif)
    if mode is StrategyMode.RAW:
        trade_ind = ind
    else:
        from .backtest import recompute_dea_from_denoised

        trade_ind = recompute_dea_from_denoised(smooth, params.signal)
    signals = cross_signals(trade_ind).signals
    for i, day in enumerate(series.dates):
        yield [day.isoformat(), series.closes[i], ind.dif[i], smooth[i],
               trade_ind.dea[i], int(signals[i])]


def cmd_backtest(args) -> int:
    out = _out_dir(args)
    artifacts = []
    mode = StrategyMode(args.mode)
    risk = RiskConfig(risk_free_rate=args.risk_free)
    usable, _ = _load_usable(args.data)
    if not usable:
        raise DataError(f"no usable instrument in {args.data}")
    for series in usable:
        log = run_backtest(series, args.params, mode, args.capital)
        report = compute_metrics(log, series.span_days, risk)

        name = f"metrics_{series.code}.json"
        _write_json(out / name, _metrics_json(report))
        artifacts.append(name)

        name = f"trades_{series.code}.json"
        _write_json(out / name, [
            {
                "buy_index": t.buy_index,
                "sell_index": t.sell_index,
                "buy_date": series.dates[t.buy_index].isoformat(),
                "sell_date": series.dates[t.sell_index].isoformat(),
                "buy_price": t.buy_price,
                "sell_price": t.sell_price,
                "quantity": t.quantity,
                "pnl": t.pnl,
                "trigger": t.trigger,
            }
            for t in log.trades
        ])
        artifacts.append(name)

        name = f"equity_{series.code}.csv"
        _write_csv(out / name, ["date", "equity"],
                   [[d.isoformat(), e] for d, e in zip(series.dates, log.equity)])
        artifacts.append(name)

        name = f"chart_{series.code}.csv"
        _write_csv(out / name, ["date", "close", "dif", "dif_denoised", "dea", "signal"],
                   _chart_rows(series, args.params, mode))
        artifacts.append(name)
    _write_manifest(out, "backtest", args, {
        "mode": mode.value,
        "params": list(args.params.as_tuple()),
        "capital": args.capital,
        "risk_free": args.risk_free,
    }, artifacts)
    return 0


def cmd_compare(args) -> int:
    out = _out_dir(args)
    risk = RiskConfig(risk_free_rate=args.risk_free)
    rows = []
    for series in load_csv(args.data):
        try:
            cleaned = clean(series)
        except UnusableSeriesError:
            for mode in StrategyMode:
                rows.append([series.code, mode.value] + [""] * len(REPORT_COLUMNS) + ["unusable"])
            continue
        for mode in StrategyMode:
            try:
                log = run_backtest(cleaned, args.params, mode, args.capital)
                report = compute_metrics(log, cleaned.span_days, risk)
                rows.append([series.code, mode.value] + _metrics_row(report) + ["ok"])
            except (DataError, ValueError):
                rows.append([series.code, mode.value] + [""] * len(REPORT_COLUMNS) + ["error"])
    _write_csv(out / "comparison.csv",
               ["name", "mode", *REPORT_COLUMNS, "status"], rows)
    _write_manifest(out, "compare", args, {
        "params": list(args.params.as_tuple()),
        "capital": args.capital,
        "risk_free": args.risk_free,
    }, ["comparison.csv"])
    return 0


def cmd_optimize(args) -> int:
    out = _out_dir(args)
    artifacts = []
    mode = StrategyMode(args.mode)
    risk = RiskConfig(risk_free_rate=args.risk_free)
    usable, _ = _load_usable(args.data)
    if not usable:
        raise DataError(f"no usable instrument in {args.data}")
    if args.code:
        matches = [s for s in usable if s.code == args.code]
        if not matches:
            raise DataError(f"instrument {args.code!r} not found or unusable in {args.data}")
        series = matches[0]
    elif len(usable) == 1:
        series = usable[0]
    else:
        raise ConfigError(
            f"{args.data} holds {len(usable)} instruments; pick one with --code"
        )

    cfg = GaConfig(
        population_size=args.pop,
        crossover_rate=args.pc,
        mutation_rate=args.pm,
        convergence_patience=args.patience,
        max_generations=args.max_gen,
        seed=args.seed,
    )
    result = optimize(series, mode, cfg, workers=args.workers, initial_capital=args.capital)

    best = MacdParams(*result.best_genes)
    _write_json(out / "best.json", {
        "code": series.code,
        "mode": mode.value,
        "fast": best.fast,
        "slow": best.slow,
        "signal": best.signal,
        "fitness": result.best_fitness,
        "generations": result.generations,
        "converged": result.converged,
    })
    artifacts.append("best.json")

    _write_csv(out / "history.csv",
               ["generation", "best_fitness", "mean_fitness",
                "best_fast", "best_slow", "best_signal"],
               [[g.generation, g.best_fitness, g.mean_fitness, *g.best_genes]
                for g in result.history])
    artifacts.append("history.csv")

    comparison = []
    for label, params in (("default", MacdParams()), ("optimized", best)):
        log = run_backtest(series, params, mode, args.capital)
        report = compute_metrics(log, series.span_days, risk)
        comparison.append([label, "{},{},{}".format(*params.as_tuple())] + _metrics_row(report))
    _write_csv(out / "comparison.csv",
               ["run", "params", *REPORT_COLUMNS], comparison)
    artifacts.append("comparison.csv")

    _write_manifest(out, "optimize", args, {
        "mode": mode.value,
        "code": series.code,
        "pop": args.pop,
        "pc": args.pc,
        "pm": args.pm,
        "patience": args.patience,
        "max_gen": args.max_gen,
        "seed": args.seed,
        "workers": args.workers,
        "capital": args.capital,
        "risk_free": args.risk_free,
    }, artifacts)
    return 0


# ------------------------------------------------------------------ parser


def _add_common(sub: argparse.ArgumentParser, params: bool = True) -> None:
    sub.add_argument("--data", required=True, help="close-price CSV (code,date,close)")
    sub.add_argument("--out", default="out", help="output directory (default: out)")
    if params:
        sub.add_argument("--params", type=_parse_params, default=MacdParams(),
                         help="indicator periods X,Y,Z (default: 12,26,9)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="macdlab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("ingest", help="load, clean, and summarize instruments")
    _add_common(p, params=False)
    p.set_defaults(func=cmd_ingest)

    p = subs.add_parser("denoise", help="emit raw vs smoothed DIF per instrument")
    _add_common(p)
    p.set_defaults(func=cmd_denoise)

    p = subs.add_parser("analyze", help="emit oscillation masks and divergence events")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("backtest", help="run one strategy mode and emit its reports")
    _add_common(p)
    p.add_argument("--mode", choices=MODE_CHOICES, default="raw")
    p.add_argument("--capital", type=float, default=DEFAULT_CAPITAL)
    p.add_argument("--risk-free", type=float, default=RiskConfig().risk_free_rate,
                   help="annual risk-free rate in percent")
    p.set_defaults(func=cmd_backtest)

    p = subs.add_parser("compare", help="run all three modes over every instrument")
    _add_common(p)
    p.add_argument("--capital", type=float, default=DEFAULT_CAPITAL)
    p.add_argument("--risk-free", type=float, default=RiskConfig().risk_free_rate)
    p.set_defaults(func=cmd_compare)

    p = subs.add_parser("optimize", help="search indicator periods with the genetic algorithm")
    _add_common(p, params=False)
    p.add_argument("--mode", choices=MODE_CHOICES, default="raw")
    p.add_argument("--code", default=None, help="instrument to optimize (required when several)")
    p.add_argument("--pop", type=int, default=GaConfig().population_size)
    p.add_argument("--pc", type=float, default=GaConfig().crossover_rate)
    p.add_argument("--pm", type=float, default=GaConfig().mutation_rate)
    p.add_argument("--patience", type=int, default=GaConfig().convergence_patience)
    p.add_argument("--max-gen", type=int, default=GaConfig().max_generations)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="parallel fitness evaluators")
    p.add_argument("--capital", type=float, default=DEFAULT_CAPITAL)
    p.add_argument("--risk-free", type=float, default=RiskConfig().risk_free_rate)
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"macdlab: config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError) as exc:
        print(f"macdlab: data error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
