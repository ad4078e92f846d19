import csv
import json

import numpy as np
import pytest

from macdlab.cli import main

from conftest import random_walk_closes


def write_csv(path, rows):
    path.write_text("code,date,close\n" + "".join(rows), encoding="utf-8")
    return path


def synthetic_rows(code, closes, start_month=1):
    from datetime import date, timedelta

    start = date(2014, 1, 2)
    return [f"{code},{(start + timedelta(days=i)).isoformat()},{float(c)!r}\n"
            for i, c in enumerate(closes)]


@pytest.fixture
def data_file(tmp_path):
    rng = np.random.default_rng(99)
    closes = random_walk_closes(rng, 220)
    return write_csv(tmp_path / "prices.csv", synthetic_rows("AAA.X", closes))


@pytest.fixture
def two_instrument_file(tmp_path):
    rng = np.random.default_rng(7)
    rows = synthetic_rows("AAA.X", random_walk_closes(rng, 160))
    rows += synthetic_rows("BBB.Y", random_walk_closes(rng, 160))
    return write_csv(tmp_path / "two.csv", rows)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestExitCodes:
    def test_missing_data_flag_is_usage_error(self, capsys):
        assert main(["backtest"]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == 1

    def test_short_series_is_data_error(self, tmp_path, capsys):
        data = write_csv(tmp_path / "short.csv", synthetic_rows("A", [100.0] * 5))
        assert main(["backtest", "--data", str(data), "--out", str(tmp_path / "o")]) == 2
        assert "too short" in capsys.readouterr().err

    def test_missing_file_is_data_error(self, tmp_path):
        assert main(["ingest", "--data", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_bad_population_is_config_error(self, data_file, tmp_path):
        assert main(["optimize", "--data", str(data_file), "--out", str(tmp_path / "o"),
                     "--pop", "1", "--max-gen", "1"]) == 1

    def test_bad_params_is_usage_error(self, data_file, tmp_path, capsys):
        assert main(["backtest", "--data", str(data_file), "--out", str(tmp_path / "o"),
                     "--params", "26,12,9"]) == 1

    def test_bad_date_is_data_error(self, tmp_path):
        data = write_csv(tmp_path / "bad.csv", ["A,2014-13-40,100\n"])
        assert main(["ingest", "--data", str(data), "--out", str(tmp_path / "o")]) == 2


class TestIngest:
    def test_summary_and_cleaned(self, tmp_path):
        rows = synthetic_rows("GOOD", [100.0, 101.0, 102.0, 103.0])
        rows += synthetic_rows("BAD", [0.0, 0.0, 0.0, 10.0])
        data = write_csv(tmp_path / "mix.csv", rows)
        out = tmp_path / "out"
        assert main(["ingest", "--data", str(data), "--out", str(out)]) == 0
        table = read_csv(out / "instruments.csv")
        assert table[0] == ["code", "rows", "rows_kept", "rows_dropped", "status"]
        by_code = {r[0]: r for r in table[1:]}
        assert by_code["GOOD"][4] == "ok"
        assert by_code["BAD"][4] == "unusable"
        cleaned = read_csv(out / "cleaned.csv")
        assert all(r[0] == "GOOD" for r in cleaned[1:])
        assert (out / "manifest.json").exists()


class TestBacktest:
    def test_happy_path_artifacts(self, data_file, tmp_path):
        out = tmp_path / "out"
        assert main(["backtest", "--data", str(data_file), "--out", str(out),
                     "--mode", "raw", "--params", "12,26,9"]) == 0
        assert (out / "metrics_AAA.X.json").exists()
        assert (out / "trades_AAA.X.json").exists()
        assert (out / "equity_AAA.X.csv").exists()
        assert (out / "chart_AAA.X.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "backtest"
        assert set(manifest["artifacts"]) >= {
            "metrics_AAA.X.json", "trades_AAA.X.json", "equity_AAA.X.csv", "chart_AAA.X.csv",
        }
        metrics = json.loads((out / "metrics_AAA.X.json").read_text())
        assert set(metrics) == {"win_rate", "odds_ratio", "trade_frequency", "total_return",
                                "annual_return", "sharpe_ratio", "max_drawdown"}

    def test_chart_rows_align_with_series(self, data_file, tmp_path):
        out = tmp_path / "out"
        main(["backtest", "--data", str(data_file), "--out", str(out), "--mode", "denoised"])
        chart = read_csv(out / "chart_AAA.X.csv")
        assert chart[0] == ["date", "close", "dif", "dif_denoised", "dea", "signal"]
        assert len(chart) - 1 == 220
        equity = read_csv(out / "equity_AAA.X.csv")
        assert len(equity) - 1 == 220

    @pytest.mark.parametrize("mode", ["raw", "denoised", "divergence"])
    def test_all_modes_run(self, data_file, tmp_path, mode):
        assert main(["backtest", "--data", str(data_file),
                     "--out", str(tmp_path / mode), "--mode", mode]) == 0


class TestCompare:
    def test_two_instruments_six_rows(self, two_instrument_file, tmp_path):
        out = tmp_path / "out"
        assert main(["compare", "--data", str(two_instrument_file), "--out", str(out)]) == 0
        table = read_csv(out / "comparison.csv")
        assert table[0][0:2] == ["name", "mode"]
        assert len(table) - 1 == 6
        assert all(row[-1] == "ok" for row in table[1:])

    def test_unusable_instrument_isolated(self, tmp_path):
        rng = np.random.default_rng(5)
        rows = synthetic_rows("GOOD", random_walk_closes(rng, 120))
        rows += synthetic_rows("BAD", [0.0] * 100)
        data = write_csv(tmp_path / "mix.csv", rows)
        out = tmp_path / "out"
        assert main(["compare", "--data", str(data), "--out", str(out)]) == 0
        table = read_csv(out / "comparison.csv")
        statuses = {(r[0], r[-1]) for r in table[1:]}
        assert ("BAD", "unusable") in statuses
        assert ("GOOD", "ok") in statuses
        assert len(table) - 1 == 6

    def test_rerun_is_byte_identical(self, two_instrument_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["compare", "--data", str(two_instrument_file), "--out", str(out1)])
        main(["compare", "--data", str(two_instrument_file), "--out", str(out2)])
        a = (out1 / "comparison.csv").read_bytes()
        b = (out2 / "comparison.csv").read_bytes()
        assert a == b


class TestOptimize:
    def args(self, data, out, **kw):
        base = ["optimize", "--data", str(data), "--out", str(out),
                "--pop", "24", "--max-gen", "4", "--seed", "11"]
        for key, value in kw.items():
            base += [f"--{key}", str(value)]
        return base

    def test_artifacts(self, data_file, tmp_path):
        out = tmp_path / "out"
        assert main(self.args(data_file, out)) == 0
        best = json.loads((out / "best.json").read_text())
        assert {"fast", "slow", "signal", "fitness", "generations", "converged"} <= set(best)
        assert 5 <= best["fast"] <= 20 and 20 <= best["slow"] <= 50
        history = read_csv(out / "history.csv")
        assert history[0] == ["generation", "best_fitness", "mean_fitness",
                              "best_fast", "best_slow", "best_signal"]
        comparison = read_csv(out / "comparison.csv")
        assert [r[0] for r in comparison[1:]] == ["default", "optimized"]
        assert comparison[1][1] == "12,26,9"

    def test_best_fitness_column_never_decreases(self, data_file, tmp_path):
        out = tmp_path / "out"
        main(self.args(data_file, out))
        history = read_csv(out / "history.csv")
        best = [float(r[1]) for r in history[1:]]
        assert all(b >= a for a, b in zip(best, best[1:]))

    def test_multi_instrument_needs_code(self, two_instrument_file, tmp_path):
        assert main(self.args(two_instrument_file, tmp_path / "o")) == 1
        assert main(self.args(two_instrument_file, tmp_path / "o2", code="BBB.Y")) == 0

    def test_unknown_code_is_data_error(self, data_file, tmp_path):
        assert main(self.args(data_file, tmp_path / "o", code="NOPE")) == 2


class TestAnalyzeAndDenoise:
    def test_analyze_artifacts(self, data_file, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", "--data", str(data_file), "--out", str(out)]) == 0
        table = read_csv(out / "oscillation_AAA.X.csv")
        assert table[0] == ["date", "close", "mean10", "inband", "pairflag", "mask"]
        assert len(table) - 1 == 220
        events = json.loads((out / "divergences_AAA.X.json").read_text())
        for event in events:
            assert event["kind"] in ("top", "bottom")
            assert event["previous_extreme_index"] < event["current_extreme_index"]

    def test_denoise_columns_aligned(self, data_file, tmp_path):
        out = tmp_path / "out"
        assert main(["denoise", "--data", str(data_file), "--out", str(out)]) == 0
        table = read_csv(out / "denoise_AAA.X.csv")
        assert table[0] == ["date", "dif", "dif_denoised"]
        assert len(table) - 1 == 220
