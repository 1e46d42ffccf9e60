import asyncio
import math

import numpy as np
import pandas as pd
import pytest

from varmetrics import marketdata
from varmetrics.errors import DataFormatError, InvalidParameterError
from varmetrics.marketdata import LossSeries, RollingConfig, rolling_ratios
from varmetrics.variability import sample_estimate


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_load_prices(tmp_path):
    series = marketdata.load_prices(_write(tmp_path / "p.csv", "date,close\n2020-01-02,100\n2020-01-03,90\n"))
    assert len(series) == 2


@pytest.mark.parametrize("body", [
    "date,close\n2020-01-02,100\n2020-01-02,90\n",
    "date,close\n2020-01-02,100\n2020-01-03,0\n",
    "date,close\n2020-01-03,100\n2020-01-02,90\n",
    "date,close\n2020/01/02,100\n2020-01-03,90\n",
    "date,price\n2020-01-02,100\n2020-01-03,90\n",
    "date,close\n2020-01-02,100\n",
    "date,close\n2020-01-02,abc\n2020-01-03,90\n",
])
def test_load_prices_rejects_bad_files(tmp_path, body):
    with pytest.raises(DataFormatError):
        marketdata.load_prices(_write(tmp_path / "bad.csv", body))


def test_log_losses():
    dates = pd.to_datetime(["2020-01-02", "2020-01-03", "2020-01-06", "2020-01-07"])
    prices = marketdata.PriceSeries(pd.Series([100.0, 100.0, 90.0, 99.0], index=dates))
    losses = marketdata.to_log_losses(prices)
    assert len(losses) == 3
    assert losses.data.iloc[0] == 0
    assert losses.data.iloc[1] == pytest.approx(-math.log(0.9))
    assert losses.data.iloc[1] == pytest.approx(0.10536, abs=1e-5)
    assert losses.data.iloc[2] == pytest.approx(-math.log(1.1))
    assert losses.data.index[0] == dates[1]


def test_synth_losses_round_trip(tmp_path):
    losses = marketdata.synth_losses("t(4)", 50, seed=9)
    again = marketdata.synth_losses("t(4)", 50, seed=9)
    assert np.array_equal(losses.data.to_numpy(), again.data.to_numpy())
    assert losses.data.index[0] == pd.Timestamp("2000-01-03")
    assert all(d.weekday() < 5 for d in losses.data.index)
    path = str(tmp_path / "losses.csv")
    marketdata.write_losses(losses, path)
    loaded = marketdata.load_losses(path)
    assert np.allclose(loaded.data.to_numpy(), losses.data.to_numpy(), rtol=0, atol=1e-15)
    assert list(loaded.data.index) == list(losses.data.index)


def test_rolling_rows_and_dates():
    losses = marketdata.synth_losses("normal(0,1)", 30, seed=1)
    table = rolling_ratios(losses, RollingConfig(window=10))
    assert list(table.columns) == marketdata.RATIO_COLUMNS
    assert len(table) == 30 - 10 + 1
    index = losses.data.index
    # the row dated t only sees losses strictly before t
    assert table["date"].iloc[0] == index[10].strftime("%Y-%m-%d")
    assert table["date"].iloc[-1] == (index[-1] + pd.offsets.BDay(1)).strftime("%Y-%m-%d")


def test_rolling_window_uses_trailing_losses():
    losses = marketdata.synth_losses("exp(1)", 15, seed=2)
    cfg = RollingConfig(window=10, p=0.9, q=0.75, r=0.97)
    table = rolling_ratios(losses, cfg)
    window = np.sort(losses.data.to_numpy()[:10])
    expected = sample_estimate(window, "des", 0.75) / sample_estimate(window, "dq", 0.9)
    assert table["ratio_es_q"].iloc[0] == pytest.approx(expected)


def test_constant_window_gives_missing_ratios(tmp_path):
    dates = pd.bdate_range("2021-01-04", periods=12)
    values = np.r_[np.zeros(6), np.linspace(-1, 1, 6)]
    losses = LossSeries(pd.Series(values, index=dates))
    table = rolling_ratios(losses, RollingConfig(window=5))
    assert math.isnan(table["ratio_es_q"].iloc[0])
    assert math.isnan(table["ratio_es_ex"].iloc[0])
    assert not math.isnan(table["ratio_es_q"].iloc[-1])
    path = str(tmp_path / "ratios.csv")
    marketdata.export_ratios(table, path)
    assert ",," in (tmp_path / "ratios.csv").read_text().splitlines()[1]
    loaded = marketdata.load_ratios(path)
    assert math.isnan(loaded["ratio_es_q"].iloc[0])
    assert loaded["ratio_es_ex"].iloc[-1] == pytest.approx(table["ratio_es_ex"].iloc[-1])


def test_empty_ratio_table_is_header_only(tmp_path):
    path = str(tmp_path / "empty.csv")
    marketdata.export_ratios(pd.DataFrame(columns=marketdata.RATIO_COLUMNS), path)
    assert (tmp_path / "empty.csv").read_text().strip() == "date,ratio_es_q,ratio_es_ex"


def test_rolling_config_validation():
    assert RollingConfig().triple().p == 0.95
    assert RollingConfig(triple_index=1).triple().q == 0.75
    with pytest.raises(InvalidParameterError):
        RollingConfig(window=1)
    with pytest.raises(InvalidParameterError):
        RollingConfig(p=0.9)
    with pytest.raises(InvalidParameterError):
        RollingConfig(triple_index=4)
    with pytest.raises(InvalidParameterError):
        rolling_ratios(marketdata.synth_losses("normal(0,1)", 5, seed=1), RollingConfig(window=10))


def test_heavy_tails_raise_the_es_to_quantile_ratio():
    losses = marketdata.synth_losses("t(4)", 2000, seed=20210901)
    table = rolling_ratios(losses, RollingConfig(window=253, p=0.95, q=0.875, r=0.99))
    assert table["ratio_es_q"].median() > 1
    assert table["ratio_es_ex"].median() < 1


def test_normal_losses_keep_ratios_near_one():
    losses = marketdata.synth_losses("normal(0,1)", 2000, seed=20210901)
    table = rolling_ratios(losses, RollingConfig(window=253))
    assert 0.9 <= table["ratio_es_q"].median() <= 1.1
    assert 0.9 <= table["ratio_es_ex"].median() <= 1.1


def test_rolling_command(tmp_path):
    prices = 100 * np.exp(-np.cumsum(marketdata.synth_losses("normal(0,0.01)", 40, seed=3).data.to_numpy()))
    frame = pd.DataFrame({"date": pd.bdate_range("2019-01-01", periods=40).strftime("%Y-%m-%d"), "close": prices})
    price_path = tmp_path / "prices.csv"
    frame.to_csv(price_path, index=False)
    out = tmp_path / "ratios.csv"
    inp = marketdata.RollingInput(prices=str(price_path), window=20, out=str(out))
    result = asyncio.run(marketdata.rolling(inp))
    assert result.fields["rows"] == 39 - 20 + 1
    assert len(marketdata.load_ratios(str(out))) == 20
    with pytest.raises(InvalidParameterError):
        asyncio.run(marketdata.rolling(marketdata.RollingInput()))


def test_synth_losses_command(tmp_path):
    out = tmp_path / "l.csv"
    result = asyncio.run(marketdata.synth_losses_command(
        marketdata.SynthLossesInput(dist="exp(1)", n=25, seed=1, out=str(out))
    ))
    assert result.fields["n"] == 25
    assert len(marketdata.load_losses(str(out))) == 25


def test_ratios_ignore_scale_and_shift_of_the_losses():
    losses = marketdata.synth_losses("t(4)", 120, seed=11)
    cfg = RollingConfig(window=60)
    base = rolling_ratios(losses, cfg)
    for transformed in (LossSeries(losses.data * 3.5), LossSeries(losses.data + 0.02)):
        table = rolling_ratios(transformed, cfg)
        assert list(table["date"]) == list(base["date"])
        for column in ("ratio_es_q", "ratio_es_ex"):
            assert np.allclose(table[column], base[column], rtol=1e-9, atol=0)
