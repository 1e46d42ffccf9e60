"""
Market data pipeline

Daily prices -> log-losses -> rolling-window ratios of the inter-ES
difference to the inter-quantile and inter-expectile differences.
"""

import asyncio
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from .calibration import LevelTriple, rule_of_thumb
from .config import settings
from .errors import DataFormatError, InvalidParameterError
from .montecarlo import uniform_stream
from .output import CommandResult
from .probspace import parse_distribution, sample
from .variability import sample_estimate

logger = logging.getLogger(__name__)

RATIO_COLUMNS = ["date", "ratio_es_q", "ratio_es_ex"]
DEFAULT_WINDOW = 253
DEFAULT_TRIPLE_INDEX = 2
DATE_FORMAT = "%Y-%m-%d"


def _check_dates(index: pd.DatetimeIndex, what: str) -> None:
    if not index.is_unique or not index.is_monotonic_increasing:
        raise DataFormatError(f"{what} dates must be strictly increasing")


@dataclass(frozen=True)
class PriceSeries:
    """Positive prices on strictly increasing dates"""

    data: pd.Series

    def __post_init__(self) -> None:
        if not isinstance(self.data.index, pd.DatetimeIndex):
            raise DataFormatError("price series must be indexed by dates")
        _check_dates(self.data.index, "price")
        if self.data.isna().any() or (self.data <= 0).any():
            raise DataFormatError("prices must be positive numbers")

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class LossSeries:
    """Dated log-losses, -ln(P_t / P_{t-1}) on the date of P_t"""

    data: pd.Series

    def __post_init__(self) -> None:
        if not isinstance(self.data.index, pd.DatetimeIndex):
            raise DataFormatError("loss series must be indexed by dates")
        _check_dates(self.data.index, "loss")
        if not np.isfinite(self.data.to_numpy(dtype=float)).all():
            raise DataFormatError("losses must be finite numbers")

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class RollingConfig:
    window: int = DEFAULT_WINDOW
    p: Optional[float] = None
    q: Optional[float] = None
    r: Optional[float] = None
    triple_index: int = DEFAULT_TRIPLE_INDEX

    def __post_init__(self) -> None:
        if self.window < 2:
            raise InvalidParameterError(f"window must be >= 2, got {self.window}")
        explicit = [v is not None for v in (self.p, self.q, self.r)]
        if any(explicit) and not all(explicit):
            raise InvalidParameterError("give all of p, q and r or none of them")
        if not 1 <= self.triple_index <= len(rule_of_thumb()):
            raise InvalidParameterError(f"triple index must be 1..{len(rule_of_thumb())}")
        self.triple()

    def triple(self) -> LevelTriple:
        if self.p is not None and self.q is not None and self.r is not None:
            return LevelTriple(self.p, self.q, self.r)
        return rule_of_thumb()[self.triple_index - 1]


def _read_csv(path: str, columns: Tuple[str, str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={columns[0]: str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"cannot parse {path}: {e}") from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{path} is missing column(s) {', '.join(missing)}")
    return frame


def _parse_dates(raw: pd.Series, path: str) -> pd.DatetimeIndex:
    try:
        return pd.DatetimeIndex(pd.to_datetime(raw, format=DATE_FORMAT))
    except (ValueError, TypeError) as e:
        raise DataFormatError(f"{path} has a date that is not YYYY-MM-DD: {e}") from e


def _parse_numbers(raw: pd.Series, path: str, column: str) -> np.ndarray:
    try:
        values = pd.to_numeric(raw, errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise DataFormatError(f"{path} has a non-numeric {column} value: {e}") from e
    if np.isnan(values).any():
        raise DataFormatError(f"{path} has an empty {column} value")
    return values


def load_prices(path: str) -> PriceSeries:
    """Read a `date,close` CSV with a header row"""
    frame = _read_csv(path, ("date", "close"))
    if len(frame) < 2:
        raise DataFormatError(f"{path} needs at least 2 price rows, found {len(frame)}")
    dates = _parse_dates(frame["date"], path)
    closes = _parse_numbers(frame["close"], path, "close")
    series = PriceSeries(pd.Series(closes, index=dates, name="close"))
    logger.info("Loaded %d prices from %s", len(series), path)
    return series


def to_log_losses(prices: PriceSeries) -> LossSeries:
    if len(prices) < 2:
        raise DataFormatError("log-losses need at least 2 prices")
    logs = np.log(prices.data.to_numpy(dtype=float))
    losses = -np.diff(logs)
    return LossSeries(pd.Series(losses, index=prices.data.index[1:], name="loss"))


def load_losses(path: str) -> LossSeries:
    """Read a `date,loss` CSV with a header row"""
    frame = _read_csv(path, ("date", "loss"))
    if len(frame) < 1:
        raise DataFormatError(f"{path} has no loss rows")
    dates = _parse_dates(frame["date"], path)
    values = _parse_numbers(frame["loss"], path, "loss")
    return LossSeries(pd.Series(values, index=dates, name="loss"))


def write_losses(losses: LossSeries, path: str) -> None:
    frame = pd.DataFrame({
        "date": losses.data.index.strftime(DATE_FORMAT),
        "loss": losses.data.to_numpy(dtype=float),
    })
    frame.to_csv(path, index=False)


def synth_losses(dist: str, n: int, seed: int, start: str = "2000-01-03") -> LossSeries:
    """iid losses from a distribution spec on consecutive business days"""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    law = parse_distribution(dist)
    values = sample(law, uniform_stream(seed, (0,), n))
    dates = pd.bdate_range(start=start, periods=n)
    return LossSeries(pd.Series(values, index=dates, name="loss"))


def _ratio(numerator: pd.Series, denominator: pd.Series) -> pd.Series:
    ratio = numerator / denominator.where(denominator != 0)
    return ratio.where(np.isfinite(ratio))


def rolling_ratios(losses: LossSeries, cfg: RollingConfig) -> pd.DataFrame:
    """Ratios over trailing windows of cfg.window losses

    The row dated t uses the window of losses that ends on the trading day
    before t; the last row carries the next business day after the data.
    """
    w = cfg.window
    if len(losses) < w:
        raise InvalidParameterError(f"series of {len(losses)} losses is shorter than the window {w}")
    levels = cfg.triple()

    def measure(estimator: str, level: float) -> pd.Series:
        def on_window(window: np.ndarray) -> float:
            return sample_estimate(np.sort(window), estimator, level)

        rolled = losses.data.rolling(w).apply(on_window, raw=True)
        return rolled.iloc[w - 1:].reset_index(drop=True)

    dq = measure("dq", levels.p)
    des = measure("des", levels.q)
    dex = measure("dex", levels.r)
    index = losses.data.index
    dates = list(index[w:]) + [index[-1] + pd.offsets.BDay(1)]
    table = pd.DataFrame({
        "date": pd.DatetimeIndex(dates).strftime(DATE_FORMAT),
        "ratio_es_q": _ratio(des, dq),
        "ratio_es_ex": _ratio(des, dex),
    }, columns=RATIO_COLUMNS)
    missing = int(table[["ratio_es_q", "ratio_es_ex"]].isna().any(axis=1).sum())
    if missing:
        logger.warning("%d window(s) have zero variability, ratios left missing", missing)
    return table


def export_ratios(table: pd.DataFrame, path: str) -> None:
    """Write the ratio table; missing ratios become empty fields"""
    table.to_csv(path, index=False, columns=RATIO_COLUMNS, na_rep="")


def load_ratios(path: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={"date": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"cannot parse {path}: {e}") from e
    if list(frame.columns) != RATIO_COLUMNS:
        raise DataFormatError(f"{path} must have columns {RATIO_COLUMNS}")
    for column in RATIO_COLUMNS[1:]:
        frame[column] = frame[column].astype(float)
    return frame


@dataclass
class RollingInput:
    prices: Optional[str] = None
    losses: Optional[str] = None
    window: int = DEFAULT_WINDOW
    p: Optional[float] = None
    q: Optional[float] = None
    r: Optional[float] = None
    triple: int = DEFAULT_TRIPLE_INDEX
    out: Optional[str] = None


def _rolling_sync(input: RollingInput) -> CommandResult:
    if (input.prices is None) == (input.losses is None):
        raise InvalidParameterError("give exactly one of prices or losses")
    cfg = RollingConfig(input.window, input.p, input.q, input.r, input.triple)
    if input.prices is not None:
        losses = to_log_losses(load_prices(input.prices))
    else:
        losses = load_losses(input.losses or "")
    table = rolling_ratios(losses, cfg)
    levels = cfg.triple()
    if input.out:
        export_ratios(table, input.out)
        logger.info("Wrote %d ratio rows to %s", len(table), input.out)
        return CommandResult(command="rolling", fields={
            "rows": len(table),
            "p": levels.p,
            "q": levels.q,
            "r": levels.r,
            "median_ratio_es_q": table["ratio_es_q"].median(),
            "median_ratio_es_ex": table["ratio_es_ex"].median(),
            "out": input.out,
        })
    return CommandResult(command="rolling", table=table)


async def rolling(input: RollingInput) -> CommandResult:
    """Rolling-window variability ratios of a price or loss file"""
    return await asyncio.to_thread(_rolling_sync, input)


@dataclass
class SynthLossesInput:
    dist: str
    n: int
    seed: Optional[int] = None
    out: Optional[str] = None
    start: str = "2000-01-03"


def _synth_losses_sync(input: SynthLossesInput) -> CommandResult:
    seed = input.seed if input.seed is not None else settings.seed
    losses = synth_losses(input.dist, input.n, seed, input.start)
    if input.out:
        write_losses(losses, input.out)
        return CommandResult(command="synth-losses", fields={"n": len(losses), "seed": seed, "out": input.out})
    table = pd.DataFrame({
        "date": losses.data.index.strftime(DATE_FORMAT),
        "loss": losses.data.to_numpy(dtype=float),
    })
    return CommandResult(command="synth-losses", table=table)


async def synth_losses_command(input: SynthLossesInput) -> CommandResult:
    """Write iid synthetic losses for the rolling pipeline"""
    return await asyncio.to_thread(_synth_losses_sync, input)
