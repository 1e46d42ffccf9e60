"""
Level calibration

Finds q and r such that the inter-ES difference at q and the
inter-expectile difference at r equal the inter-quantile difference at p
on a benchmark law. Both level maps are nondecreasing, so each match is a
bracketed bisection.
"""

import asyncio
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from .errors import AssumptionError, CalibrationRangeError, InvalidParameterError, LevelDomainError
from .output import CommandResult
from .probspace import Distribution, ParametricDistribution, as_law, parse_distribution
from .riskmeasures import expectile
from .variability import delta_es, delta_q

logger = logging.getLogger(__name__)

EPS = 1e-9
DEFAULT_GRID_STEP = 0.005
CURVE_COLUMNS = ["p", "q", "r", "es_ratio"]


@dataclass(frozen=True)
class LevelTriple:
    p: float
    q: float
    r: float

    def __post_init__(self) -> None:
        if not 0.5 < self.p < 1:
            raise LevelDomainError(f"p must lie in (1/2,1), got {self.p}")
        if not 0 < self.q < 1:
            raise LevelDomainError(f"q must lie in (0,1), got {self.q}")
        if not 0.5 < self.r < 1:
            raise LevelDomainError(f"r must lie in (1/2,1), got {self.r}")

    @property
    def es_ratio(self) -> float:
        """(1 - q) / (1 - p)"""
        return (1.0 - self.q) / (1.0 - self.p)


_RULE_OF_THUMB = (
    LevelTriple(0.9, 0.75, 0.97),
    LevelTriple(0.95, 0.875, 0.99),
    LevelTriple(0.99, 0.97, 0.999),
)


def rule_of_thumb() -> List[LevelTriple]:
    return list(_RULE_OF_THUMB)


def _regular_law(dist: Distribution) -> ParametricDistribution:
    law = as_law(dist)
    if not isinstance(law, ParametricDistribution):
        raise AssumptionError("calibration needs a continuous benchmark law")
    # raises InfiniteMeanError without a finite mean
    law.mean()
    return law


def _delta_ex_any(law: ParametricDistribution, r: float) -> float:
    # r = 1/2 is the left end of the bracket, where the difference is zero
    if r == 0.5:
        return 0.0
    return float(expectile(law, r)) - float(expectile(law, 1.0 - r))


def _solve(func: Callable[[float], float], lo: float, hi: float, target: float, what: str) -> float:
    f_lo, f_hi = func(lo) - target, func(hi) - target
    if f_lo > 0 or f_hi < 0:
        raise CalibrationRangeError(
            f"{what} spans [{f_lo + target:.6g}, {f_hi + target:.6g}] on its level bracket, "
            f"target {target:.6g} is unreachable"
        )
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    level = float(optimize.bisect(lambda x: func(x) - target, lo, hi, xtol=1e-14, maxiter=200))
    residual = abs(func(level) - target)
    if residual > 1e-9 * (1.0 + target):
        logger.warning("%s residual %.3g at level %.12g exceeds the solve tolerance", what, residual, level)
    return level


def match_levels(dist: Distribution, p: float) -> LevelTriple:
    """Levels (q, r) whose inter-ES and inter-expectile differences match delta_q at p"""
    if not 0.5 < p < 1:
        raise LevelDomainError(f"p must lie in (1/2,1), got {p}")
    law = _regular_law(dist)
    target = float(delta_q(law, p))
    q = _solve(lambda x: float(delta_es(law, x)), EPS, 1.0 - EPS, target, "inter-ES difference")
    r = _solve(lambda x: _delta_ex_any(law, x), 0.5, 1.0 - EPS, target, "inter-expectile difference")
    logger.debug("Matched p=%s on %s: q=%.10f r=%.10f", p, law.describe(), q, r)
    return LevelTriple(p, q, r)


def calibration_curve(dist: Distribution, p_grid: Sequence[float]) -> pd.DataFrame:
    """Table of (p, q, r, es_ratio) over a grid of p in (1/2,1)"""
    for p in p_grid:
        if not 0.5 < p < 1:
            raise LevelDomainError(f"grid level {p} is outside (1/2,1)")
    rows = []
    for p in p_grid:
        triple = match_levels(dist, p)
        rows.append({"p": triple.p, "q": triple.q, "r": triple.r, "es_ratio": triple.es_ratio})
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def parse_grid(text: str) -> List[float]:
    """'start:stop[:step]' with an inclusive stop, default step 0.005"""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise InvalidParameterError(f"grid '{text}' must look like start:stop[:step]")
    try:
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else DEFAULT_GRID_STEP
    except ValueError as e:
        raise InvalidParameterError(f"grid '{text}' has a non-numeric part") from e
    if not step > 0 or stop < start:
        raise InvalidParameterError(f"grid '{text}' needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(v, 12) for v in start + step * np.arange(count)]


@dataclass
class CalibrateInput:
    dist: str
    p: Optional[float] = None
    grid: Optional[str] = None
    out: Optional[str] = None


def _calibrate_sync(input: CalibrateInput) -> CommandResult:
    if (input.p is None) == (input.grid is None):
        raise InvalidParameterError("give exactly one of p or grid")
    law = parse_distribution(input.dist)
    if input.p is not None:
        triple = match_levels(law, input.p)
        return CommandResult(
            command="calibrate",
            fields={"p": triple.p, "q": triple.q, "r": triple.r, "es_ratio": triple.es_ratio},
        )
    curve = calibration_curve(law, parse_grid(input.grid or ""))
    fields = {"dist": input.dist, "points": len(curve)}
    if input.out:
        curve.to_csv(input.out, index=False)
        logger.info("Wrote calibration curve with %d points to %s", len(curve), input.out)
        return CommandResult(command="calibrate", fields={**fields, "out": input.out})
    return CommandResult(command="calibrate", table=curve)


async def calibrate(input: CalibrateInput) -> CommandResult:
    """Match levels at one p, or along a grid of p"""
    return await asyncio.to_thread(_calibrate_sync, input)
