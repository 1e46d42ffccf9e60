"""
Monte Carlo validation of the empirical variability estimators.

Each replication draws its own counter-based Philox stream keyed by
(master seed, replication index), so results do not depend on how
replications are scheduled across worker threads.
"""

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from .asymptotics import ESTIMATORS, asymptotic_variance
from .config import settings
from .errors import DataFormatError, InvalidParameterError
from .output import CommandResult
from .probspace import (
    DiscreteDistribution,
    Distribution,
    ParametricDistribution,
    as_law,
    parse_distribution,
    sample,
)
from .variability import VariabilityKind, evaluate, sample_estimate

logger = logging.getLogger(__name__)

HISTOGRAM_COLUMNS = ["bin_left", "bin_right", "count", "normal_density_at_midpoint"]
_U52 = 2 ** 52

Law = Union[ParametricDistribution, DiscreteDistribution]


def uniform_stream(seed: int, key: Sequence[int], n: int) -> np.ndarray:
    """n uniforms in the open interval (0,1) from the stream keyed by (seed, *key)"""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))
    return (rng.integers(0, _U52, size=n, dtype=np.int64) + 0.5) / _U52


def _check_estimator(estimator: str, p: float) -> None:
    if estimator not in ESTIMATORS:
        raise InvalidParameterError(f"Unknown estimator '{estimator}', expected one of {ESTIMATORS}")
    if not VariabilityKind(estimator).level_ok(p):
        raise InvalidParameterError(f"level {p} is outside the domain of {estimator}")


def _replicate(law: Law, estimator: str, p: float, n: int, replications: int,
               seed: int, key: Tuple[int, ...], workers: int) -> np.ndarray:
    def one(i: int) -> float:
        xs = np.sort(sample(law, uniform_stream(seed, (*key, i), n)))
        return sample_estimate(xs, estimator, p)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(replications)))
    else:
        values = [one(i) for i in range(replications)]
    return np.asarray(values, dtype=float)


@dataclass
class SimConfig:
    dist: Union[str, Distribution]
    estimator: str
    p: float
    n: int
    replications: int
    seed: int
    workers: int = 1
    bins: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidParameterError(f"sample size must be >= 2, got {self.n}")
        if self.replications < 1:
            raise InvalidParameterError(f"replications must be >= 1, got {self.replications}")
        if self.seed < 0:
            raise InvalidParameterError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {self.workers}")
        _check_estimator(self.estimator, self.p)

    def law(self) -> Law:
        if isinstance(self.dist, str):
            return parse_distribution(self.dist)
        return as_law(self.dist)


@dataclass
class SimResult:
    config: SimConfig
    true_value: float
    estimates: np.ndarray
    standardized_errors: np.ndarray
    mean_error: float
    var_error: float
    sigma_sq: float
    ks_distance: float
    ks_pvalue: float
    bin_edges: np.ndarray = field(default_factory=lambda: np.zeros(0))
    counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def var_ratio(self) -> float:
        if self.sigma_sq == 0:
            return math.nan
        return self.var_error / self.sigma_sq


def _reference_variance(law: Law, estimator: str, p: float) -> float:
    if isinstance(law, DiscreteDistribution) and law.is_point_mass:
        return 0.0
    return asymptotic_variance(law, estimator, p).sigma_sq


def _ks(errors: np.ndarray, sigma_sq: float) -> Tuple[float, float]:
    if sigma_sq > 0:
        result = stats.kstest(errors, "norm", args=(0.0, math.sqrt(sigma_sq)))
        return float(result.statistic), float(result.pvalue)
    # point-mass reference at zero
    below = float(np.mean(errors < 0))
    above = float(np.mean(errors > 0))
    return max(below, above), math.nan


def _histogram(raw: np.ndarray, sigma_sq: float, n: int, bins: int) -> Tuple[np.ndarray, np.ndarray]:
    center = float(raw.mean())
    half = 4.0 * math.sqrt(sigma_sq / n) if sigma_sq > 0 else 0.5
    edges = np.linspace(center - half, center + half, bins + 1)
    counts, _ = np.histogram(np.clip(raw, edges[0], edges[-1]), bins=edges)
    return edges, counts


def run_simulation(cfg: SimConfig) -> SimResult:
    """Replicate the estimator and compare standardized errors with the normal limit"""
    law = cfg.law()
    true_value = float(evaluate(cfg.estimator, law, cfg.p))
    sigma_sq = _reference_variance(law, cfg.estimator, cfg.p)
    logger.info("Simulating %s of %s at p=%s: n=%d, R=%d, seed=%d",
                cfg.estimator, cfg.dist, cfg.p, cfg.n, cfg.replications, cfg.seed)
    estimates = _replicate(law, cfg.estimator, cfg.p, cfg.n, cfg.replications,
                           cfg.seed, (), cfg.workers)
    raw = estimates - true_value
    errors = math.sqrt(cfg.n) * raw
    ks_distance, ks_pvalue = _ks(errors, sigma_sq)
    edges, counts = _histogram(raw, sigma_sq, cfg.n, cfg.bins or settings.hist_bins)
    var_error = float(errors.var(ddof=1)) if len(errors) > 1 else 0.0
    return SimResult(
        config=cfg,
        true_value=true_value,
        estimates=estimates,
        standardized_errors=errors,
        mean_error=float(errors.mean()),
        var_error=var_error,
        sigma_sq=sigma_sq,
        ks_distance=ks_distance,
        ks_pvalue=ks_pvalue,
        bin_edges=edges,
        counts=counts,
    )


@dataclass
class SweepResult:
    table: pd.DataFrame
    slope: Optional[float]


def consistency_sweep(dist: Union[str, Distribution], estimator: str, p: float,
                      n_grid: Sequence[int], replications: int, seed: int,
                      workers: int = 1) -> SweepResult:
    """Mean absolute error per sample size and its log-log slope"""
    _check_estimator(estimator, p)
    if len(n_grid) < 1 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise InvalidParameterError("n_grid must be strictly increasing")
    if n_grid[0] < 2:
        raise InvalidParameterError("sample sizes must be >= 2")
    law = parse_distribution(dist) if isinstance(dist, str) else as_law(dist)
    true_value = float(evaluate(estimator, law, p))
    rows = []
    for n in n_grid:
        estimates = _replicate(law, estimator, p, n, replications, seed, (n,), workers)
        mae = float(np.abs(estimates - true_value).mean())
        logger.debug("n=%d mae=%.6g", n, mae)
        rows.append({"n": int(n), "mae": mae})
    table = pd.DataFrame(rows, columns=["n", "mae"])
    slope: Optional[float] = None
    if len(table) > 1 and (table["mae"] > 0).all():
        slope = float(np.polyfit(np.log(table["n"]), np.log(table["mae"]), 1)[0])
    return SweepResult(table, slope)


def histogram_frame(result: SimResult) -> pd.DataFrame:
    edges = result.bin_edges
    mids = 0.5 * (edges[:-1] + edges[1:])
    if result.sigma_sq > 0:
        density = stats.norm.pdf(mids, loc=0.0, scale=math.sqrt(result.sigma_sq / result.config.n))
    else:
        density = np.zeros_like(mids)
    return pd.DataFrame({
        "bin_left": edges[:-1],
        "bin_right": edges[1:],
        "count": result.counts.astype(int),
        "normal_density_at_midpoint": density,
    }, columns=HISTOGRAM_COLUMNS)


def export_histogram(result: SimResult, path: str) -> None:
    """Write bin edges, counts and the N(0, sigma^2/n) overlay as CSV"""
    histogram_frame(result).to_csv(path, index=False)
    logger.info("Wrote histogram with %d bins to %s", len(result.counts), path)


def load_histogram(path: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"cannot parse histogram file {path}: {e}") from e
    if list(frame.columns) != HISTOGRAM_COLUMNS:
        raise DataFormatError(f"histogram file {path} must have columns {HISTOGRAM_COLUMNS}")
    return frame


@dataclass
class SimulateInput:
    dist: str
    estimator: str
    p: float
    n: Optional[int] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    profile: Optional[str] = None
    bins: Optional[int] = None
    workers: Optional[int] = None


def _simulate_sync(input: SimulateInput) -> CommandResult:
    default_n, default_reps = settings.profile_sizes(input.profile)
    cfg = SimConfig(
        dist=input.dist,
        estimator=input.estimator,
        p=input.p,
        n=input.n if input.n is not None else default_n,
        replications=input.reps if input.reps is not None else default_reps,
        seed=input.seed if input.seed is not None else settings.seed,
        workers=input.workers if input.workers is not None else settings.workers,
        bins=input.bins,
    )
    result = run_simulation(cfg)
    fields = {
        "n": cfg.n,
        "replications": cfg.replications,
        "seed": cfg.seed,
        "true_value": result.true_value,
        "sigma_sq": result.sigma_sq,
        "mean_error": result.mean_error,
        "var_error": result.var_error,
        "var_ratio": result.var_ratio,
        "ks_distance": result.ks_distance,
        "ks_pvalue": result.ks_pvalue,
    }
    if input.out:
        export_histogram(result, input.out)
        fields["out"] = input.out
    return CommandResult(command="simulate", fields=fields)


async def simulate(input: SimulateInput) -> CommandResult:
    """Run the asymptotic-normality experiment for one estimator"""
    return await asyncio.to_thread(_simulate_sync, input)
